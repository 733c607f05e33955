#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zigp/combine.hpp"
#include "zigp/config.hpp"
#include "zigp/csv.hpp"
#include "zigp/extremes.hpp"
#include "zigp/hurdle.hpp"
#include "zigp/simulate.hpp"

namespace zigp {

// Data, mesh, and smoothed-covariate state shared by the stages.
struct Workspace {
    RunConfig config;
    Dataset data;
    TriMesh mesh;
    PredictionGrid grid;                                   // covariates smoothed onto cells
    std::map<std::string, Eigen::VectorXd> node_covariates;  // smoothed onto mesh nodes
    std::map<std::string, double> bandwidths;              // resolved per covariate
};

Workspace load_workspace(const RunConfig& config);

struct FitBundle {
    HurdleFit hurdle;
    std::optional<ExtremesFit> extremes;
};

FitBundle fit_models(const Workspace& ws);

// Each stage writes its outputs (temp-then-rename) under config.out_dir and
// returns the file paths; a manifest with config hash and output checksums is
// appended by the caller through write_manifest.
std::vector<std::string> run_smooth(const Workspace& ws);
std::vector<std::string> run_diagnose(const Workspace& ws);
std::vector<std::string> run_fit(const Workspace& ws, const FitBundle& fits);
std::vector<std::string> run_predict(const Workspace& ws, const FitBundle& fits);
std::vector<std::string> run_combine_from_files(const RunConfig& config);
std::vector<std::string> run_simulate(const RunConfig& config);
std::vector<std::string> run_pipeline(const RunConfig& config);

void write_manifest(const RunConfig& config, const std::vector<std::string>& files);

}  // namespace zigp
