#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace zigp {

// One JSON document drives every subcommand; CLI flags override field by
// field. Zero on a sizing field means "derive from the data".
struct RunConfig {
    std::string input;
    std::string out_dir = "out";
    std::string x_col = "x";
    std::string y_col = "y";
    std::string response = "response";
    std::vector<std::string> covariates;
    std::map<std::string, double> bandwidths;

    double mesh_spacing = 0.0;  // 0: domain extent / 12
    double mesh_margin = -1.0;  // negative: 2 x spacing

    std::optional<double> threshold;  // absent disables the extremes stages

    std::string engine = "laplace";  // laplace | mcmc
    int mcmc_chains = 4;
    int mcmc_iterations = 5000;
    int mcmc_burnin = -1;

    double grid_cell = 0.0;  // 0: domain extent / 50
    int draws = 1000;
    std::uint64_t seed = 1;

    double prior_range = 0.0;  // 0: a fifth of the domain diameter
    double prior_sd = 1.0;
    double xi_lo = 0.0, xi_hi = 0.5;
    int min_exceed = 10;
    std::vector<double> diag_thresholds;  // empty: automatic grid

    // simulate subcommand
    int sim_n = 1000;
    double sim_xmin = 0.0, sim_ymin = 0.0, sim_xmax = 10.0, sim_ymax = 10.0;
    bool sim_composite = false;
    double sim_tail_mix = 0.1;

    void validate() const;
};

RunConfig config_from_json_text(const std::string& text);
RunConfig load_config(const std::string& path);
// Canonical serialization: fixed key order, so equal configs serialize
// identically and the manifest hash is stable.
std::string config_to_json_text(const RunConfig& config);
void save_config(const RunConfig& config, const std::string& path);

}  // namespace zigp
