#include "zigp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "zigp/errors.hpp"
#include "zigp/smoothing.hpp"

namespace zigp {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

FitOptions fit_options(const RunConfig& c) {
    FitOptions o;
    o.engine = c.engine == "mcmc" ? Engine::mcmc : Engine::laplace;
    o.mcmc.chains = c.mcmc_chains;
    o.mcmc.iterations = c.mcmc_iterations;
    o.mcmc.burnin = c.mcmc_burnin;
    o.mcmc.seed = c.seed;
    o.prior_range = c.prior_range;
    o.prior_sd = c.prior_sd;
    o.xi_lo = c.xi_lo;
    o.xi_hi = c.xi_hi;
    o.seed = c.seed;
    return o;
}

ordered_json summary_json(const ParamSummary& s) {
    return ordered_json{{"name", s.name}, {"mean", s.mean},   {"sd", s.sd},
                        {"q025", s.q025}, {"q50", s.q50},     {"q975", s.q975}};
}

ordered_json submodel_json(const SubModelFit& fit) {
    ordered_json j;
    j["fixed"] = ordered_json::array();
    for (const auto& s : fit.post.fixed) j["fixed"].push_back(summary_json(s));
    j["hyper"] = ordered_json::array();
    for (const auto& s : fit.post.hyper) j["hyper"].push_back(summary_json(s));
    j["field_mean"] = std::vector<double>(fit.post.w_mean.begin(), fit.post.w_mean.end());
    j["field_sd"] = std::vector<double>(fit.post.w_sd.begin(), fit.post.w_sd.end());
    j["log_marginal"] = fit.post.log_marginal;
    j["flags"] = fit.post.flags;
    if (fit.rhat.size() > 0) j["max_rhat"] = fit.max_rhat;
    return j;
}

ordered_json standardization_json(const Standardization& s) {
    ordered_json j = ordered_json::object();
    for (size_t i = 0; i < s.names.size(); ++i)
        j[s.names[i]] = ordered_json{{"mean", s.mean[i]}, {"sd", s.sd[i]}};
    return j;
}

void write_json(const std::string& path, const ordered_json& j) {
    atomic_write(path, [&](const std::string& tmp) {
        std::ofstream f(tmp);
        if (!f) throw data_error("cannot write " + tmp);
        f << j.dump(2) << '\n';
    });
}

std::vector<double> auto_thresholds(const Eigen::VectorXd& y) {
    std::vector<double> pos;
    for (int i = 0; i < y.size(); ++i)
        if (y[i] > 0.0) pos.push_back(y[i]);
    if (pos.size() < 3) throw data_error("diagnose: too few positive values");
    std::sort(pos.begin(), pos.end());
    double lo = pos[static_cast<size_t>(0.05 * (pos.size() - 1))];
    double hi = pos[static_cast<size_t>(0.98 * (pos.size() - 1))];
    std::vector<double> out;
    const int k = 30;
    for (int i = 0; i < k; ++i) out.push_back(lo + (hi - lo) * i / (k - 1.0));
    return out;
}

}  // namespace

Workspace load_workspace(const RunConfig& config) {
    config.validate();
    if (config.input.empty()) throw usage_error("no input CSV configured");
    if (config.covariates.empty()) throw usage_error("no covariates configured");

    Workspace ws;
    ws.config = config;
    Table table = read_csv_table(config.input);
    ws.data = read_dataset(table, config.x_col, config.y_col, config.response,
                           config.covariates);
    if (ws.data.n() == 0) throw data_error(config.input + ": no data rows");

    BBox box = bbox_of(ws.data.coords);
    double extent = std::max(box.width(), box.height());
    double spacing = config.mesh_spacing > 0.0 ? config.mesh_spacing : extent / 12.0;
    double margin = config.mesh_margin >= 0.0 ? config.mesh_margin : 2.0 * spacing;
    ws.mesh = build_mesh(box, spacing, margin);

    double cell = config.grid_cell > 0.0 ? config.grid_cell : extent / 50.0;
    ws.grid = PredictionGrid::regular(box, cell);

    std::vector<Point> node_pts = ws.mesh.nodes;
    for (const auto& name : config.covariates) {
        auto it = config.bandwidths.find(name);
        double bw = it != config.bandwidths.end() ? it->second
                                                  : default_bandwidth(ws.data.coords);
        ws.bandwidths[name] = bw;
        const Eigen::VectorXd& v = ws.data.covariates.at(name);
        std::vector<double> values(v.begin(), v.end());
        std::vector<double> at_cells =
            nadaraya_watson(ws.data.coords, values, ws.grid.centers, bw);
        std::vector<double> at_nodes = nadaraya_watson(ws.data.coords, values, node_pts, bw);
        ws.grid.covariates[name] =
            Eigen::Map<const Eigen::VectorXd>(at_cells.data(), ws.grid.n());
        ws.node_covariates[name] =
            Eigen::Map<const Eigen::VectorXd>(at_nodes.data(), ws.mesh.n_nodes());
    }
    return ws;
}

FitBundle fit_models(const Workspace& ws) {
    FitBundle out;
    FitOptions opts = fit_options(ws.config);
    out.hurdle = fit_hurdle(ws.data, ws.config.covariates, ws.mesh, opts);
    if (ws.config.threshold) {
        FitOptions eopts = opts;
        eopts.seed = opts.seed + 1;
        out.extremes = fit_extremes(ws.data, ws.config.covariates, ws.mesh,
                                    *ws.config.threshold, eopts, ws.config.min_exceed);
    }
    return out;
}

std::vector<std::string> run_smooth(const Workspace& ws) {
    fs::create_directories(ws.config.out_dir);
    std::string nodes = join(ws.config.out_dir, "mesh_nodes.csv");
    std::string tris = join(ws.config.out_dir, "mesh_triangles.csv");
    atomic_write(nodes, [&](const std::string& tmp_nodes) {
        atomic_write(tris, [&](const std::string& tmp_tris) {
            ws.mesh.write_csv(tmp_nodes, tmp_tris);
        });
    });

    std::string smoothed = join(ws.config.out_dir, "covariates_smoothed.csv");
    atomic_write(smoothed, [&](const std::string& tmp) {
        std::ofstream f(tmp);
        if (!f) throw data_error("cannot write " + tmp);
        f << "kind,id,x,y";
        for (const auto& name : ws.config.covariates) f << ',' << name;
        f << '\n';
        char buf[64];
        auto row = [&](const char* kind, int id, const Point& p,
                       const std::map<std::string, Eigen::VectorXd>& covs) {
            f << kind << ',' << id;
            std::snprintf(buf, sizeof(buf), ",%.17g,%.17g", p.x, p.y);
            f << buf;
            for (const auto& name : ws.config.covariates) {
                std::snprintf(buf, sizeof(buf), ",%.17g", covs.at(name)[id]);
                f << buf;
            }
            f << '\n';
        };
        for (int i = 0; i < ws.mesh.n_nodes(); ++i)
            row("node", i, ws.mesh.nodes[i], ws.node_covariates);
        for (int i = 0; i < ws.grid.n(); ++i)
            row("cell", i, ws.grid.centers[i], ws.grid.covariates);
    });
    return {nodes, tris, smoothed};
}

std::vector<std::string> run_diagnose(const Workspace& ws) {
    fs::create_directories(ws.config.out_dir);
    std::vector<double> thresholds = ws.config.diag_thresholds.empty()
                                         ? auto_thresholds(ws.data.response)
                                         : ws.config.diag_thresholds;
    std::vector<double> y(ws.data.response.begin(), ws.data.response.end());

    std::string mrl_path = join(ws.config.out_dir, "diag_mrl.csv");
    ThresholdDiag diag = mean_residual_life(y, thresholds);
    atomic_write(mrl_path, [&](const std::string& tmp) { diag.write_csv(tmp); });

    std::string stab_path = join(ws.config.out_dir, "diag_stability.csv");
    StabilityTable table = stability_table(y, thresholds, ws.config.min_exceed);
    atomic_write(stab_path, [&](const std::string& tmp) { table.write_csv(tmp); });
    return {mrl_path, stab_path};
}

std::vector<std::string> run_fit(const Workspace& ws, const FitBundle& fits) {
    fs::create_directories(ws.config.out_dir);
    std::vector<std::string> files;

    ordered_json jh;
    jh["model"] = "hurdle";
    jh["engine"] = ws.config.engine;
    jh["seed"] = ws.config.seed;
    jh["n_total"] = fits.hurdle.n_total;
    jh["n_positive"] = fits.hurdle.n_positive;
    jh["mesh_nodes"] = ws.mesh.n_nodes();
    jh["standardization"] = standardization_json(fits.hurdle.standardize);
    jh["presence"] = submodel_json(fits.hurdle.presence);
    jh["positive"] = submodel_json(fits.hurdle.positive);
    jh["flags"] = fits.hurdle.flags;
    std::string hpath = join(ws.config.out_dir, "fit_hurdle.json");
    write_json(hpath, jh);
    files.push_back(hpath);

    auto dump_chains = [&](const SubModelFit& fit, const std::string& name) {
        if (fit.chains.empty()) return;
        std::string path = join(ws.config.out_dir, "chains_" + name + ".csv");
        atomic_write(path, [&](const std::string& tmp) { write_chains_csv(fit, tmp); });
        files.push_back(path);
    };
    dump_chains(fits.hurdle.presence, "presence");
    dump_chains(fits.hurdle.positive, "positive");

    if (fits.extremes) {
        const ExtremesFit& e = *fits.extremes;
        ordered_json je;
        je["model"] = "extremes";
        je["engine"] = ws.config.engine;
        je["seed"] = ws.config.seed;
        je["threshold"] = e.threshold;
        je["n_total"] = e.n_total;
        je["n_exceed"] = e.n_exceed;
        je["mesh_nodes"] = ws.mesh.n_nodes();
        je["standardization"] = standardization_json(e.standardize);
        je["exceed_prob"] = submodel_json(e.exceed_prob);
        je["exceed"] = submodel_json(e.exceed);
        je["flags"] = e.flags;
        std::string epath = join(ws.config.out_dir, "fit_extremes.json");
        write_json(epath, je);
        files.push_back(epath);
        dump_chains(e.exceed_prob, "exceed_prob");
        dump_chains(e.exceed, "exceed");
    }
    return files;
}

std::vector<std::string> run_predict(const Workspace& ws, const FitBundle& fits) {
    fs::create_directories(ws.config.out_dir);
    std::vector<std::string> files;

    HurdleRaster hr =
        predict_hurdle(fits.hurdle, ws.mesh, ws.grid, ws.config.draws, ws.config.seed);
    std::string hpath = join(ws.config.out_dir, "raster_hurdle.csv");
    atomic_write(hpath, [&](const std::string& tmp) { hr.write_csv(tmp); });
    files.push_back(hpath);

    if (fits.extremes) {
        ExtremesRaster er = predict_extremes(*fits.extremes, ws.mesh, ws.grid,
                                             ws.config.draws, ws.config.seed + 7);
        std::string epath = join(ws.config.out_dir, "raster_extremes.csv");
        atomic_write(epath, [&](const std::string& tmp) { er.write_csv(tmp); });
        files.push_back(epath);
    }
    return files;
}

namespace {

HurdleRaster hurdle_raster_from_csv(const std::string& path) {
    Table t = read_csv_table(path);
    HurdleRaster r;
    const auto& xs = t.col("cell_x");
    const auto& ys = t.col("cell_y");
    for (size_t i = 0; i < xs.size(); ++i) r.cells.push_back({xs[i], ys[i]});
    r.p_mean = t.col("p_mean");
    r.p_sd = t.col("p_sd");
    r.cond_mean = t.col("cond_mean");
    r.cond_sd = t.col("cond_sd");
    r.density_mean = t.col("density_mean");
    return r;
}

ExtremesRaster extremes_raster_from_csv(const std::string& path) {
    Table t = read_csv_table(path);
    ExtremesRaster r;
    const auto& xs = t.col("cell_x");
    const auto& ys = t.col("cell_y");
    for (size_t i = 0; i < xs.size(); ++i) r.cells.push_back({xs[i], ys[i]});
    r.pstar_mean = t.col("pstar_mean");
    r.pstar_sd = t.col("pstar_sd");
    r.exc_mean = t.col("exc_mean");
    r.exc_sd = t.col("exc_sd");
    return r;
}

std::string write_combined(const RunConfig& config, const HurdleRaster& hr,
                           const ExtremesRaster& er, double u) {
    CombinedRaster a = combine_a(hr, er, u);
    CombinedRaster b = combine_b(hr, er, u);
    CombinedRaster c = combine_c(hr, er, u);
    std::string path = join(config.out_dir, "raster_combined.csv");
    atomic_write(path,
                 [&](const std::string& tmp) { write_combined_csv(tmp, a, b, c); });
    return path;
}

}  // namespace

std::vector<std::string> run_combine_from_files(const RunConfig& config) {
    if (!config.threshold)
        throw usage_error("combine: a threshold is required");
    HurdleRaster hr = hurdle_raster_from_csv(join(config.out_dir, "raster_hurdle.csv"));
    ExtremesRaster er =
        extremes_raster_from_csv(join(config.out_dir, "raster_extremes.csv"));
    return {write_combined(config, hr, er, *config.threshold)};
}

std::vector<std::string> run_simulate(const RunConfig& config) {
    fs::create_directories(config.out_dir);
    BBox box{config.sim_xmin, config.sim_ymin, config.sim_xmax, config.sim_ymax};
    double extent = std::max(box.width(), box.height());
    double spacing = config.mesh_spacing > 0.0 ? config.mesh_spacing : extent / 12.0;
    double margin = config.mesh_margin >= 0.0 ? config.mesh_margin : 2.0 * spacing;
    TriMesh mesh = build_mesh(box, spacing, margin);

    SimParams params;
    SimResult sim;
    if (config.sim_composite) {
        TailParams tail;
        tail.tail_mix = config.sim_tail_mix;
        sim = simulate_composite(mesh, params, tail, config.sim_n, config.seed);
    } else {
        sim = simulate_hurdle(mesh, params, config.sim_n, config.seed);
    }

    std::string data_path = join(config.out_dir, "sim_data.csv");
    atomic_write(data_path, [&](const std::string& tmp) {
        std::ofstream f(tmp);
        if (!f) throw data_error("cannot write " + tmp);
        f << "x,y";
        for (int m = 0; m < params.n_covariates; ++m) f << ",cov" << (m + 1);
        f << ",response\n";
        char buf[64];
        for (int i = 0; i < sim.data.n(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g", sim.data.coords[i].x,
                          sim.data.coords[i].y);
            f << buf;
            for (int m = 0; m < params.n_covariates; ++m) {
                std::snprintf(buf, sizeof(buf), ",%.17g",
                              sim.data.covariates.at("cov" + std::to_string(m + 1))[i]);
                f << buf;
            }
            std::snprintf(buf, sizeof(buf), ",%.17g\n", sim.data.response[i]);
            f << buf;
        }
    });

    ordered_json jt;
    jt["seed"] = config.seed;
    jt["n"] = config.sim_n;
    jt["alpha_presence"] = sim.truth.params.alpha_presence;
    jt["alpha_positive"] = sim.truth.params.alpha_positive;
    jt["beta_presence"] = sim.truth.params.beta_presence;
    jt["beta_positive"] = sim.truth.params.beta_positive;
    jt["phi"] = sim.truth.params.phi;
    jt["composite"] = sim.truth.composite;
    if (sim.truth.composite) {
        jt["tail_mix"] = sim.truth.tail.tail_mix;
        jt["tail_u"] = sim.truth.tail.u;
        jt["tail_xi"] = sim.truth.tail.xi;
    }
    jt["w_presence"] =
        std::vector<double>(sim.truth.w_presence.begin(), sim.truth.w_presence.end());
    jt["w_positive"] =
        std::vector<double>(sim.truth.w_positive.begin(), sim.truth.w_positive.end());
    // exact latent surfaces and expected density on the default grid
    double cell = config.grid_cell > 0.0 ? config.grid_cell : extent / 50.0;
    PredictionGrid grid = PredictionGrid::regular(box, cell);
    Eigen::VectorXd truth = sim.truth.expected_density(mesh, grid.centers);
    Eigen::VectorXd p_true, mu_true;
    sim.truth.latent_surfaces(mesh, grid.centers, &p_true, &mu_true);
    jt["grid_cell"] = cell;
    jt["grid_presence_prob"] = std::vector<double>(p_true.begin(), p_true.end());
    jt["grid_cond_mean"] = std::vector<double>(mu_true.begin(), mu_true.end());
    jt["grid_expected_density"] = std::vector<double>(truth.begin(), truth.end());
    std::string truth_path = join(config.out_dir, "sim_truth.json");
    write_json(truth_path, jt);

    return {data_path, truth_path};
}

std::vector<std::string> run_pipeline(const RunConfig& config) {
    Workspace ws = load_workspace(config);
    std::vector<std::string> files = run_smooth(ws);
    FitBundle fits = fit_models(ws);
    for (auto& f : run_fit(ws, fits)) files.push_back(f);
    auto rasters = run_predict(ws, fits);
    for (auto& f : rasters) files.push_back(f);
    if (fits.extremes) {
        HurdleRaster hr = hurdle_raster_from_csv(rasters[0]);
        ExtremesRaster er = extremes_raster_from_csv(rasters[1]);
        files.push_back(write_combined(config, hr, er, *config.threshold));
    }
    write_manifest(config, files);
    return files;
}

void write_manifest(const RunConfig& config, const std::vector<std::string>& files) {
    fs::create_directories(config.out_dir);
    ordered_json j;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config_to_json_text(config))));
    j["config_hash"] = std::string(buf);
    j["version"] = "0.1.0";
    ordered_json outputs = ordered_json::object();
    for (const auto& f : files) {
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a_file(f)));
        outputs[fs::path(f).filename().string()] = std::string(buf);
    }
    j["outputs"] = outputs;
    write_json(join(config.out_dir, "run_manifest.json"), j);
}

}  // namespace zigp
