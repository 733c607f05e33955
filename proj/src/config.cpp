#include "zigp/config.hpp"

#include <fstream>
#include <json.hpp>

#include "zigp/errors.hpp"

namespace zigp {

using ordered_json = nlohmann::ordered_json;

void RunConfig::validate() const {
    if (mesh_spacing < 0.0 || grid_cell < 0.0)
        throw usage_error("config: mesh/grid sizes must be nonnegative");
    if (draws <= 0) throw usage_error("config: draws must be positive");
    if (engine != "laplace" && engine != "mcmc")
        throw usage_error("config: engine must be 'laplace' or 'mcmc'");
    if (threshold && !(*threshold > 0.0))
        throw usage_error("config: threshold must be positive");
    if (!(xi_hi > xi_lo)) throw usage_error("config: xi support must be a nonempty interval");
    if (min_exceed < 2) throw usage_error("config: min_exceed must be at least 2");
    for (const auto& [name, bw] : bandwidths)
        if (!(bw > 0.0)) throw usage_error("config: bandwidth for '" + name + "' must be positive");
}

RunConfig config_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw usage_error(std::string("config: invalid JSON: ") + e.what());
    }

    RunConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key) && !j[key].is_null()) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("input", c.input);
    get("out_dir", c.out_dir);
    get("x_col", c.x_col);
    get("y_col", c.y_col);
    get("response", c.response);
    get("covariates", c.covariates);
    if (j.contains("bandwidths") && !j["bandwidths"].is_null())
        c.bandwidths = j["bandwidths"].get<std::map<std::string, double>>();
    get("mesh_spacing", c.mesh_spacing);
    get("mesh_margin", c.mesh_margin);
    if (j.contains("threshold") && !j["threshold"].is_null())
        c.threshold = j["threshold"].get<double>();
    get("engine", c.engine);
    get("mcmc_chains", c.mcmc_chains);
    get("mcmc_iterations", c.mcmc_iterations);
    get("mcmc_burnin", c.mcmc_burnin);
    get("grid_cell", c.grid_cell);
    get("draws", c.draws);
    get("seed", c.seed);
    get("prior_range", c.prior_range);
    get("prior_sd", c.prior_sd);
    get("xi_lo", c.xi_lo);
    get("xi_hi", c.xi_hi);
    get("min_exceed", c.min_exceed);
    get("diag_thresholds", c.diag_thresholds);
    get("sim_n", c.sim_n);
    get("sim_xmin", c.sim_xmin);
    get("sim_ymin", c.sim_ymin);
    get("sim_xmax", c.sim_xmax);
    get("sim_ymax", c.sim_ymax);
    get("sim_composite", c.sim_composite);
    get("sim_tail_mix", c.sim_tail_mix);
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw usage_error("cannot open config " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return config_from_json_text(text);
}

std::string config_to_json_text(const RunConfig& c) {
    ordered_json j;
    j["input"] = c.input;
    j["out_dir"] = c.out_dir;
    j["x_col"] = c.x_col;
    j["y_col"] = c.y_col;
    j["response"] = c.response;
    j["covariates"] = c.covariates;
    j["bandwidths"] = c.bandwidths;
    j["mesh_spacing"] = c.mesh_spacing;
    j["mesh_margin"] = c.mesh_margin;
    if (c.threshold)
        j["threshold"] = *c.threshold;
    else
        j["threshold"] = nullptr;
    j["engine"] = c.engine;
    j["mcmc_chains"] = c.mcmc_chains;
    j["mcmc_iterations"] = c.mcmc_iterations;
    j["mcmc_burnin"] = c.mcmc_burnin;
    j["grid_cell"] = c.grid_cell;
    j["draws"] = c.draws;
    j["seed"] = c.seed;
    j["prior_range"] = c.prior_range;
    j["prior_sd"] = c.prior_sd;
    j["xi_lo"] = c.xi_lo;
    j["xi_hi"] = c.xi_hi;
    j["min_exceed"] = c.min_exceed;
    j["diag_thresholds"] = c.diag_thresholds;
    j["sim_n"] = c.sim_n;
    j["sim_xmin"] = c.sim_xmin;
    j["sim_ymin"] = c.sim_ymin;
    j["sim_xmax"] = c.sim_xmax;
    j["sim_ymax"] = c.sim_ymax;
    j["sim_composite"] = c.sim_composite;
    j["sim_tail_mix"] = c.sim_tail_mix;
    return j.dump(2) + "\n";
}

void save_config(const RunConfig& config, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    f << config_to_json_text(config);
}

}  // namespace zigp
