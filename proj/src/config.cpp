#include "parnoise/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "parnoise/errors.hpp"

namespace parnoise {

using nlohmann::json;

namespace {

void require_known_keys(const json& j, const std::string& where,
                        const std::set<std::string>& allowed) {
    for (const auto& item : j.items()) {
        if (!allowed.contains(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

ParSpec parse_par(const json& j) {
    require_known_keys(j, "par", {"T", "p", "phi", "sigma_xi2"});
    if (!j.contains("T") || !j.contains("p") || !j.contains("phi") || !j.contains("sigma_xi2"))
        throw ConfigError("par requires keys T, p, phi, sigma_xi2");
    const int T = j.at("T").get<int>();
    const int p = j.at("p").get<int>();
    const auto rows = j.at("phi").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != T)
        throw ConfigError("par.phi must have T rows");
    Eigen::MatrixXd phi(T, p);
    for (int v = 0; v < T; ++v) {
        if (static_cast<int>(rows[v].size()) != p)
            throw ConfigError("par.phi row " + std::to_string(v + 1) + " must have p entries");
        for (int i = 0; i < p; ++i) phi(v, i) = rows[v][i];
    }
    try {
        return ParSpec(T, p, std::move(phi), j.at("sigma_xi2").get<double>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("par: ") + e.what());
    }
}

NoiseSpec parse_noise(const json& j) {
    require_known_keys(j, "noise", {"family", "sigma2", "weights", "variances"});
    if (!j.contains("family")) throw ConfigError("noise requires key family");
    const std::string family = j.at("family").get<std::string>();
    try {
        if (family == "gaussian") {
            if (!j.contains("sigma2")) throw ConfigError("gaussian noise requires sigma2");
            return NoiseSpec::gaussian(j.at("sigma2").get<double>());
        }
        if (family == "mixture") {
            if (!j.contains("weights") || !j.contains("variances"))
                throw ConfigError("mixture noise requires weights and variances");
            return NoiseSpec::mixture(j.at("weights").get<std::vector<double>>(),
                                      j.at("variances").get<std::vector<double>>());
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("noise: ") + e.what());
    }
    throw ConfigError("noise.family must be 'gaussian' or 'mixture'");
}

DensityPath parse_density_path(const std::string& name) {
    if (name == "auto") return DensityPath::Auto;
    if (name == "closed") return DensityPath::ClosedForm;
    if (name == "inversion") return DensityPath::CfInversion;
    throw ConfigError("density_path must be one of auto|closed|inversion");
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    require_known_keys(j, "config",
                       {"kind", "par", "noise", "replications", "nt", "p_max", "t_max", "p_fit",
                        "s", "density_path", "tgrid", "m_boot", "alpha", "variance_sweep", "seed",
                        "burn_in", "threads", "data_file", "known_period", "keep_components",
                        "out_dir"});
    ExperimentConfig config;
    if (j.contains("kind")) config.kind = j.at("kind").get<std::string>();
    if (j.contains("par")) config.par = parse_par(j.at("par"));
    if (j.contains("noise")) config.noise = parse_noise(j.at("noise"));
    if (j.contains("replications")) config.replications = j.at("replications").get<long>();
    if (j.contains("nt")) config.nt = j.at("nt").get<long>();
    if (j.contains("p_max")) config.p_max = j.at("p_max").get<int>();
    if (j.contains("t_max")) config.t_max = j.at("t_max").get<int>();
    if (j.contains("p_fit")) config.p_fit = j.at("p_fit").get<int>();
    if (j.contains("s")) config.s_high_order = j.at("s").get<int>();
    if (j.contains("density_path"))
        config.density_path = parse_density_path(j.at("density_path").get<std::string>());
    if (j.contains("tgrid")) {
        const json& g = j.at("tgrid");
        require_known_keys(g, "tgrid", {"bound", "step"});
        if (g.contains("bound")) config.tgrid.bound = g.at("bound").get<double>();
        if (g.contains("step")) config.tgrid.step = g.at("step").get<double>();
    }
    if (j.contains("m_boot")) config.m_boot = j.at("m_boot").get<int>();
    if (j.contains("alpha")) config.alpha = j.at("alpha").get<double>();
    if (j.contains("variance_sweep"))
        config.variance_sweep = j.at("variance_sweep").get<std::vector<double>>();
    if (j.contains("seed")) {
        config.seed = j.at("seed").get<std::uint64_t>();
        config.has_seed = true;
    }
    if (j.contains("burn_in")) config.burn_in = j.at("burn_in").get<long>();
    if (j.contains("threads")) config.threads = j.at("threads").get<int>();
    if (j.contains("data_file")) config.data_file = j.at("data_file").get<std::string>();
    if (j.contains("known_period")) config.known_period = j.at("known_period").get<int>();
    if (j.contains("keep_components")) config.keep_components = j.at("keep_components").get<bool>();
    if (j.contains("out_dir")) config.out_dir = j.at("out_dir").get<std::string>();

    if (config.replications < 1) throw ConfigError("replications must be >= 1");
    if (config.m_boot < 1) throw ConfigError("m_boot must be >= 1");
    if (config.burn_in < 0) throw ConfigError("burn_in must be >= 0");
    if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return parse_config(j);
}

json config_to_json(const ExperimentConfig& config) {
    json j;
    j["kind"] = config.kind;
    if (config.par) {
        std::vector<std::vector<double>> rows(config.par->period());
        for (int v = 0; v < config.par->period(); ++v) {
            rows[v].resize(config.par->order());
            for (int i = 0; i < config.par->order(); ++i) rows[v][i] = config.par->phi()(v, i);
        }
        j["par"] = {{"T", config.par->period()},
                    {"p", config.par->order()},
                    {"phi", rows},
                    {"sigma_xi2", config.par->sigma_xi2()}};
    }
    if (config.noise) {
        if (config.noise->is_gaussian())
            j["noise"] = {{"family", "gaussian"}, {"sigma2", config.noise->variances()[0]}};
        else
            j["noise"] = {{"family", "mixture"},
                          {"weights", config.noise->weights()},
                          {"variances", config.noise->variances()}};
    }
    j["replications"] = config.replications;
    j["nt"] = config.nt;
    j["p_max"] = config.p_max;
    j["t_max"] = config.t_max;
    switch (config.density_path) {
        case DensityPath::Auto: j["density_path"] = "auto"; break;
        case DensityPath::ClosedForm: j["density_path"] = "closed"; break;
        case DensityPath::CfInversion: j["density_path"] = "inversion"; break;
    }
    j["tgrid"] = {{"bound", config.tgrid.bound}, {"step", config.tgrid.step}};
    j["m_boot"] = config.m_boot;
    j["alpha"] = config.alpha;
    if (!config.variance_sweep.empty()) j["variance_sweep"] = config.variance_sweep;
    if (config.has_seed) j["seed"] = config.seed;
    j["burn_in"] = config.burn_in;
    j["threads"] = config.threads;
    if (!config.data_file.empty()) j["data_file"] = config.data_file;
    if (config.known_period > 0) j["known_period"] = config.known_period;
    return j;
}

TGrid make_tgrid(const TGridConfig& grid, int dim) {
    TGrid out;
    out.dim = dim;
    out.bound = grid.bound;
    out.step = grid.step;
    return out;
}

}  // namespace parnoise
