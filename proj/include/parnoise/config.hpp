#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "parnoise/identification.hpp"
#include "parnoise/model.hpp"
#include "parnoise/validation.hpp"

namespace parnoise {

struct TGridConfig {
    double bound = 10.0;
    double step = 0.1;
};

// One config drives every experiment kind; runners validate the fields
// they need and reject configs with unknown keys. Seeds are mandatory —
// there is no wall-clock fallback.
struct ExperimentConfig {
    std::string kind;  // order-id | joint-id | power | single-fit | simulate
    std::optional<ParSpec> par;
    std::optional<NoiseSpec> noise;
    long replications = 200;
    long nt = 0;
    int p_max = 0;  // 0 = derive from context (T-1)
    int t_max = 5;
    int p_fit = 0;  // estimate subcommand
    int s_high_order = 0;
    DensityPath density_path = DensityPath::Auto;
    TGridConfig tgrid;
    int m_boot = 200;
    double alpha = 0.05;
    std::vector<double> variance_sweep;
    std::uint64_t seed = 0;
    bool has_seed = false;
    long burn_in = 100;
    int threads = 0;  // 0 = hardware concurrency
    std::string data_file;
    int known_period = 0;
    bool keep_components = false;
    std::string out_dir = ".";
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

TGrid make_tgrid(const TGridConfig& grid, int dim);

}  // namespace parnoise
