#include "parnoise/experiments.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "parnoise/errors.hpp"
#include "parnoise/io.hpp"
#include "parnoise/parallel.hpp"
#include "parnoise/rng.hpp"
#include "parnoise/version.hpp"

namespace parnoise {

using nlohmann::json;

namespace {

constexpr double kXiVarianceFloor = 1e-8;

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

int resolve_threads(const ExperimentConfig& config) {
    return config.threads > 0 ? config.threads : default_thread_count();
}

void require_common(const ExperimentConfig& config) {
    require(config.has_seed, "config: 'seed' is required (no wall-clock seeding)");
}

SimulateOptions sim_options(const ExperimentConfig& config) {
    SimulateOptions opts;
    opts.burn_in_periods = config.burn_in;
    return opts;
}

json report_header(const ExperimentConfig& config, double wall_seconds) {
    json j;
    j["config"] = config_to_json(config);
    j["wall_seconds"] = wall_seconds;
    j["library_version"] = std::string(kVersion);
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::string out_path(const ExperimentConfig& config, const std::string& name) {
    std::filesystem::create_directories(config.out_dir);
    return (std::filesystem::path(config.out_dir) / name).string();
}

}  // namespace

OrderIdReport run_order_id(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    require_common(config);
    require(config.par.has_value(), "order-id: config requires 'par'");
    require(config.noise.has_value(), "order-id: config requires 'noise'");
    require(config.nt > 0, "order-id: config requires 'nt' > 0");

    const ParSpec& par = *config.par;
    const int p_max = config.p_max > 0 ? config.p_max : par.period() - 1;
    require(p_max < par.period(), "order-id: p_max must be < T");

    OrderIdReport report;
    report.true_order = par.order();
    report.p_max = p_max;
    report.records.resize(config.replications);

    parallel_for(config.replications, resolve_threads(config), [&](long rep) {
        const std::uint64_t seed = substream_seed(config.seed, static_cast<std::uint64_t>(rep));
        const Trajectory traj =
            simulate_length(par, *config.noise, config.nt, seed, sim_options(config));
        const BicTable table = select_order_known_T(traj, par.period(), p_max, *config.noise,
                                                    config.density_path);
        OrderIdRecord& record = report.records[rep];
        record.rep = rep;
        record.seed = seed;
        record.p_opt = table.p_opt;
        record.bic.reserve(table.entries.size());
        for (const BicEntry& e : table.entries) record.bic.push_back(e.bic);
    });

    long correct = 0;
    for (const OrderIdRecord& r : report.records)
        if (r.p_opt == report.true_order) ++correct;
    report.fraction_correct = static_cast<double>(correct) / config.replications;
    report.wall_seconds = elapsed_seconds(start);
    return report;
}

JointIdReport run_joint_id(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    require_common(config);
    require(config.par.has_value(), "joint-id: config requires 'par'");
    require(config.noise.has_value(), "joint-id: config requires 'noise'");
    require(config.nt > 0, "joint-id: config requires 'nt' > 0");
    require(config.t_max >= 2, "joint-id: config requires 't_max' >= 2");

    const ParSpec& par = *config.par;
    const int p_max = config.p_max > 0 ? config.p_max : config.t_max - 1;
    const long common_len = config.nt - config.t_max;
    for (int t_star = 2; t_star <= config.t_max; ++t_star)
        require(common_len > 0 && common_len % t_star == 0,
                "joint-id: nt - t_max must be divisible by every candidate period (e.g. 1205 for "
                "t_max=5)");

    JointIdReport report;
    report.true_order = par.order();
    report.true_period = par.period();
    for (int p_star = 1; p_star <= p_max; ++p_star)
        for (int t_star = p_star + 1; t_star <= config.t_max; ++t_star)
            report.candidates.emplace_back(p_star, t_star);
    report.records.resize(config.replications);

    parallel_for(config.replications, resolve_threads(config), [&](long rep) {
        const std::uint64_t seed = substream_seed(config.seed, static_cast<std::uint64_t>(rep));
        const Trajectory traj =
            simulate_length(par, *config.noise, config.nt, seed, sim_options(config));
        const BicTable table =
            select_joint(traj, p_max, config.t_max, *config.noise, config.density_path);
        JointIdRecord& record = report.records[rep];
        record.rep = rep;
        record.seed = seed;
        record.p_opt = table.p_opt;
        record.t_opt = table.t_opt;
        record.bic.reserve(table.entries.size());
        for (const BicEntry& e : table.entries) record.bic.push_back(e.bic);
    });

    long joint = 0, period = 0;
    for (const JointIdRecord& r : report.records) {
        if (r.t_opt == report.true_period) {
            ++period;
            if (r.p_opt == report.true_order) ++joint;
        }
    }
    report.fraction_joint = static_cast<double>(joint) / config.replications;
    report.fraction_period = static_cast<double>(period) / config.replications;
    report.wall_seconds = elapsed_seconds(start);
    return report;
}

PowerReport run_power(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    require_common(config);
    require(config.par.has_value(), "power: config requires 'par' (the H0 model)");
    require(config.noise.has_value(), "power: config requires 'noise' (the H0 noise)");
    require(config.nt > 0, "power: config requires 'nt' > 0");
    require(!config.variance_sweep.empty(), "power: config requires 'variance_sweep'");

    const ParSpec& h0_spec = *config.par;
    const NoiseSpec& h0_noise = *config.noise;
    const TGrid grid = make_tgrid(config.tgrid, h0_spec.period());

    PowerReport report;
    report.alpha = config.alpha;
    report.variances = config.variance_sweep;
    report.power.resize(report.variances.size(), 0.0);
    report.records.resize(report.variances.size() * config.replications);

    for (std::size_t vi = 0; vi < report.variances.size(); ++vi) {
        const double variance = report.variances[vi];
        const NoiseSpec data_noise = h0_noise.scaled_to_variance(variance);
        const std::uint64_t sweep_seed = substream_seed(config.seed, static_cast<std::uint64_t>(vi));

        parallel_for(config.replications, resolve_threads(config), [&](long rep) {
            const std::uint64_t data_seed = substream_seed(sweep_seed, 2 * rep);
            const std::uint64_t boot_seed = substream_seed(sweep_seed, 2 * rep + 1);
            const Trajectory traj =
                simulate_length(h0_spec, data_noise, config.nt, data_seed, sim_options(config));
            const GofTestResult gof =
                gof_test(traj, h0_spec, h0_noise, config.m_boot, grid, boot_seed, 1);
            PowerRecord& record = report.records[vi * config.replications + rep];
            record.variance = variance;
            record.rep = rep;
            record.d_observed = gof.d_observed;
            record.p_value = gof.p_value;
        });

        long rejections = 0;
        for (long rep = 0; rep < config.replications; ++rep)
            if (report.records[vi * config.replications + rep].p_value < config.alpha) ++rejections;
        report.power[vi] = static_cast<double>(rejections) / config.replications;
    }
    report.wall_seconds = elapsed_seconds(start);
    return report;
}

SingleFitReport run_single_fit(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    require_common(config);
    require(config.noise.has_value(), "single-fit: config requires 'noise' (family structure)");

    Trajectory traj;
    int period = 0;
    if (!config.data_file.empty()) {
        const DataFile data = read_data_csv(config.data_file);
        period = config.known_period > 0 ? config.known_period : data.period.value_or(0);
        require(period >= 2, "single-fit: period unknown (set known_period or a T= header)");
        traj.values = data.values;
        traj.period = period;
    } else {
        require(config.par.has_value(), "single-fit: config requires 'par' or 'data_file'");
        require(config.nt > 0, "single-fit: config requires 'nt' > 0");
        period = config.par->period();
        traj = simulate_length(*config.par, *config.noise, config.nt,
                               substream_seed(config.seed, 0), sim_options(config));
    }

    SingleFitReport report;
    report.dropped_tail = static_cast<int>(traj.values.size() % period);
    if (report.dropped_tail != 0)
        report.warnings.push_back("data length not divisible by T; trailing samples unused");

    const int p_max = config.p_max > 0 ? config.p_max : period - 1;
    report.bic_table =
        select_order_known_T(traj, period, p_max, *config.noise, config.density_path);

    const BicEntry* best = nullptr;
    for (const BicEntry& e : report.bic_table.entries)
        if (e.p_star == report.bic_table.p_opt && e.estimation) best = &e;
    if (best == nullptr) throw NumericError("single-fit: no usable estimation result");
    report.estimation = *best->estimation;
    if (report.estimation.degenerate_bound)
        report.warnings.push_back("degenerate noise-variance bound (zeta <= 0)");
    if (report.estimation.negative_xi_variance)
        report.warnings.push_back("negative per-phase innovation variance, clamped downstream");

    const ParSpec fitted(period, report.bic_table.p_opt, report.estimation.phi_hat,
                         std::max(report.estimation.sigma_xi2_hat, kXiVarianceFloor));
    const NoiseSpec fitted_noise =
        report.estimation.sigma_z2_hat > 0.0
            ? config.noise->scaled_to_variance(report.estimation.sigma_z2_hat)
            : NoiseSpec::gaussian(0.0);
    const TGrid grid = make_tgrid(config.tgrid, period);
    report.gof = gof_test(traj, fitted, fitted_noise, config.m_boot, grid,
                          substream_seed(config.seed, 1), resolve_threads(config));

    const std::vector<double> residuals = compute_residuals(traj.values, fitted.phi());
    report.independence = block_independence_check(block_residuals(residuals, period));

    report.wall_seconds = elapsed_seconds(start);
    return report;
}

void write_order_id_report(const ExperimentConfig& config, const OrderIdReport& report) {
    std::ostringstream csv;
    csv << std::setprecision(17) << "rep,seed,p_opt";
    for (int p = 1; p <= report.p_max; ++p) csv << ",bic_" << p;
    csv << '\n';
    for (const OrderIdRecord& r : report.records) {
        csv << r.rep << ',' << r.seed << ',' << r.p_opt;
        for (double b : r.bic) csv << ',' << b;
        csv << '\n';
    }
    write_text_file(out_path(config, "order_id_records.csv"), csv.str());

    json j = report_header(config, report.wall_seconds);
    j["true_order"] = report.true_order;
    j["fraction_correct"] = report.fraction_correct;
    write_json_file(out_path(config, "order_id_report.json"), j);
}

void write_joint_id_report(const ExperimentConfig& config, const JointIdReport& report) {
    std::ostringstream csv;
    csv << std::setprecision(17) << "rep,seed,p_opt,T_opt";
    for (const auto& [p, t] : report.candidates) csv << ",bic_p" << p << "_T" << t;
    csv << '\n';
    for (const JointIdRecord& r : report.records) {
        csv << r.rep << ',' << r.seed << ',' << r.p_opt << ',' << r.t_opt;
        for (double b : r.bic) csv << ',' << b;
        csv << '\n';
    }
    write_text_file(out_path(config, "joint_id_records.csv"), csv.str());

    json j = report_header(config, report.wall_seconds);
    j["true_order"] = report.true_order;
    j["true_period"] = report.true_period;
    j["fraction_joint"] = report.fraction_joint;
    j["fraction_period"] = report.fraction_period;
    write_json_file(out_path(config, "joint_id_report.json"), j);
}

void write_power_report(const ExperimentConfig& config, const PowerReport& report) {
    std::ostringstream csv;
    csv << std::setprecision(17) << "variance,rep,d_observed,p_value\n";
    for (const PowerRecord& r : report.records)
        csv << r.variance << ',' << r.rep << ',' << r.d_observed << ',' << r.p_value << '\n';
    write_text_file(out_path(config, "power_records.csv"), csv.str());

    std::ostringstream curve;
    curve << std::setprecision(17) << "variance,power\n";
    for (std::size_t i = 0; i < report.variances.size(); ++i)
        curve << report.variances[i] << ',' << report.power[i] << '\n';
    write_text_file(out_path(config, "power_curve.csv"), curve.str());

    json j = report_header(config, report.wall_seconds);
    j["alpha"] = report.alpha;
    j["variances"] = report.variances;
    j["power"] = report.power;
    write_json_file(out_path(config, "power_report.json"), j);
}

void write_single_fit_report(const ExperimentConfig& config, const SingleFitReport& report) {
    std::ostringstream bic;
    write_bic_table_csv(bic, report.bic_table);
    write_text_file(out_path(config, "bic_table.csv"), bic.str());
    write_text_file(out_path(config, "estimation.json"),
                    estimation_report_json(report.estimation) + "\n");
    write_text_file(out_path(config, "gof.json"), gof_report_json(report.gof) + "\n");

    json j = report_header(config, report.wall_seconds);
    j["p_opt"] = report.bic_table.p_opt;
    j["warnings"] = report.warnings;
    j["dropped_tail"] = report.dropped_tail;
    j["gof_p_value"] = report.gof.p_value;
    json corr = json::array();
    const auto& m = report.independence.lag1_cross_correlation;
    for (int k = 0; k < m.rows(); ++k) {
        json row = json::array();
        for (int l = 0; l < m.cols(); ++l) row.push_back(m(k, l));
        corr.push_back(row);
    }
    j["independence"] = {{"lag1_cross_correlation", corr},
                         {"threshold", report.independence.threshold},
                         {"n_flagged", report.independence.flagged.size()}};
    write_json_file(out_path(config, "single_fit_report.json"), j);
}

}  // namespace parnoise
