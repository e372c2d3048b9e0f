// Command-line harness: simulation, estimation, identification, validation
// and the Monte Carlo experiment runners, driven by a JSON config.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "parnoise/config.hpp"
#include "parnoise/errors.hpp"
#include "parnoise/experiments.hpp"
#include "parnoise/io.hpp"
#include "parnoise/parallel.hpp"
#include "parnoise/rng.hpp"
#include "parnoise/version.hpp"

namespace {

using namespace parnoise;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::optional<std::string> density_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file")->required();
    cmd->add_option("--seed", flags.seed, "master seed (overrides config)");
    cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
    cmd->add_option("--threads", flags.threads, "worker threads (overrides config)");
    cmd->add_option("--density-path", flags.density_path,
                    "block density path: closed|inversion (overrides config)");
}

ExperimentConfig load_with_overrides(const CommonFlags& flags) {
    ExperimentConfig config = load_config_file(flags.config_path);
    if (flags.seed) {
        config.seed = *flags.seed;
        config.has_seed = true;
    }
    if (flags.out_dir) config.out_dir = *flags.out_dir;
    if (flags.threads) config.threads = *flags.threads;
    if (flags.density_path) {
        if (*flags.density_path == "closed")
            config.density_path = DensityPath::ClosedForm;
        else if (*flags.density_path == "inversion")
            config.density_path = DensityPath::CfInversion;
        else
            throw ConfigError("--density-path must be closed or inversion");
    }
    return config;
}

Trajectory load_series(const ExperimentConfig& config, int* period_out) {
    if (!config.data_file.empty()) {
        const DataFile data = read_data_csv(config.data_file);
        const int period = config.known_period > 0 ? config.known_period : data.period.value_or(0);
        if (period < 2) throw ConfigError("period unknown: set known_period or a T= header");
        Trajectory traj;
        traj.values = data.values;
        traj.period = period;
        *period_out = period;
        return traj;
    }
    if (!config.par || !config.noise || config.nt <= 0)
        throw ConfigError("need data_file, or par + noise + nt to simulate input data");
    if (!config.has_seed) throw ConfigError("config: 'seed' is required");
    SimulateOptions opts;
    opts.burn_in_periods = config.burn_in;
    *period_out = config.par->period();
    return simulate_length(*config.par, *config.noise, config.nt, substream_seed(config.seed, 0),
                           opts);
}

std::string join_out(const ExperimentConfig& config, const std::string& name) {
    std::filesystem::create_directories(config.out_dir);
    return (std::filesystem::path(config.out_dir) / name).string();
}

int cmd_simulate(const ExperimentConfig& config) {
    if (!config.par || !config.noise || config.nt <= 0)
        throw ConfigError("simulate: config requires par, noise and nt");
    if (!config.has_seed) throw ConfigError("config: 'seed' is required");
    SimulateOptions opts;
    opts.burn_in_periods = config.burn_in;
    opts.keep_components = config.keep_components;
    const Trajectory traj =
        simulate_length(*config.par, *config.noise, config.nt, config.seed, opts);
    if (traj.stability_warning)
        std::cerr << "warning: spectral radius " << traj.stability
                  << " >= 1, simulated model may diverge\n";
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_text_file(join_out(config, "trajectory.csv"), csv.str());
    std::cout << "wrote " << join_out(config, "trajectory.csv") << " (" << traj.values.size()
              << " samples, stability radius " << traj.stability << ")\n";
    return 0;
}

int cmd_estimate(const ExperimentConfig& config) {
    int period = 0;
    const Trajectory traj = load_series(config, &period);
    int p = config.p_fit;
    if (p <= 0 && config.par) p = config.par->order();
    if (p <= 0) throw ConfigError("estimate: set p_fit (the order to fit)");
    const EstimationResult est =
        estimate_eiv(traj.values, p, period, config.s_high_order);
    write_text_file(join_out(config, "estimation.json"), estimation_report_json(est) + "\n");
    std::cout << "sigma_z2_hat=" << est.sigma_z2_hat << " sigma_xi2_hat=" << est.sigma_xi2_hat
              << " zeta=" << est.zeta << (est.degenerate_bound ? " (degenerate bound)" : "")
              << "\n";
    std::cout << "wrote " << join_out(config, "estimation.json") << "\n";
    return 0;
}

int cmd_identify(const ExperimentConfig& config) {
    if (!config.noise) throw ConfigError("identify: config requires 'noise' (family structure)");
    int period = 0;
    const Trajectory traj = load_series(config, &period);
    const int p_max = config.p_max > 0 ? config.p_max : period - 1;
    const BicTable table =
        select_order_known_T(traj, period, p_max, *config.noise, config.density_path);
    std::ostringstream csv;
    write_bic_table_csv(csv, table);
    write_text_file(join_out(config, "bic_table.csv"), csv.str());
    std::cout << "selected order p_opt=" << table.p_opt << " (T=" << period << ")\n";
    std::cout << "wrote " << join_out(config, "bic_table.csv") << "\n";
    return 0;
}

int cmd_identify_joint(const ExperimentConfig& config) {
    if (!config.noise) throw ConfigError("identify-joint: config requires 'noise'");
    int period = 0;
    const Trajectory traj = load_series(config, &period);
    const int p_max = config.p_max > 0 ? config.p_max : config.t_max - 1;
    const BicTable table =
        select_joint(traj, p_max, config.t_max, *config.noise, config.density_path);
    std::ostringstream csv;
    write_bic_table_csv(csv, table);
    write_text_file(join_out(config, "bic_table.csv"), csv.str());
    std::cout << "selected p_opt=" << table.p_opt << " T_opt=" << table.t_opt << "\n";
    std::cout << "wrote " << join_out(config, "bic_table.csv") << "\n";
    return 0;
}

int cmd_validate(const ExperimentConfig& config) {
    if (!config.par || !config.noise)
        throw ConfigError("validate: config requires 'par' and 'noise' (the H0 model)");
    if (!config.has_seed) throw ConfigError("config: 'seed' is required");
    int period = 0;
    const Trajectory traj = load_series(config, &period);
    if (period != config.par->period())
        throw ConfigError("validate: data period does not match the H0 model");
    const TGrid grid = make_tgrid(config.tgrid, period);
    const GofTestResult gof =
        gof_test(traj, *config.par, *config.noise, config.m_boot, grid,
                 substream_seed(config.seed, 1),
                 config.threads > 0 ? config.threads : default_thread_count());
    write_text_file(join_out(config, "gof.json"), gof_report_json(gof) + "\n");
    std::cout << "D=" << gof.d_observed << " p-value=" << gof.p_value << " (M=" << gof.m_boot
              << ")\n";
    std::cout << "wrote " << join_out(config, "gof.json") << "\n";
    return 0;
}

int cmd_experiment(const ExperimentConfig& config) {
    if (config.kind == "order-id") {
        const OrderIdReport report = run_order_id(config);
        write_order_id_report(config, report);
        std::cout << "fraction_correct=" << report.fraction_correct << " ("
                  << report.records.size() << " replications, " << report.wall_seconds << "s)\n";
    } else if (config.kind == "joint-id") {
        const JointIdReport report = run_joint_id(config);
        write_joint_id_report(config, report);
        std::cout << "fraction_joint=" << report.fraction_joint
                  << " fraction_period=" << report.fraction_period << " ("
                  << report.records.size() << " replications, " << report.wall_seconds << "s)\n";
    } else if (config.kind == "power") {
        const PowerReport report = run_power(config);
        write_power_report(config, report);
        for (std::size_t i = 0; i < report.variances.size(); ++i)
            std::cout << "variance=" << report.variances[i] << " power=" << report.power[i]
                      << "\n";
        std::cout << "(" << report.wall_seconds << "s)\n";
    } else if (config.kind == "single-fit") {
        const SingleFitReport report = run_single_fit(config);
        write_single_fit_report(config, report);
        std::cout << "p_opt=" << report.bic_table.p_opt
                  << " sigma_z2_hat=" << report.estimation.sigma_z2_hat
                  << " gof_p_value=" << report.gof.p_value << "\n";
        for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
    } else if (config.kind == "simulate") {
        return cmd_simulate(config);
    } else {
        throw ConfigError("experiment: unknown kind '" + config.kind +
                          "' (order-id|joint-id|power|single-fit|simulate)");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Identification and validation of periodic autoregressive models observed "
                 "under additive noise"};
    app.set_version_flag("--version", std::string(parnoise::kVersion));
    app.require_subcommand(1);

    CommonFlags flags;
    int which = 0;
    auto* sim = app.add_subcommand("simulate", "simulate a noise-corrupted PAR trajectory");
    auto* est = app.add_subcommand("estimate", "errors-in-variables estimation on one series");
    auto* ident = app.add_subcommand("identify", "BIC order selection with known period");
    auto* joint = app.add_subcommand("identify-joint", "joint BIC order/period selection");
    auto* val = app.add_subcommand("validate", "CF-distance goodness-of-fit test");
    auto* exp = app.add_subcommand("experiment", "run a Monte Carlo experiment config");
    add_common(sim, flags);
    add_common(est, flags);
    add_common(ident, flags);
    add_common(joint, flags);
    add_common(val, flags);
    add_common(exp, flags);
    sim->callback([&] { which = 1; });
    est->callback([&] { which = 2; });
    ident->callback([&] { which = 3; });
    joint->callback([&] { which = 4; });
    val->callback([&] { which = 5; });
    exp->callback([&] { which = 6; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const ExperimentConfig config = load_with_overrides(flags);
        switch (which) {
            case 1: return cmd_simulate(config);
            case 2: return cmd_estimate(config);
            case 3: return cmd_identify(config);
            case 4: return cmd_identify_joint(config);
            case 5: return cmd_validate(config);
            case 6: return cmd_experiment(config);
        }
    } catch (const parnoise::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
