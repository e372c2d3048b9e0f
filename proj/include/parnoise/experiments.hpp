#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parnoise/config.hpp"
#include "parnoise/estimation.hpp"
#include "parnoise/identification.hpp"
#include "parnoise/validation.hpp"

namespace parnoise {

// Monte Carlo reproduction of the order-identification experiment: M
// trajectories, BIC order selection on each, fraction with p_opt = p.
struct OrderIdRecord {
    long rep = 0;
    std::uint64_t seed = 0;
    int p_opt = 0;
    std::vector<double> bic;  // per candidate order 1..p_max
};

struct OrderIdReport {
    std::vector<OrderIdRecord> records;
    double fraction_correct = 0.0;
    int true_order = 0;
    int p_max = 0;
    double wall_seconds = 0.0;
};

OrderIdReport run_order_id(const ExperimentConfig& config);

// Joint (p, T) identification over all candidate pairs with p* < T*.
struct JointIdRecord {
    long rep = 0;
    std::uint64_t seed = 0;
    int p_opt = 0;
    int t_opt = 0;
    std::vector<double> bic;  // per candidate, ordered as in `candidates`
};

struct JointIdReport {
    std::vector<std::pair<int, int>> candidates;
    std::vector<JointIdRecord> records;
    double fraction_joint = 0.0;
    double fraction_period = 0.0;
    int true_order = 0;
    int true_period = 0;
    double wall_seconds = 0.0;
};

JointIdReport run_joint_id(const ExperimentConfig& config);

// Power of the goodness-of-fit test as a function of the true additive
// noise variance, with the H0 model held fixed.
struct PowerRecord {
    double variance = 0.0;
    long rep = 0;
    double d_observed = 0.0;
    double p_value = 0.0;
};

struct PowerReport {
    std::vector<double> variances;
    std::vector<double> power;  // rejection fraction at alpha, per variance
    std::vector<PowerRecord> records;
    double alpha = 0.05;
    double wall_seconds = 0.0;
};

PowerReport run_power(const ExperimentConfig& config);

// One series end to end: order selection, estimation at the optimum,
// goodness-of-fit test under the fitted H0.
struct SingleFitReport {
    BicTable bic_table;
    EstimationResult estimation;
    GofTestResult gof;
    IndependenceReport independence;
    int dropped_tail = 0;
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;
};

SingleFitReport run_single_fit(const ExperimentConfig& config);

// Writes records CSV + report JSON (config echo, aggregates, wall time)
// into config.out_dir.
void write_order_id_report(const ExperimentConfig& config, const OrderIdReport& report);
void write_joint_id_report(const ExperimentConfig& config, const JointIdReport& report);
void write_power_report(const ExperimentConfig& config, const PowerReport& report);
void write_single_fit_report(const ExperimentConfig& config, const SingleFitReport& report);

}  // namespace parnoise
