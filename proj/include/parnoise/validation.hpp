#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "parnoise/model.hpp"
#include "parnoise/residuals.hpp"

namespace parnoise {

// Lattice of CF arguments: [-bound, bound] with spacing `step` in every
// dimension. The supremum in the test statistic is taken over this lattice.
struct TGrid {
    int dim = 2;
    double bound = 10.0;
    double step = 0.1;

    std::vector<double> points() const;
    bool symmetric() const;
};

// D = max over the lattice of |empirical CF - theoretical CF| of the
// residual blocks.
double cf_distance(const ResidualBlocks& blocks, const ParSpec& spec, const NoiseSpec& noise,
                   const TGrid& grid);

struct GofTestResult {
    double d_observed = 0.0;
    double p_value = 0.0;
    int m_boot = 0;
    std::vector<double> d_samples;
    std::uint64_t seed = 0;
    TGrid grid;
    int n_excluded = 0;  // non-finite bootstrap statistics, dropped
};

// Parametric-bootstrap goodness-of-fit test: computes D on the data's
// residual blocks under the H0 parameters, simulates m_boot trajectories
// from H0 (same length as the data, per-replication substreams), and
// returns the exceedance fraction #{D_i >= D}/M as the p-value.
GofTestResult gof_test(const Trajectory& traj, const ParSpec& h0_spec, const NoiseSpec& h0_noise,
                       int m_boot, const TGrid& grid, std::uint64_t seed, int threads = 1);

// Lag-1 block cross-correlation sanity check: entries exceeding 4/sqrt(n)
// in absolute value are flagged.
struct IndependenceReport {
    Eigen::MatrixXd lag1_cross_correlation;
    double threshold = 0.0;
    std::vector<std::pair<int, int>> flagged;  // 1-based (k, l)
};

IndependenceReport block_independence_check(const ResidualBlocks& blocks);

}  // namespace parnoise
