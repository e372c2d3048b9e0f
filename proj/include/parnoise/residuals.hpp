#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "parnoise/model.hpp"

namespace parnoise {

// T-dimensional residual blocks R_n = [R_{nT+1}, ..., R_{(n+1)T}],
// n = 1..N-1 (the first block is always dropped), one block per row.
struct ResidualBlocks {
    Eigen::MatrixXd blocks;  // (N-1) x T
    int period = 0;
    int dropped_tail = 0;  // samples discarded from a trailing partial block

    long n_blocks() const { return blocks.rows(); }
};

// T x T residual-block covariance with validated symmetry and positive
// semidefiniteness.
struct CovMatrixT {
    Eigen::MatrixXd gamma;

    explicit CovMatrixT(Eigen::MatrixXd g);
    int dim() const { return static_cast<int>(gamma.rows()); }
};

// Residuals R_t = Y_t - phi_1(t) Y_{t-1} - ... - phi_p(t) Y_{t-p} for
// t = p+1..NT; the first p entries are NaN placeholders (they are never
// blocked: blocking starts at t = T+1 > p).
std::vector<double> compute_residuals(std::span<const double> y, const Eigen::MatrixXd& phi);

// Consecutive non-overlapping T-blocks starting at t = T+1; a trailing
// partial block is dropped and counted.
ResidualBlocks block_residuals(std::span<const double> residuals, int T);

// Blocks of an explicit range: `count` blocks of length T starting at
// 0-based residual index `start`. Used by joint order/period selection,
// where the common range does not start at t = T+1.
ResidualBlocks block_range(std::span<const double> residuals, long start, long count, int T);

// Gamma^R from the three-case closed form.
CovMatrixT residual_cov_direct(const ParSpec& spec, double sigma_z2);

// The (p+T) x T loading matrix with a_{kl} = -phi_{k+l-T-1}(l).
Eigen::MatrixXd build_loading_matrix(const ParSpec& spec);

// Gamma^R via the matrix representation sigma_xi^2 I + sigma_Z^2 A'A.
CovMatrixT residual_cov_matrixform(const ParSpec& spec, double sigma_z2);

// Sample covariance across block rows under the zero-mean convention
// (divisor = block count).
CovMatrixT sample_block_cov(const ResidualBlocks& blocks);

// Coefficient matrix for blocks whose first position sits `offset` steps
// past phase 1: row v of the result is row ((v + offset) mod T) of phi.
Eigen::MatrixXd rotate_phases(const Eigen::MatrixXd& phi, int offset);

}  // namespace parnoise
