#include "parnoise/residuals.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "parnoise/errors.hpp"

namespace parnoise {

CovMatrixT::CovMatrixT(Eigen::MatrixXd g) : gamma(std::move(g)) {
    if (gamma.rows() != gamma.cols()) throw std::invalid_argument("CovMatrixT: not square");
    const double scale = std::max(1.0, gamma.cwiseAbs().maxCoeff());
    if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NumericError("CovMatrixT: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gamma, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(gamma.trace(), 1.0))
        throw NumericError("CovMatrixT: matrix not positive semidefinite");
}

std::vector<double> compute_residuals(std::span<const double> y, const Eigen::MatrixXd& phi) {
    const int T = static_cast<int>(phi.rows());
    const int p = static_cast<int>(phi.cols());
    if (T < 1 || p < 1) throw std::invalid_argument("compute_residuals: empty coefficient matrix");
    const long n = static_cast<long>(y.size());
    if (n < p + 1) throw std::invalid_argument("compute_residuals: trajectory shorter than p+1");

    std::vector<double> res(n, std::numeric_limits<double>::quiet_NaN());
    for (long t = p; t < n; ++t) {  // 0-based index t corresponds to time t+1
        const int v = static_cast<int>(t % T);
        double r = y[t];
        for (int i = 1; i <= p; ++i) r -= phi(v, i - 1) * y[t - i];
        res[t] = r;
    }
    return res;
}

namespace {

ResidualBlocks make_blocks(std::span<const double> residuals, long start, long count, int T,
                           int dropped) {
    ResidualBlocks out;
    out.period = T;
    out.dropped_tail = dropped;
    out.blocks.resize(count, T);
    for (long b = 0; b < count; ++b)
        for (int k = 0; k < T; ++k) {
            const double r = residuals[start + b * T + k];
            if (!std::isfinite(r)) throw NumericError("residual blocks contain non-finite entries");
            out.blocks(b, k) = r;
        }
    return out;
}

}  // namespace

ResidualBlocks block_residuals(std::span<const double> residuals, int T) {
    if (T < 1) throw std::invalid_argument("block_residuals: period must be positive");
    const long n = static_cast<long>(residuals.size());
    if (n < 2 * T) throw std::invalid_argument("block_residuals: need at least two periods");
    const long usable = n - T;
    const long count = usable / T;
    const int dropped = static_cast<int>(usable - count * T);
    return make_blocks(residuals, T, count, T, dropped);
}

ResidualBlocks block_range(std::span<const double> residuals, long start, long count, int T) {
    if (start < 0 || count < 1 || T < 1) throw std::invalid_argument("block_range: bad arguments");
    if (start + count * T > static_cast<long>(residuals.size()))
        throw std::invalid_argument("block_range: range exceeds residual sequence");
    return make_blocks(residuals, start, count, T, 0);
}

CovMatrixT residual_cov_direct(const ParSpec& spec, double sigma_z2) {
    if (sigma_z2 < 0.0) throw std::invalid_argument("residual_cov_direct: sigma_z2 must be >= 0");
    const int T = spec.period();
    const int p = spec.order();
    Eigen::MatrixXd gamma(T, T);
    for (int k = 1; k <= T; ++k) {
        for (int l = 1; l <= T; ++l) {
            if (k == l) {
                double s = 0.0;
                for (int j = 0; j <= p; ++j) s += spec.phi_ext(k, j) * spec.phi_ext(k, j);
                gamma(k - 1, l - 1) = spec.sigma_xi2() + sigma_z2 * s;
            } else if (k < l) {
                double s = 0.0;
                for (int j = 0; j <= p + k - l; ++j) s += spec.phi_ext(k, j) * spec.phi_ext(l, j + l - k);
                gamma(k - 1, l - 1) = sigma_z2 * s;
            } else {
                double s = 0.0;
                for (int j = 0; j <= p + l - k; ++j) s += spec.phi_ext(l, j) * spec.phi_ext(k, j + k - l);
                gamma(k - 1, l - 1) = sigma_z2 * s;
            }
        }
    }
    return CovMatrixT(std::move(gamma));
}

Eigen::MatrixXd build_loading_matrix(const ParSpec& spec) {
    const int T = spec.period();
    const int p = spec.order();
    Eigen::MatrixXd a(p + T, T);
    for (int k = 1; k <= p + T; ++k)
        for (int l = 1; l <= T; ++l) a(k - 1, l - 1) = -spec.phi_ext(l, k + l - T - 1);
    return a;
}

CovMatrixT residual_cov_matrixform(const ParSpec& spec, double sigma_z2) {
    if (sigma_z2 < 0.0) throw std::invalid_argument("residual_cov_matrixform: sigma_z2 must be >= 0");
    const Eigen::MatrixXd a = build_loading_matrix(spec);
    Eigen::MatrixXd gamma = sigma_z2 * (a.transpose() * a);
    gamma.diagonal().array() += spec.sigma_xi2();
    return CovMatrixT(std::move(gamma));
}

CovMatrixT sample_block_cov(const ResidualBlocks& blocks) {
    const long n = blocks.n_blocks();
    if (n < 2) throw std::invalid_argument("sample_block_cov: need at least two blocks");
    Eigen::MatrixXd cov = (blocks.blocks.transpose() * blocks.blocks) / static_cast<double>(n);
    cov = 0.5 * (cov + cov.transpose().eval());  // exact symmetry against fp drift
    return CovMatrixT(std::move(cov));
}

Eigen::MatrixXd rotate_phases(const Eigen::MatrixXd& phi, int offset) {
    const int T = static_cast<int>(phi.rows());
    int shift = offset % T;
    if (shift < 0) shift += T;
    Eigen::MatrixXd out(T, phi.cols());
    for (int v = 0; v < T; ++v) out.row(v) = phi.row((v + shift) % T);
    return out;
}

}  // namespace parnoise
