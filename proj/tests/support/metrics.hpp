#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace metrics {

// Elementwise covariance error on the correlation scale:
// |S_kl - G_kl| / sqrt(G_kk G_ll). Equals plain relative error on the
// diagonal and stays well-defined at exactly-zero off-diagonal entries.
inline double cov_relative_error(const Eigen::MatrixXd& sample, const Eigen::MatrixXd& expected) {
    double worst = 0.0;
    for (int k = 0; k < expected.rows(); ++k)
        for (int l = 0; l < expected.cols(); ++l) {
            const double scale = std::sqrt(expected(k, k) * expected(l, l));
            worst = std::max(worst, std::abs(sample(k, l) - expected(k, l)) / scale);
        }
    return worst;
}

}  // namespace metrics
