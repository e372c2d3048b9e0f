#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "parnoise/model.hpp"

namespace parnoise {

// Empirical periodic autocovariance
//   gamma_hat^Y(w, k) = (1/N) sum_{n=l}^{r} y_{nT+w} y_{nT+w-k}
// with the summation bounds of the defining formula; valid for any integer
// phase w and any lag k (negative lags resolve through the exact identity
// gamma_hat(w, -k) = gamma_hat(w+k, k)).
double empirical_pacvf(std::span<const double> y, int period, int w, int k);

// Cached table of gamma_hat^Y(w, k) for w = 1..T, k = 0..k_max.
class PacvfTable {
public:
    PacvfTable(std::span<const double> y, int period, int k_max);
    // Injected values (population oracles in tests).
    PacvfTable(Eigen::MatrixXd values, int period);

    double at(int w, int k) const;
    int period() const { return period_; }
    int k_max() const { return static_cast<int>(values_.cols()) - 1; }

private:
    Eigen::MatrixXd values_;  // T x (k_max+1)
    int period_;
};

// Low-order Yule-Walker system for phase v: Gamma_hat (p x p) with
// (i,j) entry gamma_hat(v-i, j-i), and the right-hand side
// [gamma_hat(v,1), ..., gamma_hat(v,p)].
std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_low_order_yw(const PacvfTable& pacvf, int v,
                                                               int p);

// High-order system: s x p matrix with (i,j) entry gamma_hat(v-j, p+i-j)
// and right-hand side [gamma_hat(v,p+1), ..., gamma_hat(v,p+s)].
std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_high_order_yw(const PacvfTable& pacvf, int v,
                                                                int p, int s);

// Upper bound for the admissible additive-noise variance: the smallest
// eigenvalue over phases of the (p+1)-dimensional autocovariance matrices
// G_hat_v, floored at zero.
double zeta_bound(const PacvfTable& pacvf, int p);

// High-order Yule-Walker cost J_total(sigma_z2_star); +infinity where the
// shifted low-order matrix is singular.
double eiv_cost(const PacvfTable& pacvf, int p, int s, double sigma_z2_star);

struct EstimationResult {
    Eigen::MatrixXd phi_hat;  // T x p
    double sigma_z2_hat = 0.0;
    Eigen::VectorXd sigma_xi2_per_phase;
    double sigma_xi2_hat = 0.0;
    double zeta = 0.0;
    std::vector<std::pair<double, double>> cost_curve;  // (sigma2_star, J_total)
    std::vector<double> condition_numbers;              // per phase at sigma_z2_hat
    std::vector<int> ill_posed_phases;                  // condition > 1e10
    bool degenerate_bound = false;                      // zeta <= 0, fell back to sigma_z2 = 0
    bool negative_xi_variance = false;
    int period = 0;
    int order = 0;
};

// Modified errors-in-variables estimator: builds the Yule-Walker systems,
// minimizes J_total over [0, zeta] (dense grid plus golden-section
// refinement), then recovers coefficients and variances.
EstimationResult estimate_eiv(std::span<const double> y, int p, int T, int s = 0);
EstimationResult estimate_eiv(const Trajectory& traj, int p, int s = 0);

}  // namespace parnoise
