#include "parnoise/estimation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "parnoise/errors.hpp"

namespace parnoise {

namespace {

constexpr double kInfCost = std::numeric_limits<double>::infinity();

long ceil_div(long a, long b) {  // b > 0
    return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

long floor_div(long a, long b) {  // b > 0
    return a >= 0 ? a / b : -((-a + b - 1) / b);
}

}  // namespace

double empirical_pacvf(std::span<const double> y, int period, int w, int k) {
    if (period < 1) throw std::invalid_argument("empirical_pacvf: period must be positive");
    const long nt = static_cast<long>(y.size());
    const long T = period;
    const long lo = std::max(ceil_div(1 - w, T), ceil_div(1 - (w - k), T));
    const long hi = std::min(floor_div(nt - w, T), floor_div(nt - (w - k), T));
    if (lo > hi) return 0.0;  // empty summation range
    double sum = 0.0;
    for (long n = lo; n <= hi; ++n) sum += y[n * T + w - 1] * y[n * T + w - k - 1];
    return sum / (static_cast<double>(nt) / static_cast<double>(T));
}

PacvfTable::PacvfTable(std::span<const double> y, int period, int k_max) : period_(period) {
    if (k_max < 0) throw std::invalid_argument("PacvfTable: k_max must be >= 0");
    values_.resize(period, k_max + 1);
    for (int w = 1; w <= period; ++w)
        for (int k = 0; k <= k_max; ++k) values_(w - 1, k) = empirical_pacvf(y, period, w, k);
}

PacvfTable::PacvfTable(Eigen::MatrixXd values, int period)
    : values_(std::move(values)), period_(period) {
    if (values_.rows() != period) throw std::invalid_argument("PacvfTable: row count must be T");
}

double PacvfTable::at(int w, int k) const {
    if (k < 0) return at(w - k, -k);  // gamma(w, -k) = gamma(w + |k|, |k|)
    if (k > k_max()) throw std::invalid_argument("PacvfTable: insufficient lags cached");
    int ww = (w - 1) % period_;
    if (ww < 0) ww += period_;
    return values_(ww, k);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_low_order_yw(const PacvfTable& pacvf, int v,
                                                               int p) {
    Eigen::MatrixXd gam(p, p);
    Eigen::VectorXd rhs(p);
    for (int i = 1; i <= p; ++i) {
        for (int j = 1; j <= p; ++j) gam(i - 1, j - 1) = pacvf.at(v - i, j - i);
        rhs(i - 1) = pacvf.at(v, i);
    }
    return {std::move(gam), std::move(rhs)};
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_high_order_yw(const PacvfTable& pacvf, int v,
                                                                int p, int s) {
    if (s < p) throw std::invalid_argument("build_high_order_yw: s must be >= p");
    Eigen::MatrixXd gam(s, p);
    Eigen::VectorXd rhs(s);
    for (int i = 1; i <= s; ++i) {
        for (int j = 1; j <= p; ++j) gam(i - 1, j - 1) = pacvf.at(v - j, p + i - j);
        rhs(i - 1) = pacvf.at(v, p + i);
    }
    return {std::move(gam), std::move(rhs)};
}

double zeta_bound(const PacvfTable& pacvf, int p) {
    double zeta = std::numeric_limits<double>::infinity();
    for (int v = 1; v <= pacvf.period(); ++v) {
        Eigen::MatrixXd g(p + 1, p + 1);
        g(0, 0) = pacvf.at(v, 0);
        for (int j = 1; j <= p; ++j) {
            g(0, j) = pacvf.at(v, j);
            g(j, 0) = g(0, j);
        }
        for (int i = 1; i <= p; ++i)
            for (int j = 1; j <= p; ++j) g(i, j) = pacvf.at(v - i, j - i);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
        zeta = std::min(zeta, eig.eigenvalues().minCoeff());
    }
    return std::max(zeta, 0.0);
}

double eiv_cost(const PacvfTable& pacvf, int p, int s, double sigma_z2_star) {
    double total = 0.0;
    for (int v = 1; v <= pacvf.period(); ++v) {
        auto [gam, rhs] = build_low_order_yw(pacvf, v, p);
        gam.diagonal().array() -= sigma_z2_star;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(gam);
        if (!lu.isInvertible()) return kInfCost;
        const Eigen::VectorXd phi_star = lu.solve(rhs);
        auto [gam_high, rhs_high] = build_high_order_yw(pacvf, v, p, s);
        total += (gam_high * phi_star - rhs_high).squaredNorm();
    }
    return total;
}

namespace {

struct Minimizer {
    double sigma = 0.0;
    double cost = kInfCost;

    void consider(double s, double j) {
        if (j < cost) {
            sigma = s;
            cost = j;
        }
    }
};

}  // namespace

EstimationResult estimate_eiv(std::span<const double> y, int p, int T, int s) {
    if (s <= 0) s = p;
    if (s < p) throw std::invalid_argument("estimate_eiv: s must be >= p");
    if (p < 1 || T < 2 || p >= T) throw std::invalid_argument("estimate_eiv: need 1 <= p < T");
    if (static_cast<long>(y.size()) < 10L * T * p)
        throw std::invalid_argument("estimate_eiv: sample too short (need NT >= 10*T*p)");

    const PacvfTable pacvf(y, T, p + s);

    EstimationResult result;
    result.period = T;
    result.order = p;
    result.zeta = zeta_bound(pacvf, p);

    Minimizer best;
    if (result.zeta <= 0.0) {
        result.degenerate_bound = true;
        best.sigma = 0.0;
        best.cost = eiv_cost(pacvf, p, s, 0.0);
        result.cost_curve.emplace_back(0.0, best.cost);
    } else {
        // Dense grid first: J_total can be multimodal, so global gridding
        // precedes the local golden-section refinement.
        constexpr int kGridPoints = 200;
        std::vector<double> grid_cost(kGridPoints);
        int best_idx = 0;
        result.cost_curve.reserve(kGridPoints);
        for (int i = 0; i < kGridPoints; ++i) {
            const double sigma = result.zeta * i / (kGridPoints - 1.0);
            grid_cost[i] = eiv_cost(pacvf, p, s, sigma);
            result.cost_curve.emplace_back(sigma, grid_cost[i]);
            best.consider(sigma, grid_cost[i]);
            if (grid_cost[i] < grid_cost[best_idx]) best_idx = i;
        }
        const double step = result.zeta / (kGridPoints - 1.0);
        double a = std::max(0.0, (best_idx - 1) * step);
        double b = std::min(result.zeta, (best_idx + 1) * step);
        constexpr double kRatio = 0.61803398874989484820;
        double x1 = b - kRatio * (b - a);
        double x2 = a + kRatio * (b - a);
        double f1 = eiv_cost(pacvf, p, s, x1);
        double f2 = eiv_cost(pacvf, p, s, x2);
        best.consider(x1, f1);
        best.consider(x2, f2);
        for (int iter = 0; iter < 90; ++iter) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - kRatio * (b - a);
                f1 = eiv_cost(pacvf, p, s, x1);
                best.consider(x1, f1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + kRatio * (b - a);
                f2 = eiv_cost(pacvf, p, s, x2);
                best.consider(x2, f2);
            }
        }
    }
    result.sigma_z2_hat = best.sigma;

    result.phi_hat.resize(T, p);
    result.sigma_xi2_per_phase.resize(T);
    result.condition_numbers.resize(T);
    for (int v = 1; v <= T; ++v) {
        auto [gam, rhs] = build_low_order_yw(pacvf, v, p);
        gam.diagonal().array() -= result.sigma_z2_hat;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(gam, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double smin = svd.singularValues().minCoeff();
        const double smax = svd.singularValues().maxCoeff();
        const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
        result.condition_numbers[v - 1] = cond;
        Eigen::VectorXd phi_v;
        if (!std::isfinite(cond)) {
            phi_v = Eigen::VectorXd::Zero(p);  // rank-deficient phase, degenerate data
            result.ill_posed_phases.push_back(v);
        } else {
            if (cond > 1e10) result.ill_posed_phases.push_back(v);
            phi_v = svd.solve(rhs);
        }
        result.phi_hat.row(v - 1) = phi_v.transpose();
        result.sigma_xi2_per_phase(v - 1) =
            pacvf.at(v, 0) - phi_v.dot(rhs) - result.sigma_z2_hat;
        if (result.sigma_xi2_per_phase(v - 1) < 0.0) result.negative_xi_variance = true;
    }
    result.sigma_xi2_hat = result.sigma_xi2_per_phase.mean();
    return result;
}

EstimationResult estimate_eiv(const Trajectory& traj, int p, int s) {
    return estimate_eiv(traj.values, p, traj.period, s);
}

}  // namespace parnoise
