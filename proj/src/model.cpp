#include "parnoise/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "parnoise/errors.hpp"
#include "parnoise/rng.hpp"

namespace parnoise {

namespace {

// Phase of a 1-based time index t under period T, valid for any integer t.
int phase_of(long t, int T) {
    long m = (t - 1) % T;
    if (m < 0) m += T;
    return static_cast<int>(m) + 1;
}

}  // namespace

ParSpec::ParSpec(int period, int order, Eigen::MatrixXd phi, double sigma_xi2)
    : phi_(std::move(phi)), sigma_xi2_(sigma_xi2) {
    if (period < 1) throw std::invalid_argument("ParSpec: period must be positive");
    if (order < 1) throw std::invalid_argument("ParSpec: order must be positive");
    if (order >= period)
        throw std::invalid_argument("ParSpec: order p must satisfy p < T (p >= T not supported)");
    if (phi_.rows() != period || phi_.cols() != order)
        throw std::invalid_argument("ParSpec: phi must be T x p");
    if (!phi_.allFinite()) throw std::invalid_argument("ParSpec: phi has non-finite entries");
    if (!(sigma_xi2 > 0.0)) throw std::invalid_argument("ParSpec: sigma_xi2 must be positive");
}

double ParSpec::phi_ext(int v, int j) const {
    if (j == 0) return -1.0;
    if (j < 0 || j > order()) return 0.0;
    return phi_(phase_of(v, period()) - 1, j - 1);
}

NoiseSpec::NoiseSpec(std::vector<double> weights, std::vector<double> variances)
    : weights_(std::move(weights)), variances_(std::move(variances)) {
    if (weights_.empty() || weights_.size() != variances_.size())
        throw std::invalid_argument("NoiseSpec: weights/variances size mismatch");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw std::invalid_argument("NoiseSpec: weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("NoiseSpec: weights must sum to 1");
    const bool single = variances_.size() == 1;
    for (double s2 : variances_) {
        if (single ? !(s2 >= 0.0) : !(s2 > 0.0))
            throw std::invalid_argument("NoiseSpec: component variances must be positive");
    }
}

NoiseSpec NoiseSpec::gaussian(double sigma2) { return NoiseSpec({1.0}, {sigma2}); }

NoiseSpec NoiseSpec::mixture(std::vector<double> weights, std::vector<double> variances) {
    return NoiseSpec(std::move(weights), std::move(variances));
}

double NoiseSpec::total_variance() const {
    double v = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) v += weights_[i] * variances_[i];
    return v;
}

NoiseSpec NoiseSpec::scaled_to_variance(double target) const {
    if (!(target >= 0.0)) throw std::invalid_argument("NoiseSpec: target variance must be >= 0");
    if (target == 0.0) return gaussian(0.0);
    const double current = total_variance();
    if (current <= 0.0) throw std::invalid_argument("NoiseSpec: cannot rescale zero-variance noise");
    const double factor = target / current;
    std::vector<double> scaled = variances_;
    for (double& s2 : scaled) s2 *= factor;
    return NoiseSpec(weights_, std::move(scaled));
}

double NoiseSpec::cf(double u) const {
    double value = 0.0;
    const double half_u2 = 0.5 * u * u;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        value += weights_[i] * std::exp(-variances_[i] * half_u2);
    return value;
}

double excess_kurtosis(const NoiseSpec& noise) {
    const double m2 = noise.total_variance();
    if (m2 <= 0.0) return 0.0;
    double m4 = 0.0;
    for (std::size_t i = 0; i < noise.weights().size(); ++i)
        m4 += noise.weights()[i] * noise.variances()[i] * noise.variances()[i];
    return 3.0 * m4 / (m2 * m2) - 3.0;
}

namespace {

double draw_noise(const NoiseSpec& noise, Rng& rng) {
    if (noise.is_gaussian()) {
        const double s2 = noise.variances()[0];
        if (s2 == 0.0) return 0.0;
        return std::sqrt(s2) * rng.gaussian();
    }
    const double u = rng.uniform01();
    double cum = 0.0;
    std::size_t pick = noise.weights().size() - 1;
    for (std::size_t i = 0; i < noise.weights().size(); ++i) {
        cum += noise.weights()[i];
        if (u < cum) {
            pick = i;
            break;
        }
    }
    return std::sqrt(noise.variances()[pick]) * rng.gaussian();
}

}  // namespace

std::vector<double> sample_noise(const NoiseSpec& noise, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_noise: n must be >= 1");
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& z : out) z = draw_noise(noise, rng);
    return out;
}

namespace {

Trajectory simulate_impl(const ParSpec& spec, const NoiseSpec& noise, long length,
                         std::uint64_t seed, const SimulateOptions& opts) {
    if (length < 1) throw std::invalid_argument("simulate: length must be >= 1");
    if (opts.burn_in_periods < 0) throw std::invalid_argument("simulate: burn_in must be >= 0");

    const int T = spec.period();
    const int p = spec.order();
    const double sd_xi = std::sqrt(spec.sigma_xi2());

    Trajectory traj;
    traj.period = T;
    traj.seed = seed;
    traj.stability = stability_radius(spec);
    traj.stability_warning = traj.stability >= 1.0;
    traj.values.resize(length);
    if (opts.keep_components) {
        traj.pure.resize(length);
        traj.noise.resize(length);
    }

    // The innovation and noise streams are independent substreams of the
    // trajectory seed, so the pure path is bit-identical across noise
    // settings under the same seed.
    Rng xi_rng(substream_seed(seed, 0));
    Rng z_rng(substream_seed(seed, 1));

    const long burn = opts.burn_in_periods * T;
    std::vector<double> lags(p, 0.0);  // lags[i-1] = X_{t-i}
    for (long t = 1; t <= burn + length; ++t) {
        const int v = phase_of(t, T);
        double x = sd_xi * xi_rng.gaussian();
        for (int i = 1; i <= p; ++i) x += spec.phi()(v - 1, i - 1) * lags[i - 1];
        for (int i = p - 1; i >= 1; --i) lags[i] = lags[i - 1];
        if (p > 0) lags[0] = x;
        if (t > burn) {
            const long k = t - burn - 1;
            const double z = draw_noise(noise, z_rng);
            traj.values[k] = x + z;
            if (opts.keep_components) {
                traj.pure[k] = x;
                traj.noise[k] = z;
            }
        }
    }
    return traj;
}

}  // namespace

Trajectory simulate(const ParSpec& spec, const NoiseSpec& noise, long n_cycles,
                    std::uint64_t seed, SimulateOptions opts) {
    if (n_cycles < 2) throw std::invalid_argument("simulate: n_cycles must be >= 2");
    return simulate_impl(spec, noise, n_cycles * spec.period(), seed, opts);
}

Trajectory simulate_length(const ParSpec& spec, const NoiseSpec& noise, long length,
                           std::uint64_t seed, SimulateOptions opts) {
    return simulate_impl(spec, noise, length, seed, opts);
}

double stability_radius(const ParSpec& spec) {
    const int T = spec.period();
    const int p = spec.order();
    Eigen::MatrixXd product = Eigen::MatrixXd::Identity(p, p);
    for (int v = 1; v <= T; ++v) {
        Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
        for (int i = 1; i <= p; ++i) companion(0, i - 1) = spec.phi()(v - 1, i - 1);
        for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
        product = companion * product;
    }
    return product.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> empirical_snr(const ParSpec& spec, const NoiseSpec& noise, long n_rep,
                                  std::uint64_t seed) {
    if (n_rep < 100) throw std::invalid_argument("empirical_snr: n_rep must be >= 100");
    if (noise.total_variance() <= 0.0)
        throw std::invalid_argument("empirical_snr: noise variance must be positive");

    const int T = spec.period();
    SimulateOptions opts;
    opts.keep_components = true;
    std::vector<double> sum_x(T, 0.0), sum_x2(T, 0.0), sum_z(T, 0.0), sum_z2(T, 0.0);
    for (long r = 0; r < n_rep; ++r) {
        const Trajectory traj =
            simulate_length(spec, noise, T, substream_seed(seed, static_cast<std::uint64_t>(r)), opts);
        for (int v = 0; v < T; ++v) {
            sum_x[v] += traj.pure[v];
            sum_x2[v] += traj.pure[v] * traj.pure[v];
            sum_z[v] += traj.noise[v];
            sum_z2[v] += traj.noise[v] * traj.noise[v];
        }
    }
    std::vector<double> snr(T);
    const double n = static_cast<double>(n_rep);
    for (int v = 0; v < T; ++v) {
        const double var_x = sum_x2[v] / n - (sum_x[v] / n) * (sum_x[v] / n);
        const double var_z = sum_z2[v] / n - (sum_z[v] / n) * (sum_z[v] / n);
        if (var_z <= 0.0) throw NumericError("empirical_snr: degenerate noise variance estimate");
        snr[v] = var_x / var_z;
    }
    return snr;
}

}  // namespace parnoise
