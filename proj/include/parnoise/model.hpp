#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace parnoise {

// Periodic autoregressive model specification: period T, order p (< T),
// a T x p coefficient matrix whose (v, i) entry is phi_i(v), and the
// innovation variance. Immutable after construction.
class ParSpec {
public:
    ParSpec(int period, int order, Eigen::MatrixXd phi, double sigma_xi2);

    int period() const { return static_cast<int>(phi_.rows()); }
    int order() const { return static_cast<int>(phi_.cols()); }
    double sigma_xi2() const { return sigma_xi2_; }
    const Eigen::MatrixXd& phi() const { return phi_; }

    // Extended coefficient accessor: phi_0(v) = -1, phi_j(v) = 0 for
    // j outside {0,...,p}, and periodic in the phase argument for any
    // integer v (including v <= 0).
    double phi_ext(int v, int j) const;

    ParSpec with_sigma_xi2(double sigma_xi2) const { return {period(), order(), phi_, sigma_xi2}; }

private:
    Eigen::MatrixXd phi_;  // T x p
    double sigma_xi2_;
};

// Additive-noise distribution: zero-mean Gaussian or a zero-mean finite
// mixture of Gaussians. The single-component case is the Gaussian variant
// (a plain Gaussian may carry variance 0, meaning "no noise").
class NoiseSpec {
public:
    static NoiseSpec gaussian(double sigma2);
    static NoiseSpec mixture(std::vector<double> weights, std::vector<double> variances);

    int n_components() const { return static_cast<int>(weights_.size()); }
    bool is_gaussian() const { return weights_.size() == 1; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& variances() const { return variances_; }
    double total_variance() const;

    // Same mixture shape rescaled so total variance equals `target`.
    NoiseSpec scaled_to_variance(double target) const;

    // Characteristic function; real-valued for zero-mean Gaussian mixtures.
    double cf(double u) const;

private:
    NoiseSpec(std::vector<double> weights, std::vector<double> variances);

    std::vector<double> weights_;
    std::vector<double> variances_;
};

double excess_kurtosis(const NoiseSpec& noise);

std::vector<double> sample_noise(const NoiseSpec& noise, std::size_t n, std::uint64_t seed);

// A simulated trajectory of Y_t = X_t + Z_t, phase-aligned so values[0]
// sits at phase 1. The pure and noise components are retained only when
// requested.
struct Trajectory {
    std::vector<double> values;
    int period = 0;
    std::uint64_t seed = 0;
    std::vector<double> pure;
    std::vector<double> noise;
    double stability = 0.0;
    bool stability_warning = false;

    long n_cycles() const { return period > 0 ? static_cast<long>(values.size()) / period : 0; }
};

struct SimulateOptions {
    long burn_in_periods = 100;
    bool keep_components = false;
};

// Simulates n_cycles full periods (length N*T).
Trajectory simulate(const ParSpec& spec, const NoiseSpec& noise, long n_cycles,
                    std::uint64_t seed, SimulateOptions opts = {});

// Simulates an arbitrary length (still phase-aligned at the start); used
// for sample sizes that are deliberately not multiples of T.
Trajectory simulate_length(const ParSpec& spec, const NoiseSpec& noise, long length,
                           std::uint64_t seed, SimulateOptions opts = {});

// Spectral radius of the product over one period of the companion matrices
// of the periodic recursion; < 1 indicates a stable periodic AR.
double stability_radius(const ParSpec& spec);

// Per-phase Var(X_t)/Var(Z_t) estimated across n_rep independent
// replications (one retained period each).
std::vector<double> empirical_snr(const ParSpec& spec, const NoiseSpec& noise, long n_rep,
                                  std::uint64_t seed);

}  // namespace parnoise
