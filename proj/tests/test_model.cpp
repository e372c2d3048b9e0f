#include <doctest.h>

#include <cmath>
#include <numeric>

#include "parnoise/model.hpp"
#include "parnoise/rng.hpp"
#include "support/fixture_models.hpp"

using namespace parnoise;

namespace {

double sample_variance(const std::vector<double>& x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double acc = 0.0;
    for (double v : x) acc += (v - mean) * (v - mean);
    return acc / x.size();
}

double sample_excess_kurtosis(const std::vector<double>& x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= x.size();
    m4 /= x.size();
    return m4 / (m2 * m2) - 3.0;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("ParSpec rejects p >= T and bad inputs") {
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(ParSpec(2, 2, phi, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ParSpec(2, 1, Eigen::MatrixXd::Zero(2, 1), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ParSpec(2, 1, Eigen::MatrixXd::Zero(3, 1), 1.0), std::invalid_argument);
}

TEST_CASE("extended coefficient accessor: phi_0, zero padding, periodicity") {
    const ParSpec spec = fixtures::par1_t2();
    CHECK(spec.phi_ext(1, 0) == -1.0);
    CHECK(spec.phi_ext(2, 0) == -1.0);
    CHECK(spec.phi_ext(1, 1) == 0.4);
    CHECK(spec.phi_ext(2, 1) == -0.6);
    CHECK(spec.phi_ext(1, 2) == 0.0);
    CHECK(spec.phi_ext(1, -1) == 0.0);
    for (int v = -7; v <= 9; ++v)
        for (int j = 0; j <= 2; ++j) CHECK(spec.phi_ext(v, j) == spec.phi_ext(v + 2, j));
}

TEST_CASE("NoiseSpec invariants") {
    CHECK_THROWS_AS(NoiseSpec::mixture({0.5, 0.6}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSpec::mixture({0.5, 0.5}, {1.0, 0.0}), std::invalid_argument);
    const NoiseSpec mix = fixtures::unit_mixture();
    CHECK(mix.total_variance() == doctest::Approx(1.0).epsilon(1e-14));
    const NoiseSpec scaled = mix.scaled_to_variance(0.2);
    CHECK(scaled.total_variance() == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(scaled.variances()[0] == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("excess kurtosis: Gaussian zero, mixture 0.75, single-component zero") {
    CHECK(excess_kurtosis(NoiseSpec::gaussian(2.0)) == 0.0);
    // 3(0.5*0.25 + 0.5*2.25)/1^2 - 3 = 0.75, evaluated by hand
    CHECK(excess_kurtosis(fixtures::unit_mixture()) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(excess_kurtosis(NoiseSpec::mixture({1.0}, {3.7})) == doctest::Approx(0.0));
}

TEST_CASE("sample_noise: variance and kurtosis converge") {
    const std::size_t n = 1000000;
    const auto gauss = sample_noise(NoiseSpec::gaussian(1.0), n, 11);
    CHECK(std::abs(sample_variance(gauss) - 1.0) < 0.01);

    const auto mix = sample_noise(fixtures::unit_mixture(), n, 12);
    CHECK(std::abs(sample_variance(mix) - 1.0) < 0.01);
    CHECK(sample_excess_kurtosis(mix) == doctest::Approx(0.75).epsilon(0.15));
}

TEST_CASE("noise sample variance converges to total_variance at 4/sqrt(n) relative") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const std::size_t n = 40000;
        const auto draws = sample_noise(fixtures::unit_mixture().scaled_to_variance(2.0), n, seed);
        CHECK(std::abs(sample_variance(draws) / 2.0 - 1.0) <
              4.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("simulate: zero noise equals the pure component bit-for-bit") {
    const ParSpec spec = fixtures::phi1();
    SimulateOptions opts;
    opts.keep_components = true;
    const Trajectory noisy = simulate(spec, NoiseSpec::gaussian(1.0), 50, 99, opts);
    const Trajectory clean = simulate(spec, NoiseSpec::gaussian(0.0), 50, 99, opts);
    REQUIRE(noisy.values.size() == clean.values.size());
    for (std::size_t i = 0; i < clean.values.size(); ++i) {
        CHECK(clean.values[i] == noisy.pure[i]);
        CHECK(clean.values[i] == clean.pure[i]);
    }
}

TEST_CASE("simulate: equal seeds identical, different seeds differ") {
    const ParSpec spec = fixtures::phi2();
    const NoiseSpec noise = NoiseSpec::gaussian(0.2);
    const Trajectory a = simulate(spec, noise, 30, 7);
    const Trajectory b = simulate(spec, noise, 30, 7);
    const Trajectory c = simulate(spec, noise, 30, 8);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("simulate: all-zero coefficients and no noise give iid Gaussian innovations") {
    const ParSpec spec(4, 1, Eigen::MatrixXd::Zero(4, 1), 2.5);
    const Trajectory traj = simulate(spec, NoiseSpec::gaussian(0.0), 20000, 5);
    CHECK(std::abs(sample_variance(traj.values) - 2.5) < 0.08);
}

TEST_CASE("stability radius: zero coefficients, random walk boundary, paper model") {
    CHECK(stability_radius(ParSpec(4, 2, Eigen::MatrixXd::Zero(4, 2), 1.0)) ==
          doctest::Approx(0.0));
    CHECK(stability_radius(ParSpec(3, 1, Eigen::MatrixXd::Ones(3, 1), 1.0)) ==
          doctest::Approx(1.0));
    const double radius = stability_radius(fixtures::phi1());
    CHECK(radius > 0.0);
    CHECK(radius < 1.0);
    // |phi_1(1) phi_1(2) phi_1(3) phi_1(4)| for p = 1
    CHECK(radius == doctest::Approx(0.1208 * 0.5773 * 0.0362 * 0.3254).epsilon(1e-12));
}

TEST_CASE("stability radius in (0,1) for all paper models") {
    for (const ParSpec& spec : {fixtures::phi1(), fixtures::phi2(), fixtures::phi3()}) {
        const double radius = stability_radius(spec);
        CHECK(radius > 0.0);
        CHECK(radius < 1.0);
    }
}

TEST_CASE("empirical SNR: white signal gives SNR 1, doubling noise halves it") {
    const ParSpec white(4, 1, Eigen::MatrixXd::Zero(4, 1), 1.0);
    const auto snr = empirical_snr(white, NoiseSpec::gaussian(1.0), 20000, 5);
    for (double s : snr) CHECK(s == doctest::Approx(1.0).epsilon(0.05));

    const ParSpec spec = fixtures::phi1();
    const auto snr1 = empirical_snr(spec, NoiseSpec::gaussian(1.0), 20000, 6);
    const auto snr2 = empirical_snr(spec, NoiseSpec::gaussian(2.0), 20000, 6);
    for (int v = 0; v < 4; ++v) CHECK(snr2[v] == doctest::Approx(0.5 * snr1[v]).epsilon(0.08));
}

TEST_CASE("empirical SNR: period-4 profile for the first paper model") {
    // Fig-3-style shape check: the per-phase SNR is a genuine period-4
    // pattern (phases differ beyond sampling error).
    const auto snr = empirical_snr(fixtures::phi1(), NoiseSpec::gaussian(1.0), 30000, 17);
    REQUIRE(snr.size() == 4);
    double lo = snr[0], hi = snr[0];
    for (double s : snr) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    CHECK(hi - lo > 0.1);
    // Phase 2 follows the largest |phi| (0.5773 feeding from phase 1).
    CHECK(hi == doctest::Approx(snr[1]).epsilon(1e-12));
}

TEST_CASE("empirical SNR rejects zero noise") {
    CHECK_THROWS_AS(empirical_snr(fixtures::phi1(), NoiseSpec::gaussian(0.0), 1000, 1),
                    std::invalid_argument);
}

}  // TEST_SUITE
