#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "parnoise/charfn.hpp"
#include "parnoise/errors.hpp"
#include "parnoise/model.hpp"
#include "parnoise/residuals.hpp"
#include "parnoise/rng.hpp"
#include "support/fixture_models.hpp"

using namespace parnoise;

namespace {

double gaussian_cf_quadform(const Eigen::MatrixXd& gamma, double t1, double t2) {
    return std::exp(-0.5 * (t1 * t1 * gamma(0, 0) + 2.0 * t1 * t2 * gamma(0, 1) +
                            t2 * t2 * gamma(1, 1)));
}

}  // namespace

TEST_SUITE("charfn") {

TEST_CASE("theoretical CF is 1 at the origin") {
    const std::vector<double> zero{0.0, 0.0};
    const auto value = theoretical_cf(fixtures::par1_t2(), NoiseSpec::gaussian(1.0), zero);
    CHECK(value.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(value.imag() == 0.0);
}

TEST_CASE("T=2 p=1 Gaussian CF equals the Gamma^R quadratic form") {
    const ParSpec spec = fixtures::par1_t2();
    const CovMatrixT cov = residual_cov_direct(spec, 1.0);
    for (int i = 0; i <= 20; ++i) {
        for (int j = 0; j <= 20; ++j) {
            const double t1 = -5.0 + 0.5 * i;
            const double t2 = -5.0 + 0.5 * j;
            const std::vector<double> t{t1, t2};
            const double expected = gaussian_cf_quadform(cov.gamma, t1, t2);
            const auto got = theoretical_cf(spec, NoiseSpec::gaussian(1.0), t);
            CHECK(std::abs(got.real() - expected) < 1e-12);
            CHECK(got.imag() == 0.0);
        }
    }
}

TEST_CASE("T=2 p=1 mixture CF equals the eight-term expansion") {
    const ParSpec spec = fixtures::par1_t2();
    const NoiseSpec mix = fixtures::unit_mixture();
    const double a1 = 0.5, a2 = 0.5, s1 = 0.5, s2 = 1.5;
    const double xi = 1.0;
    const double f1 = 0.4, f2 = -0.6;  // phi(1), phi(2)

    // Literal transcription of the eight mixture terms: slots are
    // (variance multiplying phi^2(1), shared cross-term variance, trailing
    // variance on t2^2), with weights from the matching component picks.
    const auto term = [&](double w, double sa, double sb, double sc, double t1, double t2) {
        return w * std::exp(-0.5 * (t1 * t1 * (xi + f1 * f1 * sa + sb) -
                                    2.0 * t1 * t2 * f2 * sb +
                                    t2 * t2 * (xi + f2 * f2 * sb + sc)));
    };
    const auto expansion = [&](double t1, double t2) {
        return term(a1 * a1 * a1, s1, s1, s1, t1, t2) + term(a1 * a1 * a2, s1, s1, s2, t1, t2) +
               term(a1 * a1 * a2, s1, s2, s1, t1, t2) + term(a1 * a2 * a2, s1, s2, s2, t1, t2) +
               term(a1 * a1 * a2, s2, s1, s1, t1, t2) + term(a1 * a2 * a2, s2, s1, s2, t1, t2) +
               term(a1 * a2 * a2, s2, s2, s1, t1, t2) + term(a2 * a2 * a2, s2, s2, s2, t1, t2);
    };

    for (int i = 0; i <= 20; ++i) {
        for (int j = 0; j <= 20; ++j) {
            const double t1 = -5.0 + 0.5 * i;
            const double t2 = -5.0 + 0.5 * j;
            const std::vector<double> t{t1, t2};
            const auto got = theoretical_cf(spec, mix, t);
            CHECK(std::abs(got.real() - expansion(t1, t2)) < 1e-12);
        }
    }
}

TEST_CASE("Hermitian symmetry and modulus bound") {
    Rng rng(3141);
    const ParSpec spec = fixtures::phi2();
    const NoiseSpec mix = fixtures::unit_mixture();
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> t(4), neg(4);
        for (int k = 0; k < 4; ++k) {
            t[k] = 6.0 * (rng.uniform01() - 0.5);
            neg[k] = -t[k];
        }
        const auto a = theoretical_cf(spec, mix, t);
        const auto b = theoretical_cf(spec, mix, neg);
        CHECK(std::abs(a - std::conj(b)) < 1e-14);
        CHECK(std::abs(a) <= 1.0 + 1e-14);
    }
}

TEST_CASE("negative Hessian of log CF at 0 recovers Gamma^R") {
    const double h = 1e-4;
    for (const NoiseSpec& noise : {NoiseSpec::gaussian(1.0), fixtures::unit_mixture()}) {
        const ParSpec spec = fixtures::par1_t2();
        const CovMatrixT cov = residual_cov_direct(spec, noise.total_variance());
        const auto log_cf = [&](double t1, double t2) {
            const std::vector<double> t{t1, t2};
            return std::log(theoretical_cf(spec, noise, t).real());
        };
        for (int k = 0; k < 2; ++k) {
            for (int l = 0; l < 2; ++l) {
                double second;
                if (k == l) {
                    const double tp = k == 0 ? log_cf(h, 0.0) : log_cf(0.0, h);
                    const double tm = k == 0 ? log_cf(-h, 0.0) : log_cf(0.0, -h);
                    second = (tp - 2.0 * log_cf(0.0, 0.0) + tm) / (h * h);
                } else {
                    second = (log_cf(h, h) - log_cf(h, -h) - log_cf(-h, h) + log_cf(-h, -h)) /
                             (4.0 * h * h);
                }
                CHECK(-second == doctest::Approx(cov.gamma(k, l)).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("empirical CF basics: single block modulus, exact value at 0") {
    ResidualBlocks blocks;
    blocks.period = 2;
    blocks.blocks.resize(1, 2);
    blocks.blocks << 0.7, -1.3;
    const std::vector<double> t{1.1, 0.4};
    const auto single = empirical_cf(blocks, t);
    CHECK(std::abs(single) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(single.real() == doctest::Approx(std::cos(1.1 * 0.7 - 0.4 * 1.3)).epsilon(1e-15));

    const std::vector<double> zero{0.0, 0.0};
    const auto at_zero = empirical_cf(blocks, zero);
    CHECK(at_zero.real() == 1.0);
    CHECK(at_zero.imag() == 0.0);
}

TEST_CASE("empirical CF converges to the theoretical CF at the CLT rate") {
    const ParSpec spec = fixtures::par1_t2();
    const NoiseSpec noise = NoiseSpec::gaussian(1.0);
    const Trajectory traj = simulate(spec, noise, 100001, 2718);
    const auto res = compute_residuals(traj.values, spec.phi());
    const auto blocks = block_residuals(res, 2);
    const double bound = 3.0 / std::sqrt(static_cast<double>(blocks.n_blocks()));
    Rng rng(999);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> t{4.0 * (rng.uniform01() - 0.5), 4.0 * (rng.uniform01() - 0.5)};
        const auto emp = empirical_cf(blocks, t);
        const auto theo = theoretical_cf(spec, noise, t);
        CHECK(std::abs(emp - theo) < bound);
    }
}

TEST_CASE("1-D inversion of the standard Gaussian CF") {
    const CfCallable cf = [](std::span<const double> t) {
        return std::complex<double>(std::exp(-0.5 * t[0] * t[0]), 0.0);
    };
    const std::vector<std::pair<double, double>> bounds{{-6.0, 6.0}};
    const PdfGrid grid = invert_cf_to_pdf(cf, 1, 32, bounds);
    CHECK(grid.normalization == doctest::Approx(1.0).epsilon(0.02));
    for (int j = 0; j < grid.nodes; ++j) {
        const double x = grid.node(0, j);
        const double expected = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        CHECK(std::abs(grid.values[j] - expected) < 1e-3);
    }
}

TEST_CASE("2-D inversion of the Gaussian residual CF matches the closed form") {
    const ParSpec spec = fixtures::par1_t2();
    const NoiseSpec noise = NoiseSpec::gaussian(1.0);
    const CovMatrixT cov = residual_cov_direct(spec, 1.0);
    const GaussianBlockPdf closed(cov);
    const auto bounds = default_grid_bounds(cov);
    const PdfGrid grid = invert_cf_to_pdf(
        [&](std::span<const double> t) { return theoretical_cf(spec, noise, t); }, 2, 32, bounds);
    CHECK(grid.normalization > 0.98);
    CHECK(grid.normalization < 1.02);
    double max_err = 0.0;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            const std::vector<double> r{grid.node(0, i), grid.node(1, j)};
            max_err = std::max(max_err, std::abs(grid.values[i * 32 + j] - closed(r)));
        }
    CHECK(max_err < 1e-3);
}

TEST_CASE("2-D inversion of the mixture residual CF matches the closed-form mixture") {
    const ParSpec spec = fixtures::par1_t2();
    const NoiseSpec mix = fixtures::unit_mixture();
    const MixtureBlockPdf closed(spec, mix);
    const auto bounds = default_grid_bounds(residual_cov_direct(spec, mix.total_variance()));
    const PdfGrid grid = invert_cf_to_pdf(
        [&](std::span<const double> t) { return theoretical_cf(spec, mix, t); }, 2, 32, bounds);
    CHECK(grid.normalization > 0.98);
    CHECK(grid.normalization < 1.02);
    double max_err = 0.0;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            const std::vector<double> r{grid.node(0, i), grid.node(1, j)};
            max_err = std::max(max_err, std::abs(grid.values[i * 32 + j] - closed(r)));
        }
    CHECK(max_err < 1e-3);
}

TEST_CASE("inversion input validation") {
    const CfCallable not_normalized = [](std::span<const double>) {
        return std::complex<double>(0.5, 0.0);
    };
    const std::vector<std::pair<double, double>> bounds{{-1.0, 1.0}};
    CHECK_THROWS_AS(invert_cf_to_pdf(not_normalized, 1, 32, bounds), std::invalid_argument);
    const CfCallable ok = [](std::span<const double>) { return std::complex<double>(1.0, 0.0); };
    CHECK_THROWS_AS(invert_cf_to_pdf(ok, 1, 33, bounds), std::invalid_argument);
    CHECK_THROWS_AS(invert_cf_to_pdf(ok, 1, 512, bounds), std::invalid_argument);
    CHECK_THROWS_AS(invert_cf_to_pdf(ok, 5, 32, bounds), std::invalid_argument);

    // bounds far too tight: aliased mass shows up at the window boundary
    const CfCallable std_gauss = [](std::span<const double> t) {
        return std::complex<double>(std::exp(-0.5 * t[0] * t[0]), 0.0);
    };
    const std::vector<std::pair<double, double>> tight{{-0.5, 0.5}};
    CHECK_THROWS_AS(invert_cf_to_pdf(std_gauss, 1, 32, tight), NumericError);

    // not a characteristic function (grows away from 0): the inversion
    // produces large clipped ringing and the mass check fires
    const CfCallable growing = [](std::span<const double> t) {
        return std::complex<double>(std::exp(0.05 * t[0] * t[0]), 0.0);
    };
    const std::vector<std::pair<double, double>> wide{{-6.0, 6.0}};
    CHECK_THROWS_AS(invert_cf_to_pdf(growing, 1, 32, wide), NumericError);
}

TEST_CASE("pdf_eval: node identity, 1-D midpoint mean, out-of-bounds zero") {
    const CfCallable cf = [](std::span<const double> t) {
        return std::complex<double>(std::exp(-0.5 * t[0] * t[0]), 0.0);
    };
    const std::vector<std::pair<double, double>> bounds{{-6.0, 6.0}};
    const PdfGrid grid = invert_cf_to_pdf(cf, 1, 64, bounds);
    for (int j : {0, 7, 31, 63}) {
        const std::vector<double> r{grid.node(0, j)};
        CHECK(pdf_eval(grid, r) == doctest::Approx(grid.values[j]).epsilon(1e-12));
    }
    const std::vector<double> mid{0.5 * (grid.node(0, 10) + grid.node(0, 11))};
    CHECK(pdf_eval(grid, mid) ==
          doctest::Approx(0.5 * (grid.values[10] + grid.values[11])).epsilon(1e-12));

    const long before = grid.out_of_bounds.load();
    const std::vector<double> outside{7.0};
    CHECK(pdf_eval(grid, outside) == 0.0);
    CHECK(grid.out_of_bounds.load() == before + 1);
}

TEST_CASE("pdf_eval interpolation error on a 2-D Gaussian grid") {
    const ParSpec spec = fixtures::par1_t2();
    const CovMatrixT cov = residual_cov_direct(spec, 1.0);
    const GaussianBlockPdf closed(cov);
    const auto bounds = default_grid_bounds(cov);
    const PdfGrid grid = invert_cf_to_pdf(
        [&](std::span<const double> t) {
            return theoretical_cf(spec, NoiseSpec::gaussian(1.0), t);
        },
        2, 32, bounds);
    Rng rng(654);
    double max_err = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<double> r(2);
        for (int d = 0; d < 2; ++d) {
            const double lo = grid.node(d, 0);
            const double hi = grid.node(d, grid.nodes - 1);
            r[d] = lo + (hi - lo) * rng.uniform01();
        }
        max_err = std::max(max_err, std::abs(pdf_eval(grid, r) - closed(r)));
    }
    CHECK(max_err < 5e-3);
}

TEST_CASE("pdf_eval is continuous across cell faces") {
    const ParSpec spec = fixtures::par1_t2();
    const auto bounds = default_grid_bounds(residual_cov_direct(spec, 1.0));
    const PdfGrid grid = invert_cf_to_pdf(
        [&](std::span<const double> t) {
            return theoretical_cf(spec, NoiseSpec::gaussian(1.0), t);
        },
        2, 32, bounds);
    for (int i : {5, 16, 25}) {
        const double face = grid.node(0, i);
        for (double other : {grid.node(1, 8) + 0.3 * grid.step(1), grid.node(1, 20)}) {
            const std::vector<double> at{face, other};
            const std::vector<double> left{face - 1e-11, other};
            const std::vector<double> right{face + 1e-11, other};
            const double f = pdf_eval(grid, at);
            CHECK(std::abs(pdf_eval(grid, left) - f) < 1e-8);
            CHECK(std::abs(pdf_eval(grid, right) - f) < 1e-8);
        }
    }
}

TEST_CASE("gaussian_block_pdf closed-form values") {
    CovMatrixT identity(Eigen::MatrixXd::Identity(2, 2));
    const std::vector<double> zero{0.0, 0.0};
    CHECK(gaussian_block_pdf(identity, zero) ==
          doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));

    const CovMatrixT cov = residual_cov_direct(fixtures::par1_t2(), 1.0);
    // det = 2.16*2.36 - 0.36 = 4.7376 by hand
    CHECK(gaussian_block_pdf(cov, zero) ==
          doctest::Approx(1.0 / (2.0 * std::numbers::pi * std::sqrt(4.7376))).epsilon(1e-13));
}

TEST_CASE("gaussian_block_pdf integrates to 1 and rejects singular input") {
    const CovMatrixT cov = residual_cov_direct(fixtures::par1_t2(), 1.0);
    const GaussianBlockPdf pdf(cov);
    const double half = 8.0;
    const int n = 400;
    const double step = 2.0 * half / n;
    double mass = 0.0;
    std::vector<double> r(2);
    for (int i = 0; i < n; ++i) {
        r[0] = -half + (i + 0.5) * step;
        for (int j = 0; j < n; ++j) {
            r[1] = -half + (j + 0.5) * step;
            mass += pdf(r);
        }
    }
    mass *= step * step;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

    Eigen::MatrixXd singular(2, 2);
    singular << 1.0, 1.0, 1.0, 1.0;
    const std::vector<double> origin{0.0, 0.0};
    CHECK_THROWS(gaussian_block_pdf(CovMatrixT(singular), origin));
}

TEST_CASE("mixture_block_pdf: single component reduces to the Gaussian density") {
    const ParSpec spec = fixtures::phi2();
    const NoiseSpec single = NoiseSpec::mixture({1.0}, {0.8});
    const GaussianBlockPdf gauss(residual_cov_direct(spec, 0.8));
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> r(4);
        for (double& x : r) x = 4.0 * (rng.uniform01() - 0.5);
        CHECK(mixture_block_pdf(spec, spec.sigma_xi2(), single, r) ==
              doctest::Approx(gauss(r)).epsilon(1e-12));
    }
}

TEST_CASE("mixture_block_pdf: component count and combinatorial guard") {
    const MixtureBlockPdf pdf(fixtures::par1_t2(), fixtures::unit_mixture());
    CHECK(pdf.n_components() == 8);  // m^(p+T) = 2^3
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(16, 1);
    const ParSpec wide(16, 1, phi, 1.0);
    CHECK_THROWS_AS(MixtureBlockPdf(wide, fixtures::unit_mixture()), std::invalid_argument);
}

TEST_CASE("CF of the mixture block density matches theoretical_cf (quadrature oracle)") {
    const ParSpec spec = fixtures::par1_t2();
    const NoiseSpec mix = fixtures::unit_mixture();
    const MixtureBlockPdf pdf(spec, mix);
    const double half = 14.0;
    const int n = 560;
    const double step = 2.0 * half / n;
    Rng rng(31337);
    for (int trial = 0; trial < 20; ++trial) {
        const double t1 = 4.0 * (rng.uniform01() - 0.5);
        const double t2 = 4.0 * (rng.uniform01() - 0.5);
        double re = 0.0, im = 0.0;
        std::vector<double> r(2);
        for (int i = 0; i < n; ++i) {
            r[0] = -half + (i + 0.5) * step;
            for (int j = 0; j < n; ++j) {
                r[1] = -half + (j + 0.5) * step;
                const double f = pdf(r);
                const double phase = t1 * r[0] + t2 * r[1];
                re += f * std::cos(phase);
                im += f * std::sin(phase);
            }
        }
        re *= step * step;
        im *= step * step;
        const std::vector<double> t{t1, t2};
        const auto theo = theoretical_cf(spec, mix, t);
        CHECK(std::abs(re - theo.real()) < 1e-6);
        CHECK(std::abs(im) < 1e-6);
    }
}

}  // TEST_SUITE
