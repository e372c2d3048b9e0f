#include "parnoise/validation.hpp"

#include <cmath>
#include <stdexcept>

#include "parnoise/charfn.hpp"
#include "parnoise/errors.hpp"
#include "parnoise/parallel.hpp"
#include "parnoise/rng.hpp"

namespace parnoise {

std::vector<double> TGrid::points() const {
    if (!(bound > 0.0) || !(step > 0.0)) throw std::invalid_argument("TGrid: bound and step must be positive");
    const long count = static_cast<long>(std::floor(2.0 * bound / step + 1e-9)) + 1;
    if (count < 1) throw std::invalid_argument("TGrid: empty lattice");
    std::vector<double> pts(count);
    for (long j = 0; j < count; ++j) pts[j] = -bound + j * step;
    return pts;
}

bool TGrid::symmetric() const {
    const auto pts = points();
    return pts.size() % 2 == 1 && std::abs(pts[pts.size() / 2]) < 1e-9;
}

namespace {

using Complex = std::complex<double>;

// Theoretical CF over the axis-0-restricted lattice, flattened with axis 0
// slowest and the remaining axes row-major.
struct TcfLattice {
    std::vector<Complex> values;
    std::vector<double> pts;
    long row_start = 0;  // first axis-0 index kept (Hermitian half when symmetric)
    int dim = 0;

    long rows() const { return static_cast<long>(pts.size()) - row_start; }
    long rest() const {
        long r = 1;
        for (int d = 1; d < dim; ++d) r *= static_cast<long>(pts.size());
        return r;
    }
};

TcfLattice build_tcf_lattice(const ParSpec& spec, const NoiseSpec& noise, const TGrid& grid) {
    if (grid.dim != spec.period())
        throw std::invalid_argument("cf_distance: grid dimension must equal the model period");
    TcfLattice lat;
    lat.dim = grid.dim;
    lat.pts = grid.points();
    const long g = static_cast<long>(lat.pts.size());
    lat.row_start = grid.symmetric() ? g / 2 : 0;

    const double entries = static_cast<double>(lat.rows()) * static_cast<double>(lat.rest());
    if (entries > 67108864.0)  // 2^26; a 201-point lattice is fine up to T=3
        throw NumericError(
            "cf_distance: lattice has more than 2^26 points; use a coarser TGrid for this "
            "dimension");

    lat.values.resize(lat.rows() * lat.rest());
    std::vector<double> t(grid.dim);
    long flat = 0;
    for (long a = lat.row_start; a < g; ++a) {
        t[0] = lat.pts[a];
        for (long f = 0; f < lat.rest(); ++f, ++flat) {
            long rem = f;
            for (int d = grid.dim - 1; d >= 1; --d) {
                t[d] = lat.pts[rem % g];
                rem /= g;
            }
            lat.values[flat] = theoretical_cf(spec, noise, t);
        }
    }
    return lat;
}

// Tables of exp(i * pts[j] * x_n) per axis, built by phase recurrence
// (two exp calls per block per axis instead of one per lattice point).
Eigen::MatrixXcd phase_table(const std::vector<double>& pts, double step,
                             const Eigen::MatrixXd& blocks, int axis) {
    const long g = static_cast<long>(pts.size());
    const long nb = blocks.rows();
    Eigen::MatrixXcd table(g, nb);
    for (long n = 0; n < nb; ++n) {
        const double x = blocks(n, axis);
        Complex current(std::cos(pts[0] * x), std::sin(pts[0] * x));
        const Complex mult(std::cos(step * x), std::sin(step * x));
        for (long j = 0; j < g; ++j) {
            table(j, n) = current;
            current *= mult;
        }
    }
    return table;
}

double sup_cf_difference(const ResidualBlocks& blocks, const TcfLattice& tcf, double step) {
    const int dim = tcf.dim;
    const long g = static_cast<long>(tcf.pts.size());
    const long nb = blocks.n_blocks();
    if (nb < 1) throw std::invalid_argument("cf_distance: need at least one block");
    const double inv_nb = 1.0 / static_cast<double>(nb);

    std::vector<Eigen::MatrixXcd> tables(dim);
    for (int d = 0; d < dim; ++d) tables[d] = phase_table(tcf.pts, step, blocks.blocks, d);

    const Eigen::MatrixXcd u = tables[0].bottomRows(tcf.rows());

    double sup = 0.0;
    if (dim == 1) {
        const Eigen::VectorXcd ecf = u.rowwise().sum() * inv_nb;
        for (long a = 0; a < ecf.size(); ++a) sup = std::max(sup, std::abs(ecf(a) - tcf.values[a]));
        return sup;
    }

    const long rest = tcf.rest();
    const long chunk = dim == 2 ? rest : std::min<long>(rest, 2048);
    Eigen::MatrixXcd w;  // nb x chunk workspace for dim >= 3
    for (long c0 = 0; c0 < rest; c0 += chunk) {
        const long width = std::min(chunk, rest - c0);
        Eigen::MatrixXcd product;
        if (dim == 2) {
            product.noalias() = u * tables[1].middleRows(c0, width).transpose();
        } else {
            w.resize(nb, width);
            for (long f = 0; f < width; ++f) {
                long rem = c0 + f;
                w.col(f).setOnes();
                for (int d = dim - 1; d >= 1; --d) {
                    const long j = rem % g;
                    rem /= g;
                    w.col(f).array() *= tables[d].row(j).transpose().array();
                }
            }
            product.noalias() = u * w;
        }
        for (long a = 0; a < product.rows(); ++a)
            for (long f = 0; f < width; ++f)
                sup = std::max(sup,
                               std::abs(product(a, f) * inv_nb - tcf.values[a * rest + c0 + f]));
    }
    return sup;
}

}  // namespace

double cf_distance(const ResidualBlocks& blocks, const ParSpec& spec, const NoiseSpec& noise,
                   const TGrid& grid) {
    if (blocks.period != grid.dim)
        throw std::invalid_argument("cf_distance: block dimension must match the grid");
    const TcfLattice tcf = build_tcf_lattice(spec, noise, grid);
    return sup_cf_difference(blocks, tcf, grid.step);
}

GofTestResult gof_test(const Trajectory& traj, const ParSpec& h0_spec, const NoiseSpec& h0_noise,
                       int m_boot, const TGrid& grid, std::uint64_t seed, int threads) {
    if (m_boot < 20) throw std::invalid_argument("gof_test: m_boot must be >= 20");
    if (grid.dim != h0_spec.period())
        throw std::invalid_argument("gof_test: grid dimension must equal the H0 period");

    const TcfLattice tcf = build_tcf_lattice(h0_spec, h0_noise, grid);

    const std::vector<double> residuals = compute_residuals(traj.values, h0_spec.phi());
    const ResidualBlocks blocks = block_residuals(residuals, h0_spec.period());

    GofTestResult result;
    result.m_boot = m_boot;
    result.seed = seed;
    result.grid = grid;
    result.d_observed = sup_cf_difference(blocks, tcf, grid.step);

    const long length = static_cast<long>(traj.values.size());
    std::vector<double> d_samples(m_boot);
    parallel_for(m_boot, threads, [&](long i) {
        const Trajectory boot = simulate_length(h0_spec, h0_noise, length,
                                                substream_seed(seed, static_cast<std::uint64_t>(i)));
        const std::vector<double> boot_res = compute_residuals(boot.values, h0_spec.phi());
        const ResidualBlocks boot_blocks = block_residuals(boot_res, h0_spec.period());
        d_samples[i] = sup_cf_difference(boot_blocks, tcf, grid.step);
    });

    long exceed = 0;
    long valid = 0;
    result.d_samples.reserve(m_boot);
    for (double d : d_samples) {
        if (!std::isfinite(d)) {
            ++result.n_excluded;
            continue;
        }
        result.d_samples.push_back(d);
        ++valid;
        if (d >= result.d_observed) ++exceed;
    }
    if (valid == 0) throw NumericError("gof_test: every bootstrap statistic was non-finite");
    result.p_value = static_cast<double>(exceed) / static_cast<double>(valid);
    return result;
}

IndependenceReport block_independence_check(const ResidualBlocks& blocks) {
    const long n = blocks.n_blocks();
    if (n < 30) throw std::invalid_argument("block_independence_check: need at least 30 blocks");
    const int T = blocks.period;

    const Eigen::MatrixXd& b = blocks.blocks;
    Eigen::VectorXd scale(T);
    for (int k = 0; k < T; ++k) scale(k) = std::sqrt(b.col(k).squaredNorm() / static_cast<double>(n));

    Eigen::MatrixXd cross =
        (b.topRows(n - 1).transpose() * b.bottomRows(n - 1)) / static_cast<double>(n - 1);

    IndependenceReport report;
    report.lag1_cross_correlation.resize(T, T);
    report.threshold = 4.0 / std::sqrt(static_cast<double>(n - 1));
    for (int k = 0; k < T; ++k)
        for (int l = 0; l < T; ++l) {
            const double denom = scale(k) * scale(l);
            const double corr = denom > 0.0 ? cross(k, l) / denom : 0.0;
            report.lag1_cross_correlation(k, l) = corr;
            if (std::abs(corr) > report.threshold) report.flagged.emplace_back(k + 1, l + 1);
        }
    return report;
}

}  // namespace parnoise
