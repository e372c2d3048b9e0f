#include "parnoise/charfn.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "parnoise/errors.hpp"

namespace parnoise {

std::complex<double> theoretical_cf(const ParSpec& spec, const NoiseSpec& noise,
                                    std::span<const double> t) {
    const int T = spec.period();
    const int p = spec.order();
    if (static_cast<int>(t.size()) != T)
        throw std::invalid_argument("theoretical_cf: argument length must equal T");

    double value = 1.0;
    const double half_xi = 0.5 * spec.sigma_xi2();
    for (int j = 0; j < T; ++j) value *= std::exp(-half_xi * t[j] * t[j]);
    for (int j = 1; j <= p + T; ++j) {
        double u = 0.0;
        const int lo = std::max(1, j - p);
        const int hi = std::min(j, T);
        for (int i = lo; i <= hi; ++i) u -= t[i - 1] * spec.phi_ext(i, p - (j - i));
        value *= noise.cf(u);
    }
    return {value, 0.0};
}

std::complex<double> empirical_cf(const ResidualBlocks& blocks, std::span<const double> t) {
    const int T = blocks.period;
    if (static_cast<int>(t.size()) != T)
        throw std::invalid_argument("empirical_cf: argument length must equal T");
    const long n = blocks.n_blocks();
    if (n < 1) throw std::invalid_argument("empirical_cf: need at least one block");

    double re = 0.0, im = 0.0;
    for (long b = 0; b < n; ++b) {
        double phase = 0.0;
        for (int k = 0; k < T; ++k) phase += t[k] * blocks.blocks(b, k);
        re += std::cos(phase);
        im += std::sin(phase);
    }
    return {re / static_cast<double>(n), im / static_cast<double>(n)};
}

PdfGrid::PdfGrid(const PdfGrid& other)
    : dim(other.dim),
      nodes(other.nodes),
      bounds(other.bounds),
      values(other.values),
      normalization(other.normalization),
      clipped_mass(other.clipped_mass),
      min_raw_value(other.min_raw_value),
      out_of_bounds(other.out_of_bounds.load()) {}

PdfGrid& PdfGrid::operator=(const PdfGrid& other) {
    if (this == &other) return *this;
    dim = other.dim;
    nodes = other.nodes;
    bounds = other.bounds;
    values = other.values;
    normalization = other.normalization;
    clipped_mass = other.clipped_mass;
    min_raw_value = other.min_raw_value;
    out_of_bounds.store(other.out_of_bounds.load());
    return *this;
}

namespace {

// In-place iterative radix-2 FFT, forward convention sum_j a_j e^{-2pi i jk/n}.
void fft_line(std::complex<double>* a, int n) {
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * std::numbers::pi / len;
        const std::complex<double> wl(std::cos(angle), std::sin(angle));
        for (int i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (int k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// FFT along every axis of a row-major tensor with equal extents.
void fft_tensor(std::vector<std::complex<double>>& data, int dim, int n) {
    std::vector<std::complex<double>> line(n);
    long stride = 1;
    for (int d = dim - 1; d >= 0; --d) {
        const long total = static_cast<long>(data.size());
        const long block = stride * n;
        for (long base = 0; base < total; base += block) {
            for (long off = 0; off < stride; ++off) {
                for (int j = 0; j < n; ++j) line[j] = data[base + off + j * stride];
                fft_line(line.data(), n);
                for (int j = 0; j < n; ++j) data[base + off + j * stride] = line[j];
            }
        }
        stride *= n;
    }
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

PdfGrid invert_cf_to_pdf(const CfCallable& cf, int dim, int nodes,
                         std::span<const std::pair<double, double>> bounds) {
    if (dim < 1 || dim > 4) throw std::invalid_argument("invert_cf_to_pdf: dim must be in 1..4");
    if (!is_power_of_two(nodes) || nodes < 4 || nodes > 256)
        throw std::invalid_argument("invert_cf_to_pdf: nodes must be a power of two in [4, 256]");
    if (static_cast<int>(bounds.size()) != dim)
        throw std::invalid_argument("invert_cf_to_pdf: bounds size mismatch");
    for (const auto& [lo, hi] : bounds)
        if (!(hi > lo)) throw std::invalid_argument("invert_cf_to_pdf: empty bound interval");

    std::vector<double> origin(dim);  // cf(0) sanity check
    const std::complex<double> at_zero = cf(origin);
    if (std::abs(at_zero - std::complex<double>(1.0, 0.0)) > 1e-9)
        throw std::invalid_argument("invert_cf_to_pdf: cf(0) must equal 1");

    PdfGrid grid;
    grid.dim = dim;
    grid.nodes = nodes;
    grid.bounds.assign(bounds.begin(), bounds.end());

    // Frequency grid per axis: t_j = -L + j*dt with dt = 2*pi/(hi-lo) and
    // L = n*dt/2, paired with space nodes x_k = lo + k*dx, dx = (hi-lo)/n.
    std::vector<double> dt(dim), half_span(dim), dx(dim);
    for (int d = 0; d < dim; ++d) {
        const double width = bounds[d].second - bounds[d].first;
        dx[d] = width / nodes;
        dt[d] = 2.0 * std::numbers::pi / width;
        half_span[d] = 0.5 * nodes * dt[d];
    }

    long total = 1;
    for (int d = 0; d < dim; ++d) total *= nodes;

    // Input data: cf(t) premultiplied by the per-axis shift carriers
    // e^{-i j dt lo}, so the DFT lands on the space grid anchored at lo.
    std::vector<std::vector<std::complex<double>>> carrier(dim,
                                                           std::vector<std::complex<double>>(nodes));
    for (int d = 0; d < dim; ++d)
        for (int j = 0; j < nodes; ++j) {
            const double ang = -static_cast<double>(j) * dt[d] * bounds[d].first;
            carrier[d][j] = {std::cos(ang), std::sin(ang)};
        }

    std::vector<std::complex<double>> data(total);
    std::vector<double> t(dim);
    std::vector<int> idx(dim, 0);
    for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        for (int d = dim - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(rem % nodes);
            rem /= nodes;
        }
        std::complex<double> weight(1.0, 0.0);
        for (int d = 0; d < dim; ++d) {
            t[d] = -half_span[d] + idx[d] * dt[d];
            weight *= carrier[d][idx[d]];
        }
        data[flat] = cf(t) * weight;
    }

    fft_tensor(data, dim, nodes);

    double scale = 1.0;
    for (int d = 0; d < dim; ++d) scale *= dt[d] / (2.0 * std::numbers::pi);

    grid.values.resize(total);
    double min_raw = 0.0;
    double clipped = 0.0;
    double peak = 0.0;
    double boundary_peak = 0.0;
    double cell_volume = 1.0;
    for (int d = 0; d < dim; ++d) cell_volume *= dx[d];
    for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        double ang = 0.0;
        bool on_boundary = false;
        for (int d = dim - 1; d >= 0; --d) {
            const int k = static_cast<int>(rem % nodes);
            rem /= nodes;
            ang += half_span[d] * (bounds[d].first + k * dx[d]);
            on_boundary = on_boundary || k == 0 || k == nodes - 1;
        }
        const std::complex<double> rot(std::cos(ang), std::sin(ang));
        double value = scale * (rot * data[flat]).real();
        if (value < min_raw) min_raw = value;
        if (value < 0.0) {
            clipped += -value * cell_volume;
            value = 0.0;
        }
        peak = std::max(peak, value);
        if (on_boundary) boundary_peak = std::max(boundary_peak, value);
        grid.values[flat] = value;
    }
    grid.min_raw_value = min_raw;
    grid.clipped_mass = clipped;

    double mass = 0.0;
    for (double v : grid.values) mass += v;
    mass *= cell_volume;
    grid.normalization = mass;
    // The DFT inversion periodizes the density, so too-narrow bounds alias
    // mass back into the window without disturbing the grid sum. A density
    // that has not decayed by the window edge is the visible symptom.
    if (boundary_peak > 1e-3 * peak)
        throw NumericError("invert_cf_to_pdf: density not negligible at the window boundary; "
                           "widen the bounds");
    if (mass < 0.9 || mass > 1.1)
        throw NumericError("invert_cf_to_pdf: integrated mass outside [0.9, 1.1]");
    return grid;
}

double pdf_eval(const PdfGrid& grid, std::span<const double> r) {
    if (static_cast<int>(r.size()) != grid.dim)
        throw std::invalid_argument("pdf_eval: point dimension mismatch");

    // Locate the cell; nodes span [lo, lo + (n-1)*dx] per axis.
    int cell[4];
    double frac[4];
    for (int d = 0; d < grid.dim; ++d) {
        const double u = (r[d] - grid.bounds[d].first) / grid.step(d);
        if (u < 0.0 || u > grid.nodes - 1) {
            grid.out_of_bounds.fetch_add(1, std::memory_order_relaxed);
            return 0.0;
        }
        int i = static_cast<int>(u);
        if (i > grid.nodes - 2) i = grid.nodes - 2;
        cell[d] = i;
        frac[d] = u - i;
    }

    double result = 0.0;
    const int corners = 1 << grid.dim;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        long flat = 0;
        for (int d = 0; d < grid.dim; ++d) {
            const int hi = (c >> d) & 1;
            w *= hi ? frac[d] : 1.0 - frac[d];
            flat = flat * grid.nodes + (cell[d] + hi);
        }
        result += w * grid.values[flat];
    }
    return result;
}

std::vector<std::pair<double, double>> default_grid_bounds(const CovMatrixT& cov,
                                                           double half_width) {
    std::vector<std::pair<double, double>> bounds(cov.dim());
    for (int d = 0; d < cov.dim(); ++d) {
        const double radius = half_width * std::sqrt(std::max(cov.gamma(d, d), 0.0));
        if (!(radius > 0.0)) throw NumericError("default_grid_bounds: degenerate variance");
        bounds[d] = {-radius, radius};
    }
    return bounds;
}

GaussianBlockPdf::GaussianBlockPdf(const CovMatrixT& cov) : dim_(cov.dim()) {
    llt_.compute(cov.gamma);
    if (llt_.info() != Eigen::Success)
        throw NumericError("GaussianBlockPdf: covariance not positive definite");
    double log_det = 0.0;
    for (int i = 0; i < dim_; ++i) log_det += 2.0 * std::log(llt_.matrixLLT()(i, i));
    log_norm_ = -0.5 * (dim_ * std::log(2.0 * std::numbers::pi) + log_det);
}

double GaussianBlockPdf::log_density(std::span<const double> r) const {
    if (static_cast<int>(r.size()) != dim_)
        throw std::invalid_argument("GaussianBlockPdf: point dimension mismatch");
    Eigen::Map<const Eigen::VectorXd> x(r.data(), dim_);
    const double quad = x.dot(llt_.solve(x));
    return log_norm_ - 0.5 * quad;
}

double GaussianBlockPdf::operator()(std::span<const double> r) const {
    return std::exp(log_density(r));
}

double gaussian_block_pdf(const CovMatrixT& cov, std::span<const double> r) {
    return GaussianBlockPdf(cov)(r);
}

MixtureBlockPdf::MixtureBlockPdf(const ParSpec& spec, const NoiseSpec& noise, long max_components)
    : dim_(spec.period()) {
    const int window = spec.order() + spec.period();
    const int m = noise.n_components();
    double combos_fp = 1.0;
    for (int k = 0; k < window; ++k) combos_fp *= m;
    if (combos_fp > static_cast<double>(max_components))
        throw std::invalid_argument("MixtureBlockPdf: m^(p+T) exceeds the combinatorial guard");
    const long combos = static_cast<long>(combos_fp);

    const Eigen::MatrixXd a = build_loading_matrix(spec);
    const double norm = std::pow(2.0 * std::numbers::pi, 0.5 * dim_);

    components_.reserve(combos);
    std::vector<int> assign(window, 0);
    for (long c = 0; c < combos; ++c) {
        long rem = c;
        double weight = 1.0;
        Eigen::VectorXd omega(window);
        for (int k = 0; k < window; ++k) {
            const int comp = static_cast<int>(rem % m);
            rem /= m;
            weight *= noise.weights()[comp];
            omega[k] = noise.variances()[comp];
        }
        Eigen::MatrixXd sigma = a.transpose() * omega.asDiagonal() * a;
        sigma.diagonal().array() += spec.sigma_xi2();
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        if (llt.info() != Eigen::Success)
            throw NumericError("MixtureBlockPdf: component covariance not positive definite");
        double sqrt_det = 1.0;
        for (int i = 0; i < dim_; ++i) sqrt_det *= llt.matrixLLT()(i, i);
        Component comp;
        comp.precision = sigma.inverse();
        comp.coef = weight / (norm * sqrt_det);
        components_.push_back(std::move(comp));
    }
}

double MixtureBlockPdf::operator()(std::span<const double> r) const {
    if (static_cast<int>(r.size()) != dim_)
        throw std::invalid_argument("MixtureBlockPdf: point dimension mismatch");
    Eigen::Map<const Eigen::VectorXd> x(r.data(), dim_);
    double density = 0.0;
    for (const Component& comp : components_) {
        const double quad = x.dot(comp.precision * x);
        density += comp.coef * std::exp(-0.5 * quad);
    }
    return density;
}

double mixture_block_pdf(const ParSpec& spec, double sigma_xi2, const NoiseSpec& noise,
                         std::span<const double> r) {
    return MixtureBlockPdf(spec.with_sigma_xi2(sigma_xi2), noise)(r);
}

}  // namespace parnoise
