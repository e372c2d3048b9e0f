#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "parnoise/model.hpp"
#include "parnoise/residuals.hpp"

namespace parnoise {

// Characteristic function of a T-dimensional residual block:
//   prod_{j=1..T} Phi_xi(t_j) * prod_{j=1..p+T} Phi_Z(u_j),
// with u_j = -sum_{i=max(1,j-p)}^{min(j,T)} t_i phi_{p-(j-i)}(i).
// Real-valued here (zero-mean symmetric noise) but returned as complex.
std::complex<double> theoretical_cf(const ParSpec& spec, const NoiseSpec& noise,
                                    std::span<const double> t);

// (1/n) sum_n exp(i t . R_n).
std::complex<double> empirical_cf(const ResidualBlocks& blocks, std::span<const double> t);

// Tensor-grid density table from CF inversion, with multilinear
// interpolation between nodes. Immutable after construction apart from the
// out-of-bounds counter.
struct PdfGrid {
    int dim = 0;
    int nodes = 0;                                  // per dimension
    std::vector<std::pair<double, double>> bounds;  // [lo, hi) per dimension
    std::vector<double> values;                     // nodes^dim, row-major, dim 0 slowest
    double normalization = 0.0;                     // achieved Riemann mass
    double clipped_mass = 0.0;                      // negative ripple removed
    double min_raw_value = 0.0;                     // most negative pre-clip value
    mutable std::atomic<long> out_of_bounds{0};

    PdfGrid() = default;
    PdfGrid(const PdfGrid& other);
    PdfGrid& operator=(const PdfGrid& other);

    double step(int d) const { return (bounds[d].second - bounds[d].first) / nodes; }
    double node(int d, int j) const { return bounds[d].first + j * step(d); }
};

using CfCallable = std::function<std::complex<double>(std::span<const double>)>;

// Inverts a characteristic function onto a tensor grid via the
// multidimensional FFT. Nodes must be a power of two (<= 256); dim <= 4.
PdfGrid invert_cf_to_pdf(const CfCallable& cf, int dim, int nodes,
                         std::span<const std::pair<double, double>> bounds);

// Multilinear interpolation inside the node range, 0 outside (counted).
double pdf_eval(const PdfGrid& grid, std::span<const double> r);

// Default inversion bounds: +/- half_width marginal standard deviations
// per dimension, from the block covariance diagonal.
std::vector<std::pair<double, double>> default_grid_bounds(const CovMatrixT& cov,
                                                           double half_width = 6.0);

// Zero-mean multivariate Gaussian block density with precomputed factors.
class GaussianBlockPdf {
public:
    explicit GaussianBlockPdf(const CovMatrixT& cov);
    double operator()(std::span<const double> r) const;
    double log_density(std::span<const double> r) const;

private:
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double log_norm_;
    int dim_;
};

double gaussian_block_pdf(const CovMatrixT& cov, std::span<const double> r);

// Residual-block density when the additive noise is a Gaussian mixture:
// a mixture of m^(p+T) component Gaussians with covariances
// sigma_xi^2 I_T + A' Omega A over all component assignments Omega.
class MixtureBlockPdf {
public:
    MixtureBlockPdf(const ParSpec& spec, const NoiseSpec& noise, long max_components = 100000);
    double operator()(std::span<const double> r) const;
    long n_components() const { return static_cast<long>(components_.size()); }

private:
    struct Component {
        Eigen::MatrixXd precision;
        double coef;  // weight / ((2 pi)^{T/2} sqrt(det))
    };
    std::vector<Component> components_;
    int dim_;
};

double mixture_block_pdf(const ParSpec& spec, double sigma_xi2, const NoiseSpec& noise,
                         std::span<const double> r);

}  // namespace parnoise
