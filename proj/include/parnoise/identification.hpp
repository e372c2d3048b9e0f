#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parnoise/estimation.hpp"
#include "parnoise/model.hpp"
#include "parnoise/residuals.hpp"

namespace parnoise {

enum class DensityPath {
    Auto,        // closed form when available, CF inversion otherwise
    ClosedForm,  // Gaussian closed form / exact mixture expansion
    CfInversion  // FFT-inverted grid with multilinear interpolation
};

std::string density_path_name(DensityPath path);

// Block density callable used by the BIC; returns the density (not its log).
using BlockDensity = std::function<double(std::span<const double>)>;

// Density of a fitted model's residual blocks. `noise_structure` carries the
// noise family shape; its scale is replaced by sigma_z2_hat (the mixture
// structure is treated as known, only the variance comes from estimation).
BlockDensity make_block_density(const ParSpec& fitted, const NoiseSpec& noise_structure,
                                double sigma_z2_hat, DensityPath path, int grid_nodes = 32,
                                std::string* resolved_name = nullptr);

// BIC(p*, T) = -2 sum_n log f(r_n) + log(NT) (T p* + 2). Densities are
// floored at 1e-300 inside the log; the floored count is reported through
// `floored` when given.
double bic_value(const ResidualBlocks& blocks, const BlockDensity& density, int p_star, int T,
                 long nt_observations, long* floored = nullptr);

struct BicEntry {
    int p_star = 0;
    int t_star = 0;
    double bic = 0.0;
    std::string density_path;
    bool estimation_ok = true;
    bool unreliable = false;  // > 1% of blocks hit the density floor
    std::string note;
    std::optional<EstimationResult> estimation;
};

struct BicTable {
    std::vector<BicEntry> entries;  // sorted by (p_star, t_star)
    int p_opt = 0;
    int t_opt = 0;
};

// Order selection with known period: candidates p* = 1..p_max.
BicTable select_order_known_T(const Trajectory& traj, int T, int p_max,
                              const NoiseSpec& noise_structure,
                              DensityPath path = DensityPath::Auto);

// Joint order/period selection over {(p*, T*): p* <= p_max, p* < T* <= T_max}
// with the BIC evaluated on the common residual range starting at T_max+1.
// The common range length must be divisible by every candidate period.
BicTable select_joint(const Trajectory& traj, int p_max, int T_max,
                      const NoiseSpec& noise_structure, DensityPath path = DensityPath::Auto);

// Minimum-BIC entry; ties broken by smaller p*, then smaller T*.
std::pair<int, int> select_optimum(const BicTable& table);

}  // namespace parnoise
