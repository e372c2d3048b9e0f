#include "parnoise/identification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "parnoise/charfn.hpp"
#include "parnoise/errors.hpp"

namespace parnoise {

namespace {

constexpr double kDensityFloor = 1e-300;
constexpr double kXiVarianceFloor = 1e-8;
constexpr long kClosedFormMixtureCap = 10000;  // default-path cap on m^(p+T)

NoiseSpec scaled_noise(const NoiseSpec& structure, double sigma_z2_hat) {
    if (sigma_z2_hat <= 0.0) return NoiseSpec::gaussian(0.0);
    return structure.scaled_to_variance(sigma_z2_hat);
}

}  // namespace

std::string density_path_name(DensityPath path) {
    switch (path) {
        case DensityPath::Auto: return "auto";
        case DensityPath::ClosedForm: return "closed-form";
        case DensityPath::CfInversion: return "cf-inversion";
    }
    return "?";
}

BlockDensity make_block_density(const ParSpec& fitted, const NoiseSpec& noise_structure,
                                double sigma_z2_hat, DensityPath path, int grid_nodes,
                                std::string* resolved_name) {
    const NoiseSpec noise = scaled_noise(noise_structure, sigma_z2_hat);
    const double sigma_z2 = noise.total_variance();

    DensityPath resolved = path;
    if (path == DensityPath::Auto) {
        double combos = 1.0;
        for (int k = 0; k < fitted.order() + fitted.period(); ++k) combos *= noise.n_components();
        resolved = (noise.is_gaussian() || combos <= static_cast<double>(kClosedFormMixtureCap))
                       ? DensityPath::ClosedForm
                       : DensityPath::CfInversion;
    }

    if (resolved == DensityPath::ClosedForm) {
        if (noise.is_gaussian()) {
            if (resolved_name) *resolved_name = "gaussian-closed-form";
            auto pdf = std::make_shared<GaussianBlockPdf>(residual_cov_direct(fitted, sigma_z2));
            return [pdf](std::span<const double> r) { return (*pdf)(r); };
        }
        if (resolved_name) *resolved_name = "mixture-closed-form";
        auto pdf = std::make_shared<MixtureBlockPdf>(fitted, noise);
        return [pdf](std::span<const double> r) { return (*pdf)(r); };
    }

    if (resolved_name) *resolved_name = "cf-inversion";
    const CovMatrixT cov = residual_cov_direct(fitted, sigma_z2);
    const auto bounds = default_grid_bounds(cov);
    auto grid = std::make_shared<PdfGrid>(invert_cf_to_pdf(
        [&fitted, &noise](std::span<const double> t) { return theoretical_cf(fitted, noise, t); },
        fitted.period(), grid_nodes, bounds));
    return [grid](std::span<const double> r) { return pdf_eval(*grid, r); };
}

double bic_value(const ResidualBlocks& blocks, const BlockDensity& density, int p_star, int T,
                 long nt_observations, long* floored) {
    if (nt_observations < 2) throw std::invalid_argument("bic_value: need NT >= 2");
    double log_likelihood = 0.0;
    long floored_count = 0;
    std::vector<double> row(T);
    for (long b = 0; b < blocks.n_blocks(); ++b) {
        for (int k = 0; k < T; ++k) row[k] = blocks.blocks(b, k);
        double f = density(row);
        if (!std::isfinite(f))
            throw NumericError("bic_value: non-finite density at block " + std::to_string(b + 1));
        if (f < kDensityFloor) {
            f = kDensityFloor;
            ++floored_count;
        }
        log_likelihood += std::log(f);
    }
    if (floored) *floored = floored_count;
    return -2.0 * log_likelihood +
           std::log(static_cast<double>(nt_observations)) * (static_cast<double>(T) * p_star + 2.0);
}

namespace {

// Shared candidate evaluation: estimate, block, build density, score.
BicEntry evaluate_candidate(const Trajectory& traj, int p_star, int t_star,
                            const NoiseSpec& noise_structure, DensityPath path, long block_start,
                            long block_count, int phase_offset) {
    BicEntry entry;
    entry.p_star = p_star;
    entry.t_star = t_star;
    try {
        EstimationResult est = estimate_eiv(traj.values, p_star, t_star);
        const std::vector<double> residuals = compute_residuals(traj.values, est.phi_hat);
        const ResidualBlocks blocks =
            block_range(residuals, block_start, block_count, t_star);

        Eigen::MatrixXd phi = est.phi_hat;
        if (phase_offset % t_star != 0) phi = rotate_phases(phi, phase_offset);
        const double sigma_xi2 = std::max(est.sigma_xi2_hat, kXiVarianceFloor);
        const ParSpec fitted(t_star, p_star, std::move(phi), sigma_xi2);

        const BlockDensity density =
            make_block_density(fitted, noise_structure, est.sigma_z2_hat, path, 32,
                               &entry.density_path);
        long floored = 0;
        entry.bic = bic_value(blocks, density, p_star, t_star,
                              static_cast<long>(traj.values.size()), &floored);
        entry.unreliable = floored > blocks.n_blocks() / 100;
        entry.estimation = std::move(est);
    } catch (const std::exception& e) {
        entry.bic = std::numeric_limits<double>::infinity();
        entry.estimation_ok = false;
        entry.note = e.what();
    }
    return entry;
}

}  // namespace

BicTable select_order_known_T(const Trajectory& traj, int T, int p_max,
                              const NoiseSpec& noise_structure, DensityPath path) {
    if (p_max < 1 || p_max >= T)
        throw std::invalid_argument("select_order_known_T: need 1 <= p_max < T");
    const long nt = static_cast<long>(traj.values.size());
    const long block_count = (nt - T) / T;
    if (block_count < 1) throw std::invalid_argument("select_order_known_T: sample too short");

    BicTable table;
    for (int p_star = 1; p_star <= p_max; ++p_star)
        table.entries.push_back(
            evaluate_candidate(traj, p_star, T, noise_structure, path, T, block_count, 0));
    std::tie(table.p_opt, table.t_opt) = select_optimum(table);
    return table;
}

BicTable select_joint(const Trajectory& traj, int p_max, int T_max,
                      const NoiseSpec& noise_structure, DensityPath path) {
    if (T_max < 2) throw std::invalid_argument("select_joint: need T_max >= 2");
    if (p_max < 1) throw std::invalid_argument("select_joint: need p_max >= 1");
    const long nt = static_cast<long>(traj.values.size());
    if (nt < static_cast<long>(T_max) * T_max)
        throw std::invalid_argument("select_joint: sample shorter than T_max^2");

    // Common residual range [R_{T_max+1}, ..., R_L]; its length must be a
    // multiple of every candidate period so all candidates score the same
    // residual indices.
    const long common_len = nt - T_max;
    for (int t_star = 2; t_star <= T_max; ++t_star) {
        if (common_len % t_star != 0)
            throw std::invalid_argument(
                "select_joint: common residual range (NT - T_max) must be divisible by every "
                "candidate period; adjust the sample length");
    }

    BicTable table;
    for (int p_star = 1; p_star <= p_max; ++p_star) {
        for (int t_star = p_star + 1; t_star <= T_max; ++t_star) {
            // Blocks start right after index T_max, so position k within a
            // block sits at phase ((T_max + k - 1) mod T*) + 1.
            table.entries.push_back(evaluate_candidate(traj, p_star, t_star, noise_structure, path,
                                                       T_max, common_len / t_star,
                                                       T_max % t_star));
        }
    }
    std::tie(table.p_opt, table.t_opt) = select_optimum(table);
    return table;
}

std::pair<int, int> select_optimum(const BicTable& table) {
    if (table.entries.empty()) throw std::invalid_argument("select_optimum: empty table");
    const BicEntry* best = nullptr;
    for (const BicEntry& entry : table.entries) {
        if (!std::isfinite(entry.bic)) continue;
        if (best == nullptr || entry.bic < best->bic ||
            (entry.bic == best->bic && (entry.p_star < best->p_star ||
                                        (entry.p_star == best->p_star && entry.t_star < best->t_star))))
            best = &entry;
    }
    if (best == nullptr) throw NumericError("select_optimum: no finite BIC entries");
    return {best->p_star, best->t_star};
}

}  // namespace parnoise
