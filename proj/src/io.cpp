#include "parnoise/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "parnoise/errors.hpp"

namespace parnoise {

using nlohmann::json;

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << std::setprecision(17);
    const bool components = !traj.pure.empty();
    out << (components ? "t,phase,y,x,z\n" : "t,phase,y\n");
    for (std::size_t i = 0; i < traj.values.size(); ++i) {
        out << (i + 1) << ',' << (i % traj.period) + 1 << ',' << traj.values[i];
        if (components) out << ',' << traj.pure[i] << ',' << traj.noise[i];
        out << '\n';
    }
}

void write_blocks_csv(std::ostream& out, const ResidualBlocks& blocks) {
    out << std::setprecision(17);
    for (int k = 1; k <= blocks.period; ++k) out << (k > 1 ? "," : "") << "r" << k;
    out << '\n';
    for (long b = 0; b < blocks.n_blocks(); ++b) {
        for (int k = 0; k < blocks.period; ++k)
            out << (k > 0 ? "," : "") << blocks.blocks(b, k);
        out << '\n';
    }
}

void write_pdf_grid_csv(std::ostream& out, const PdfGrid& grid) {
    out << std::setprecision(17);
    for (int d = 1; d <= grid.dim; ++d) out << "x" << d << ',';
    out << "density\n";
    const long total = static_cast<long>(grid.values.size());
    for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        long coords[4] = {0, 0, 0, 0};
        for (int d = grid.dim - 1; d >= 0; --d) {
            coords[d] = rem % grid.nodes;
            rem /= grid.nodes;
        }
        for (int d = 0; d < grid.dim; ++d) out << grid.node(d, static_cast<int>(coords[d])) << ',';
        out << grid.values[flat] << '\n';
    }
}

void write_bic_table_csv(std::ostream& out, const BicTable& table) {
    out << std::setprecision(17);
    out << "p_star,T_star,bic,selected,density_path\n";
    for (const BicEntry& e : table.entries) {
        const bool selected = e.p_star == table.p_opt && e.t_star == table.t_opt;
        out << e.p_star << ',' << e.t_star << ',' << e.bic << ',' << (selected ? 1 : 0) << ','
            << (e.density_path.empty() ? "-" : e.density_path) << '\n';
    }
}

std::string estimation_report_json(const EstimationResult& est) {
    json j;
    j["period"] = est.period;
    j["order"] = est.order;
    j["sigma_z2_hat"] = est.sigma_z2_hat;
    j["sigma_xi2_hat"] = est.sigma_xi2_hat;
    j["zeta"] = est.zeta;
    j["degenerate_bound"] = est.degenerate_bound;
    j["negative_xi_variance"] = est.negative_xi_variance;
    j["ill_posed_phases"] = est.ill_posed_phases;
    j["condition_numbers"] = est.condition_numbers;
    std::vector<std::vector<double>> phi(est.period);
    for (int v = 0; v < est.period; ++v) {
        phi[v].resize(est.order);
        for (int i = 0; i < est.order; ++i) phi[v][i] = est.phi_hat(v, i);
    }
    j["phi_hat"] = phi;
    std::vector<double> xi(est.sigma_xi2_per_phase.data(),
                           est.sigma_xi2_per_phase.data() + est.sigma_xi2_per_phase.size());
    j["sigma_xi2_per_phase"] = xi;
    std::vector<std::vector<double>> curve;
    curve.reserve(est.cost_curve.size());
    for (const auto& [sigma, cost] : est.cost_curve) curve.push_back({sigma, cost});
    j["cost_curve"] = curve;
    return j.dump(2);
}

std::string gof_report_json(const GofTestResult& gof) {
    json j;
    j["d_observed"] = gof.d_observed;
    j["p_value"] = gof.p_value;
    j["m_boot"] = gof.m_boot;
    j["seed"] = gof.seed;
    j["n_excluded"] = gof.n_excluded;
    j["grid"] = {{"dim", gof.grid.dim}, {"bound", gof.grid.bound}, {"step", gof.grid.step}};
    j["d_samples"] = gof.d_samples;
    return j.dump(2);
}

DataFile read_data_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data file: " + path);
    DataFile data;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("T=", 0) == 0) {
            try {
                data.period = std::stoi(line.substr(2));
            } catch (...) {
                throw ConfigError("malformed period header in " + path + ": " + line);
            }
            continue;
        }
        try {
            std::size_t pos = 0;
            const double value = std::stod(line, &pos);
            data.values.push_back(value);
        } catch (...) {
            throw ConfigError("malformed value in " + path + ": " + line);
        }
    }
    if (data.values.empty()) throw ConfigError("data file has no values: " + path);
    return data;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << contents;
}

}  // namespace parnoise
