#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "parnoise/charfn.hpp"
#include "parnoise/estimation.hpp"
#include "parnoise/identification.hpp"
#include "parnoise/model.hpp"
#include "parnoise/residuals.hpp"
#include "parnoise/validation.hpp"

namespace parnoise {

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_blocks_csv(std::ostream& out, const ResidualBlocks& blocks);
void write_pdf_grid_csv(std::ostream& out, const PdfGrid& grid);
void write_bic_table_csv(std::ostream& out, const BicTable& table);

std::string estimation_report_json(const EstimationResult& est);
std::string gof_report_json(const GofTestResult& gof);

// Single-column data file: optional "T=<int>" header line, one value per
// line, '#' comments ignored.
struct DataFile {
    std::vector<double> values;
    std::optional<int> period;
};

DataFile read_data_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace parnoise
