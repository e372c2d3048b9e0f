#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "parnoise/errors.hpp"
#include "parnoise/io.hpp"
#include "support/fixture_models.hpp"

using namespace parnoise;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        path = (std::filesystem::temp_directory_path() /
                ("parnoise_test_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++) + ".csv"))
                   .string();
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::filesystem::remove(path); }
    static inline int counter = 0;
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("data file round trip with period header and comments") {
    TempFile file("# condition monitoring sample\nT=4\n1.5\n-2.25\n0.125\n3\n");
    const DataFile data = read_data_csv(file.path);
    REQUIRE(data.period.has_value());
    CHECK(*data.period == 4);
    REQUIRE(data.values.size() == 4);
    CHECK(data.values[0] == 1.5);
    CHECK(data.values[1] == -2.25);
    CHECK(data.values[3] == 3.0);
}

TEST_CASE("data file without header has no period") {
    TempFile file("1\n2\n3\n");
    const DataFile data = read_data_csv(file.path);
    CHECK(!data.period.has_value());
    CHECK(data.values.size() == 3);
}

TEST_CASE("malformed data files raise config errors") {
    TempFile bad_value("T=2\n1.0\nnot_a_number\n");
    CHECK_THROWS_AS(read_data_csv(bad_value.path), ConfigError);
    TempFile bad_header("T=four\n1.0\n");
    CHECK_THROWS_AS(read_data_csv(bad_header.path), ConfigError);
    TempFile empty("# nothing here\n");
    CHECK_THROWS_AS(read_data_csv(empty.path), ConfigError);
    CHECK_THROWS_AS(read_data_csv("/nonexistent/nowhere.csv"), ConfigError);
}

TEST_CASE("blocks CSV has one row per block") {
    ResidualBlocks blocks;
    blocks.period = 3;
    blocks.blocks.resize(2, 3);
    blocks.blocks << 1, 2, 3, 4, 5, 6;
    std::ostringstream out;
    write_blocks_csv(out, blocks);
    CHECK(out.str() == "r1,r2,r3\n1,2,3\n4,5,6\n");
}

TEST_CASE("BIC table CSV marks the selected row") {
    BicTable table;
    table.entries.push_back({1, 4, 20.0, "gaussian-closed-form", true, false, "", std::nullopt});
    table.entries.push_back({2, 4, 10.0, "gaussian-closed-form", true, false, "", std::nullopt});
    table.p_opt = 2;
    table.t_opt = 4;
    std::ostringstream out;
    write_bic_table_csv(out, table);
    CHECK(out.str() ==
          "p_star,T_star,bic,selected,density_path\n"
          "1,4,20,0,gaussian-closed-form\n"
          "2,4,10,1,gaussian-closed-form\n");
}

TEST_CASE("pdf grid CSV lists coordinates and densities") {
    const CfCallable cf = [](std::span<const double> t) {
        return std::complex<double>(std::exp(-0.5 * t[0] * t[0]), 0.0);
    };
    const std::vector<std::pair<double, double>> bounds{{-6.0, 6.0}};
    const PdfGrid grid = invert_cf_to_pdf(cf, 1, 32, bounds);
    std::ostringstream out;
    write_pdf_grid_csv(out, grid);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "x1,density");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 32);
}

}  // TEST_SUITE
