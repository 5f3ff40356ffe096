#include "lomboost/cli.hpp"
#include "lomboost/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

std::vector<std::vector<double>> columns(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> cols(4);
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        for (auto& col : cols) {
            std::getline(row, cell, ',');
            col.push_back(std::stod(cell));
        }
    }
    return cols;
}

}  // namespace

TEST_CASE("k=32 synthetic curves match the stored fixture") {
    const fs::path dir = fs::temp_directory_path() / "lomboost_regression";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ostringstream out, err;
    const auto data = (dir / "k32.svm").string();
    REQUIRE(lomboost::cli::run({"synth", "--k", "32", "--d", "64", "--n", "6400", "--noise", "0.05",
                                "--seed", "1", "--out", data},
                               out, err) == 0);
    REQUIRE(lomboost::cli::run({"train", "--data", data, "--splits", "31", "--lr", "0.5", "--epochs",
                                "20", "--seed", "1", "--out", (dir / "run").string()},
                               out, err) == 0);
    const auto curves = (dir / "curves.csv").string();
    REQUIRE(lomboost::cli::run({"curves", "--trace", (dir / "run" / "trace.csv").string(), "--out",
                                curves},
                               out, err) == 0);

    const std::string produced = slurp(curves);
    const std::string expected = slurp(fs::path(LOMBOOST_FIXTURE_DIR) / "synthetic_k32_curves.csv");
    REQUIRE_FALSE(expected.empty());
    CHECK(produced == expected);

    const auto cols = columns(produced);
    REQUIRE(cols[0].size() == 32);
    for (const auto& col : cols) {
        CHECK(col.front() == 1.0);
        for (std::size_t i = 1; i < col.size(); ++i) CHECK(col[i] <= col[i - 1]);
    }
    fs::remove_all(dir);
}
