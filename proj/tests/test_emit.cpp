#include <filesystem>
#include <fstream>
#include <sstream>

#include "corpusrep/emit.hpp"
#include "doctest.h"

using namespace corpusrep;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t count(const std::string& text, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

fs::path scratch_dir() {
    auto dir = fs::temp_directory_path() / "corpusrep_test_emit";
    fs::create_directories(dir);
    return dir;
}

ExperimentReport small_report(ExperimentConfig config, std::vector<std::uint64_t> seeds) {
    config.seeds = std::move(seeds);
    return run_experiment(config);
}

}  // namespace

TEST_CASE("format_real uses at most nine significant digits") {
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(1.0 / 3.0) == "0.333333333");
    CHECK(format_real(-2.5) == "-2.5");
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(123456789012.0) == "1.23456789e+11");
    CHECK(format_real(4.0 / 6.0) == "0.666666667");
}

TEST_CASE("vectors CSV layout") {
    const auto royalty = small_report(presets::royalty(1000, 0.5), {3, 1});
    const auto csv = vectors_csv(royalty);
    const auto rows = lines(csv);
    REQUIRE(rows.size() == 1 + 2 * 6);
    CHECK(rows[0] == "seed,word,dim0,dim1");
    CHECK(rows[1].rfind("1,a,", 0) == 0);
    CHECK(rows[2].rfind("1,is,", 0) == 0);
    CHECK(rows[6].rfind("1,woman,", 0) == 0);
    CHECK(rows[7].rfind("3,a,", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.back() == '\n');

    // values re-read at 9 digits match the model within float-like precision
    const auto& model = royalty.runs[1].model;  // seed 1
    std::istringstream row(rows[1]);
    std::string seed, word, d0, d1;
    std::getline(row, seed, ',');
    std::getline(row, word, ',');
    std::getline(row, d0, ',');
    std::getline(row, d1, ',');
    CHECK(std::stod(d0) == doctest::Approx(model.vec("a")[0]).epsilon(1e-8));
    CHECK(std::stod(d1) == doctest::Approx(model.vec("a")[1]).epsilon(1e-8));

    const auto capital = small_report(presets::capital(1000), {1, 2});
    CHECK(lines(vectors_csv(capital)).size() == 1 + 2 * 8);

    const auto dir = scratch_dir();
    emit_vectors_csv(royalty, dir / "a.csv");
    emit_vectors_csv(royalty, dir / "b.csv");
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv") == csv);
    CHECK_THROWS_AS(emit_vectors_csv(royalty, dir / "missing-dir" / "x.csv"), std::runtime_error);
}

TEST_CASE("scatter SVG") {
    const auto royalty = small_report(presets::royalty(1000, 0.5), {1});
    const auto svg = scatter_svg(royalty, 0);
    CHECK(count(svg, "<circle") == 6);
    CHECK(count(svg, "<text") == 6);
    CHECK(svg.find(">king</text>") != std::string::npos);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg == scatter_svg(royalty, 0));
    // words appear in sorted order
    CHECK(svg.find(">a</text>") < svg.find(">is</text>"));
    CHECK(svg.find(">queen</text>") < svg.find(">woman</text>"));

    ScatterOptions arrows;
    arrows.arrows = true;
    CHECK(count(scatter_svg(royalty, 0, arrows), "marker-end") == 6);

    const auto capital = small_report(presets::capital(1000), {1});
    const auto csvg = scatter_svg(capital, 0);
    for (const char* w : {">a</text>", ">has</text>", ">is</text>", ">berlin</text>"}) CHECK(csvg.find(w) != std::string::npos);

    auto cfg3 = presets::capital(200);
    cfg3.training.dim = 3;
    const auto three = small_report(cfg3, {1});
    CHECK_THROWS_WITH_AS(scatter_svg(three, 0), doctest::Contains("dim=3"), std::invalid_argument);
    CHECK_THROWS_AS(scatter_svg(royalty, 5), std::out_of_range);
}

TEST_CASE("scatter SVG points stay inside the canvas") {
    const auto report = small_report(presets::capital(1000), {2});
    const auto svg = scatter_svg(report, 0);
    for (const auto& line : lines(svg)) {
        const auto cx = line.find("<circle cx=\"");
        if (cx == std::string::npos) continue;
        const double x = std::stod(line.substr(cx + 12));
        const double y = std::stod(line.substr(line.find("cy=\"") + 4));
        CHECK(x >= 0.0);
        CHECK(x <= 480.0);
        CHECK(y >= 0.0);
        CHECK(y <= 480.0);
    }
}

TEST_CASE("report JSON is complete, deterministic and round-trips") {
    const auto report = small_report(presets::capital(1000), {1, 2});
    const auto dir = scratch_dir();
    emit_report_json(report, dir / "r1.json");
    emit_report_json(report, dir / "r2.json");
    const auto text = slurp(dir / "r1.json");
    CHECK(text == slurp(dir / "r2.json"));

    const auto parsed = nlohmann::ordered_json::parse(text);
    CHECK(parsed == report_to_json(report));
    CHECK(parsed["name"] == "capital");
    REQUIRE(parsed["seeds"].size() == 2);
    for (std::size_t s = 0; s < 2; ++s) {
        const auto& v = parsed["seeds"][s]["verifications"][0];
        CHECK(v["neighbor_ranking"].size() == 6);
        CHECK(v["rhs_rank"].get<std::size_t>() == *report.runs[s].verifications[0].rhs_rank);
        // full precision: every vector component is reproduced exactly
        const auto& model = report.runs[s].model;
        for (const auto& w : model.vocabulary.tokens()) {
            const auto row = model.vec(w);
            CHECK(parsed["seeds"][s]["input_vectors"][w][0].get<double>() == row[0]);
            CHECK(parsed["seeds"][s]["input_vectors"][w][1].get<double>() == row[1]);
        }
        CHECK(v["residual_euclidean"].get<double>() == report.runs[s].verifications[0].residual_euclidean);
    }
    CHECK(parsed["relations"][0]["solved_fraction"].get<double>() == report.solved_fraction[0]);
    CHECK(parsed["config"]["training"]["window"] == 2);
    CHECK(parsed.find("duration_seconds") == parsed.end());
}

TEST_CASE("window-3 overlap in the report") {
    auto config = presets::single_sentence(10000, 3);
    const auto report = small_report(config, {1});
    const auto parsed = report_to_json(report);
    const auto& jac = parsed["overlap"]["jaccard"];
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            const double x = jac[i][j].get<double>();
            if (i == j) {
                CHECK(x == 1.0);
            } else {
                CHECK(x == doctest::Approx(0.666666667).epsilon(1e-9));
            }
        }
    }
    CHECK(parsed["partition"].size() == 6);
    CHECK(parsed["angles"]["words"].size() == 6);
}
