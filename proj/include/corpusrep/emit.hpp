#pragma once

#include <filesystem>
#include <string>

#include "corpusrep/experiment.hpp"
#include "json.hpp"

namespace corpusrep {

/// `seed,word,dim0,dim1,...`, rows sorted by (seed, word), 9 significant
/// digits, LF endings.
std::string vectors_csv(const ExperimentReport& report);
void emit_vectors_csv(const ExperimentReport& report, const std::filesystem::path& path);

struct ScatterOptions {
    double width = 480.0;
    double height = 480.0;
    bool arrows = false;
};

/// 2-D scatter of one seed's input vectors. Throws std::invalid_argument for
/// models that are not two-dimensional.
std::string scatter_svg(const ExperimentReport& report, std::size_t seed_index, const ScatterOptions& options = {});
void emit_scatter_svg(const ExperimentReport& report, std::size_t seed_index, const std::filesystem::path& path,
                      const ScatterOptions& options = {});

/// Full machine-readable report (wall-clock time excluded).
nlohmann::ordered_json report_to_json(const ExperimentReport& report);
void emit_report_json(const ExperimentReport& report, const std::filesystem::path& path);

/// Shortest decimal form with at most `digits` significant digits.
std::string format_real(double value, int digits = 9);

}  // namespace corpusrep
