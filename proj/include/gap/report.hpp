#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gap/eval.hpp"
#include "gap/puzzlegen.hpp"
#include "gap/shapestats.hpp"

namespace gap::report {

// Artifacts are deterministic text: stable key order, 2-space indent,
// shortest round-trip doubles, trailing newline.

std::string metrics_json(const eval::MetricsReport& report);
std::string metrics_csv(const eval::MetricsReport& report);

std::string summary_json(const shapestats::SummaryStats& stats);
std::string validation_json(const shapestats::ValidationReport& report);
// One row per sample: id, then the eight feature columns.
std::string features_csv(const std::vector<std::string>& ids, const std::vector<shapestats::ShapeFeatures>& features);

struct Solution {
  std::string puzzle_id;
  std::string solver;
  std::uint64_t seed = 0;
  puzzlegen::Permutation permutation;
  std::optional<double> wall_ms;  // only with --record-timing
  std::map<std::string, double> diagnostics;
};

std::string solution_json(const Solution& s);
Solution parse_solution(const std::string& text);  // throws SchemaError

// PC1/PC2 scatter, real in one colour, synthetic in another.
std::string pca_scatter_svg(const shapestats::ValidationReport& report);
// Grouped PA / AA / SRA bars, one group per report.
std::string metrics_bar_svg(const std::vector<eval::MetricsReport>& reports);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace gap::report
