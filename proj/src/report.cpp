#include "gap/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gap/error.hpp"
#include "gap/ingest.hpp"

namespace gap::report {

using nlohmann::ordered_json;

namespace {

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// Non-finite values become null rather than invalid JSON.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

ordered_json summary_object(const shapestats::SummaryStats& stats) {
  ordered_json j;
  j["n"] = stats.n;
  ordered_json features = ordered_json::object();
  for (int f = 0; f < shapestats::kFeatureCount; ++f) {
    const auto& s = stats.features[f];
    features[std::string(shapestats::kFeatureNames[f])] = {{"mean", number(s.mean)}, {"sd", number(s.sd)},
                                                           {"median", number(s.median)}, {"min", number(s.min)},
                                                           {"max", number(s.max)}, {"iqr", number(s.iqr)}};
  }
  j["features"] = features;
  return j;
}

}  // namespace

std::string metrics_json(const eval::MetricsReport& report) {
  ordered_json j;
  j["solver"] = report.solver;
  j["n_puzzles"] = report.n_puzzles;
  j["pa"] = number(report.pa);
  j["aa"] = number(report.aa);
  j["sra"] = number(report.sra);
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"puzzle_id", r.puzzle_id}, {"n", r.n}, {"exact", r.exact},
                    {"accuracy", number(r.accuracy)}, {"sra", number(r.sra)}});
  j["rows"] = rows;
  return dump(j);
}

std::string metrics_csv(const eval::MetricsReport& report) {
  std::ostringstream out;
  out << "puzzle_id,n,exact,accuracy,sra\n";
  for (const auto& r : report.rows)
    out << ingest::csv_field(r.puzzle_id) << ',' << r.n << ',' << (r.exact ? 1 : 0) << ',' << fmt(r.accuracy) << ','
        << fmt(r.sra) << '\n';
  return out.str();
}

std::string summary_json(const shapestats::SummaryStats& stats) { return dump(summary_object(stats)); }

std::string validation_json(const shapestats::ValidationReport& report) {
  ordered_json j;
  j["real"] = summary_object(report.real);
  j["synthetic"] = summary_object(report.synth);
  ordered_json diff = ordered_json::object();
  for (int f = 0; f < shapestats::kFeatureCount; ++f)
    diff[std::string(shapestats::kFeatureNames[f])] = number(report.relative_mean_difference[f]);
  j["relative_mean_difference"] = diff;
  if (report.pooled_pca) {
    const auto& p = *report.pooled_pca;
    ordered_json pca;
    pca["eigenvalues"] = ordered_json::array();
    pca["explained_variance_ratio"] = ordered_json::array();
    pca["loadings"] = ordered_json::array();
    for (int c = 0; c < shapestats::kFeatureCount; ++c) {
      pca["eigenvalues"].push_back(number(p.eigenvalues[c]));
      pca["explained_variance_ratio"].push_back(number(p.explained_variance_ratio[c]));
      ordered_json row = ordered_json::array();
      for (double v : p.loadings[c]) row.push_back(number(v));
      pca["loadings"].push_back(row);
    }
    j["pca"] = pca;
    j["real_centroid"] = {number(report.real_centroid[0]), number(report.real_centroid[1])};
    j["synthetic_centroid"] = {number(report.synth_centroid[0]), number(report.synth_centroid[1])};
    j["centroid_gap_pooled_sd"] = number(report.centroid_gap_pooled_sd);
  } else {
    j["pca"] = nullptr;
    j["pca_note"] = report.pca_note;
  }
  return dump(j);
}

std::string features_csv(const std::vector<std::string>& ids, const std::vector<shapestats::ShapeFeatures>& features) {
  if (ids.size() != features.size()) throw DataError("feature rows and ids differ in length");
  std::ostringstream out;
  out << "id";
  for (auto name : shapestats::kFeatureNames) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ingest::csv_field(ids[i]);
    for (double v : features[i].as_array()) out << ',' << fmt(v);
    out << '\n';
  }
  return out.str();
}

std::string solution_json(const Solution& s) {
  ordered_json j;
  j["puzzle_id"] = s.puzzle_id;
  j["solver"] = s.solver;
  j["seed"] = s.seed;
  j["permutation"] = s.permutation;
  j["wall_ms"] = s.wall_ms ? number(*s.wall_ms) : ordered_json(nullptr);
  ordered_json diag = ordered_json::object();
  for (const auto& [k, v] : s.diagnostics) diag[k] = number(v);
  j["diagnostics"] = diag;
  return dump(j);
}

Solution parse_solution(const std::string& text) {
  Solution s;
  try {
    const auto j = nlohmann::json::parse(text);
    s.puzzle_id = j.at("puzzle_id").get<std::string>();
    s.solver = j.at("solver").get<std::string>();
    s.seed = j.value("seed", std::uint64_t{0});
    s.permutation = j.at("permutation").get<std::vector<int>>();
    if (j.contains("wall_ms") && j["wall_ms"].is_number()) s.wall_ms = j["wall_ms"].get<double>();
    if (j.contains("diagnostics"))
      for (const auto& [k, v] : j["diagnostics"].items())
        if (v.is_number()) s.diagnostics[k] = v.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("bad solution file: ") + e.what());
  }
  if (!puzzlegen::is_permutation(s.permutation)) throw SchemaError("solution permutation is not a bijection");
  return s;
}

std::string pca_scatter_svg(const shapestats::ValidationReport& report) {
  const int w = 480, h = 480, pad = 40;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!report.pooled_pca || report.pooled_pca->projected.empty()) {
    out << "<text x=\"" << pad << "\" y=\"" << h / 2 << "\">PCA unavailable</text>\n</svg>\n";
    return out.str();
  }
  const auto& pts = report.pooled_pca->projected;
  double lo_x = pts[0][0], hi_x = lo_x, lo_y = pts[0][1], hi_y = lo_y;
  for (const auto& p : pts) {
    lo_x = std::min(lo_x, p[0]), hi_x = std::max(hi_x, p[0]);
    lo_y = std::min(lo_y, p[1]), hi_y = std::max(hi_y, p[1]);
  }
  const double sx = (w - 2 * pad) / std::max(hi_x - lo_x, 1e-12);
  const double sy = (h - 2 * pad) / std::max(hi_y - lo_y, 1e-12);
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 8 << "\" text-anchor=\"middle\">PC1</text>\n";
  out << "<text x=\"12\" y=\"" << h / 2 << "\" transform=\"rotate(-90 12 " << h / 2 << ")\">PC2</text>\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool synth = i < report.group.size() && report.group[i] == 1;
    out << "<circle cx=\"" << svg_num(pad + (pts[i][0] - lo_x) * sx) << "\" cy=\""
        << svg_num(h - pad - (pts[i][1] - lo_y) * sy) << "\" r=\"2\" fill=\"" << (synth ? "#d95f02" : "#1b9e77")
        << "\" fill-opacity=\"0.6\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string metrics_bar_svg(const std::vector<eval::MetricsReport>& reports) {
  const int group_w = 120, bar_w = 30, h = 300, pad = 40;
  const int w = pad * 2 + group_w * static_cast<int>(std::max<std::size_t>(reports.size(), 1));
  const char* colours[3] = {"#1b9e77", "#d95f02", "#7570b3"};
  const char* labels[3] = {"PA", "AA", "SRA"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double scale = (h - 2 * pad) / 100.0;
  for (std::size_t g = 0; g < reports.size(); ++g) {
    const double values[3] = {reports[g].pa, reports[g].aa, reports[g].sra};
    const int x0 = pad + static_cast<int>(g) * group_w + 10;
    for (int b = 0; b < 3; ++b) {
      const double bh = std::clamp(values[b], 0.0, 100.0) * scale;
      out << "<rect x=\"" << x0 + b * bar_w << "\" y=\"" << svg_num(h - pad - bh) << "\" width=\"" << bar_w - 4
          << "\" height=\"" << svg_num(bh) << "\" fill=\"" << colours[b] << "\"><title>" << labels[b] << ' '
          << svg_num(values[b]) << "</title></rect>\n";
    }
    out << "<text x=\"" << x0 + bar_w * 3 / 2 << "\" y=\"" << h - pad + 16 << "\" text-anchor=\"middle\">"
        << reports[g].solver << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
  if (!f) throw DataError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace gap::report
