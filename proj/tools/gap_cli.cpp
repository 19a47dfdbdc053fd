// gap: dataset generation, solving and evaluation front end.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gap/compat.hpp"
#include "gap/error.hpp"
#include "gap/eval.hpp"
#include "gap/ingest.hpp"
#include "gap/maskforge.hpp"
#include "gap/puzzlegen.hpp"
#include "gap/raster.hpp"
#include "gap/report.hpp"
#include "gap/rng.hpp"
#include "gap/shapestats.hpp"
#include "gap/solve.hpp"
#include "json_config.hpp"

namespace fs = std::filesystem;
using namespace gap;

namespace {

struct Options {
  std::string config;
  int workers = 0;
  std::optional<std::uint64_t> seed;
  std::string out;

  // fetch
  std::string ids_file;
  std::string id_range;
  int n_target = 0;
  int fetch_workers = 20;
  int retries = 4;

  // masks
  int count = 1000;
  int side = puzzlegen::kPieceSide;
  std::string import_dir;

  // generate
  int n = 10;
  int k = 3;
  int canvas = 0;
  std::string sources;
  std::string masks = "procedural";
  double train = 0.70, val = 0.15, test = 0.15;

  // features / stats-compare
  std::string mask_dir;
  std::string real_dir;
  std::string synth_dir;

  // solve / train / eval / render
  std::string data;
  std::string split = "all";
  std::string solver = "greedy";
  std::string scorer = "oracle";
  std::string params;
  int steps = 20;
  bool record_timing = false;
  solve::GaConfig ga;
  int epochs = 30;
  double learning_rate = 0.5;
  std::string solutions;
  std::string puzzle;
  std::string solution;
};

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1])});
      diag = up;
    }
  }
  return row[b.size()];
}

std::vector<std::string> long_names(const CLI::App* app) {
  std::vector<std::string> names;
  for (const CLI::App* a = app; a; a = a->get_parent())
    for (const CLI::Option* opt : a->get_options())
      for (const auto& name : opt->get_lnames()) names.push_back("--" + name);
  return names;
}

[[noreturn]] void unknown_flag(const std::string& arg, const CLI::App* app) {
  const std::string flag = arg.substr(0, arg.find('='));
  std::string best;
  std::size_t best_d = 4;
  for (const auto& name : long_names(app)) {
    const std::size_t d = levenshtein(flag, name);
    if (d < best_d) best_d = d, best = name;
  }
  std::string msg = "unknown argument '" + flag + "'";
  if (!best.empty()) msg += "; did you mean '" + best + "'?";
  throw UsageError(msg);
}

std::uint64_t require_seed(const Options& o, const std::string& what) {
  if (!o.seed) throw UsageError(what + " is stochastic; --seed is required");
  return *o.seed;
}

fs::path require_out(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  return o.out;
}

std::vector<fs::path> list_files(const fs::path& dir, std::initializer_list<const char*> exts) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (std::find(exts.begin(), exts.end(), ext) != exts.end()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string mask_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "mask_%05d.png", i);
  return buf;
}

void write_mask_set(const fs::path& out, const std::vector<maskforge::BinaryMask>& masks,
                    const std::vector<std::string>& names) {
  fs::create_directories(out);
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < masks.size(); ++i) {
    maskforge::save_mask_png(out / names[i], masks[i]);
    if (!maskforge::satisfies_postprocess_invariants(masks[i])) failures.push_back(names[i]);
  }
  nlohmann::ordered_json j;
  j["count"] = masks.size();
  j["valid"] = masks.size() - failures.size();
  j["failures"] = failures;
  report::write_text(out / "validation.json", j.dump(2) + "\n");
  std::cout << "wrote " << masks.size() << " masks to " << out.string() << " (" << failures.size()
            << " invalid)\n";
}

// ---------------------------------------------------------------- commands

void cmd_fetch(const Options& o) {
  const fs::path out = require_out(o);
  std::vector<long> ids;
  if (!o.ids_file.empty()) {
    std::ifstream f(o.ids_file);
    if (!f) throw UsageError("cannot read " + o.ids_file);
    long id;
    while (f >> id) ids.push_back(id);
  } else if (!o.id_range.empty()) {
    const auto dash = o.id_range.find('-');
    if (dash == std::string::npos) throw UsageError("--ids expects FIRST-LAST");
    const long lo = std::stol(o.id_range.substr(0, dash)), hi = std::stol(o.id_range.substr(dash + 1));
    if (lo < 1 || hi < lo) throw UsageError("bad --ids range");
    for (long id = lo; id <= hi; ++id) ids.push_back(id);
  } else {
    throw UsageError("fetch needs --ids-file or --ids");
  }
  ingest::CollectConfig cfg;
  cfg.n_target = o.n_target;
  cfg.workers = o.fetch_workers;
  cfg.retry.max_tries = o.retries;
  cfg.base_url = ingest::base_url_from_env();
  ingest::HttpTransport transport;
  const auto manifest = ingest::collect(transport, ids, out, cfg);
  std::cout << "accepted " << manifest.entries.size() << ", rejected " << manifest.rejected << ", failed "
            << manifest.failed << "\n";
}

void cmd_masks(const Options& o) {
  const fs::path out = require_out(o);
  std::vector<maskforge::BinaryMask> masks;
  std::vector<std::string> names;
  if (!o.import_dir.empty()) {
    for (const auto& path : list_files(o.import_dir, {".png"})) {
      masks.push_back(maskforge::import_mask(path));
      names.push_back(path.filename().string());
    }
  } else {
    masks = maskforge::sample_masks(require_seed(o, "masks"), o.count, o.side, {});
    for (int i = 0; i < o.count; ++i) names.push_back(mask_name(i));
  }
  write_mask_set(out, masks, names);
}

puzzlegen::MaskProvider mask_provider(const Options& o) {
  if (o.masks == "procedural") return puzzlegen::procedural_masks();
  if (o.masks == "square") return puzzlegen::square_masks();
  std::vector<maskforge::BinaryMask> pool;
  for (const auto& path : list_files(o.masks, {".png"})) pool.push_back(maskforge::import_mask(path));
  if (pool.empty()) throw DataError("no masks in " + o.masks);
  return puzzlegen::pooled_masks(std::move(pool));
}

void cmd_generate(const Options& o) {
  puzzlegen::DatasetConfig cfg;
  cfg.n = o.n;
  cfg.grid = puzzlegen::GridSpec::for_k(o.k);
  if (o.canvas > 0) cfg.grid.canvas = o.canvas;
  cfg.grid.validate();
  cfg.seed = require_seed(o, "generate");
  cfg.ratios = {o.train, o.val, o.test};
  if (!o.sources.empty()) cfg.sources = list_files(o.sources, {".png", ".jpg", ".jpeg"});
  cfg.masks = mask_provider(o);
  const auto entries = puzzlegen::generate_dataset(require_out(o), cfg);
  std::map<std::string, int> per_split;
  for (const auto& e : entries) ++per_split[puzzlegen::to_string(e.split)];
  std::cout << "generated " << entries.size() << " puzzles:";
  for (const auto& [s, c] : per_split) std::cout << ' ' << s << '=' << c;
  std::cout << "\n";
}

std::vector<shapestats::ShapeFeatures> features_of_dir(const fs::path& dir, std::vector<std::string>* ids) {
  std::vector<maskforge::BinaryMask> masks;
  for (const auto& path : list_files(dir, {".png"})) {
    masks.push_back(maskforge::import_mask(path));
    if (ids) ids->push_back(path.filename().string());
  }
  if (masks.empty()) throw DataError("no masks in " + dir.string());
  return shapestats::extract_features_batch(masks);
}

void cmd_features(const Options& o) {
  const fs::path out = require_out(o);
  std::vector<std::string> ids;
  const auto features = features_of_dir(o.mask_dir, &ids);
  report::write_text(out / "features.csv", report::features_csv(ids, features));
  report::write_text(out / "summary.json", report::summary_json(shapestats::summarize(features)));
  std::cout << "features for " << features.size() << " masks\n";
}

void cmd_stats_compare(const Options& o) {
  const fs::path out = require_out(o);
  const auto real = features_of_dir(o.real_dir, nullptr);
  const auto synth = features_of_dir(o.synth_dir, nullptr);
  const auto rep = shapestats::compare_distributions(real, synth);
  report::write_text(out / "validation.json", report::validation_json(rep));
  report::write_text(out / "pca.svg", report::pca_scatter_svg(rep));
  if (rep.pooled_pca)
    std::cout << "centroid gap " << rep.centroid_gap_pooled_sd << " pooled sd\n";
  else
    std::cout << "pca skipped: " << rep.pca_note << "\n";
}

std::vector<puzzlegen::PuzzleInstance> load_puzzles(const Options& o) {
  if (o.data.empty()) throw UsageError("--data is required");
  std::vector<puzzlegen::PuzzleInstance> out;
  for (const auto& dir : puzzlegen::find_puzzles(o.data)) {
    auto inst = puzzlegen::read_manifest(dir);
    if (o.split == "all" || puzzlegen::to_string(inst.split) == o.split) out.push_back(std::move(inst));
  }
  if (out.empty()) throw DataError("no puzzles under " + o.data + " for split " + o.split);
  return out;
}

compat::CompatibilityTable table_of(const puzzlegen::PuzzleInstance& inst) {
  std::vector<raster::RasterImage> images;
  for (const auto& p : inst.pieces) images.push_back(p.image);
  return compat::compatibility_table(images);
}

void cmd_solve(const Options& o) {
  const fs::path out = require_out(o);
  const bool stochastic = o.solver != "greedy";
  const std::uint64_t seed = stochastic ? require_seed(o, "solver " + o.solver) : o.seed.value_or(0);
  std::optional<solve::LinearScorerParams> params;
  if (o.solver == "flow" && o.scorer == "linear") {
    if (o.params.empty()) throw UsageError("--scorer linear needs --params");
    params = solve::load_params(o.params);
  }
  o.ga.validate();
  solve::FlowConfig flow_cfg{o.steps};
  flow_cfg.validate();

  const auto puzzles = load_puzzles(o);
  std::vector<report::Solution> solutions(puzzles.size());
  std::vector<std::string> errors(puzzles.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t p = 0; p < puzzles.size(); ++p) {
    try {
      const auto& inst = puzzles[p];
      const int k = inst.grid.k;
      const auto start = std::chrono::steady_clock::now();
      auto table = inst.pieces.size() > 1 ? table_of(inst) : compat::CompatibilityTable();
      Rng rng(derive_seed(seed, inst.puzzle_id));
      report::Solution s{inst.puzzle_id, o.solver, seed, {}, std::nullopt, {}};
      if (k == 1) {
        s.permutation = {0};
      } else if (o.solver == "greedy") {
        const auto r = solve::greedy_solve(table, k);
        s.permutation = r.perm;
        s.diagnostics["refinements"] = r.refinements;
      } else if (o.solver == "ga") {
        const auto r = solve::ga_solve(table, k, o.ga, rng);
        s.permutation = r.perm;
        s.diagnostics["best_fitness"] = r.best_fitness;
        s.diagnostics["generations"] = r.generations;
      } else if (o.solver == "flow") {
        std::unique_ptr<solve::Scorer> scorer;
        if (o.scorer == "oracle")
          scorer = std::make_unique<solve::OracleScorer>(inst.ground_truth);
        else if (o.scorer == "neighbor")
          scorer = std::make_unique<solve::NeighborCompatScorer>();
        else
          scorer = std::make_unique<solve::LinearScorer>(*params);
        s.permutation = solve::flow_solve(*scorer, {k, &table}, flow_cfg, rng).perm;
      } else {
        s.permutation = puzzlegen::random_permutation(k * k, rng);
      }
      if (k > 1) s.diagnostics["bbm"] = compat::bbm_of_permutation(s.permutation, k, table);
      if (o.record_timing)
        s.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      solutions[p] = std::move(s);
    } catch (const std::exception& e) {
      errors[p] = puzzles[p].puzzle_id + ": " + e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw DataError(e);

  std::vector<eval::EvalItem> items;
  for (std::size_t p = 0; p < puzzles.size(); ++p) {
    report::write_text(out / "solutions" / (solutions[p].puzzle_id + ".json"), report::solution_json(solutions[p]));
    items.push_back({puzzles[p].puzzle_id, puzzles[p].grid.k, solutions[p].permutation, puzzles[p].ground_truth});
  }
  auto metrics = eval::evaluate(items);
  metrics.solver = o.solver == "flow" ? "flow-" + o.scorer : o.solver;
  report::write_text(out / "metrics.json", report::metrics_json(metrics));
  report::write_text(out / "metrics.csv", report::metrics_csv(metrics));
  std::cout << metrics.solver << ": n=" << metrics.n_puzzles << " PA=" << metrics.pa << " AA=" << metrics.aa
            << " SRA=" << metrics.sra << "\n";
}

void cmd_train(const Options& o) {
  const std::uint64_t seed = require_seed(o, "train-scorer");
  const auto puzzles = load_puzzles(o);
  std::vector<solve::TrainingPuzzle> train(puzzles.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t p = 0; p < puzzles.size(); ++p)
    train[p] = {puzzles[p].grid.k, table_of(puzzles[p]), puzzles[p].ground_truth};
  Rng rng(seed);
  const auto result = solve::train_linear_scorer(train, {o.epochs, o.learning_rate}, rng);
  solve::save_params(require_out(o), result.params);
  std::cout << "trained on " << train.size() << " puzzles, final loss " << result.final_loss << "\n";
}

void cmd_eval(const Options& o) {
  const fs::path out = require_out(o);
  if (o.solutions.empty()) throw UsageError("--solutions is required");
  std::map<std::string, puzzlegen::PuzzleInstance> truth;
  for (auto& inst : load_puzzles(o)) truth.emplace(inst.puzzle_id, std::move(inst));
  std::vector<eval::EvalItem> items;
  std::string solver;
  for (const auto& path : list_files(o.solutions, {".json"})) {
    const auto s = report::parse_solution(report::read_text(path));
    const auto it = truth.find(s.puzzle_id);
    if (it == truth.end()) throw DataError("no puzzle " + s.puzzle_id + " under " + o.data);
    if (solver.empty()) solver = s.solver;
    items.push_back({s.puzzle_id, it->second.grid.k, s.permutation, it->second.ground_truth});
  }
  if (items.empty()) throw DataError("no solution files in " + o.solutions);
  auto metrics = eval::evaluate(items);
  metrics.solver = solver;
  report::write_text(out / "metrics.json", report::metrics_json(metrics));
  report::write_text(out / "metrics.csv", report::metrics_csv(metrics));
  report::write_text(out / "metrics.svg", report::metrics_bar_svg({metrics}));
  std::cout << "PA=" << metrics.pa << " AA=" << metrics.aa << " SRA=" << metrics.sra << "\n";
}

// Scrambled layout (pieces in stored order) beside the solution, or beside the
// ground truth when no solution is given.
void cmd_render(const Options& o) {
  if (o.puzzle.empty()) throw UsageError("--puzzle is required");
  const auto inst = puzzlegen::read_manifest(o.puzzle);
  puzzlegen::Permutation right = inst.ground_truth;
  if (!o.solution.empty()) {
    right = report::parse_solution(report::read_text(o.solution)).permutation;
    puzzlegen::require_permutation(right, inst.pieces.size());
  }
  const auto left_img = puzzlegen::render_layout(inst, puzzlegen::identity_permutation(inst.grid.size()));
  const auto right_img = puzzlegen::render_layout(inst, right);
  const int gap = 16, c = inst.grid.canvas;
  raster::RasterImage composite(2 * c + gap, c, 4);
  for (int y = 0; y < c; ++y)
    for (int x = 0; x < c; ++x)
      for (int ch = 0; ch < 4; ++ch) {
        composite.at(x, y, ch) = left_img.at(x, y, ch);
        composite.at(x + c + gap, y, ch) = right_img.at(x, y, ch);
      }
  raster::save_png(require_out(o), composite);
}

void add_seed(CLI::App* sub, Options& o) {
  sub->add_option_function<std::uint64_t>("--seed", [&o](const std::uint64_t& v) { o.seed = v; },
                                          "Random seed (required when stochastic)");
}

int run(int argc, char** argv) {
  Options o;
  CLI::App app{"Irregular-fragment jigsaw puzzle toolkit", "gap"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config, "JSON file mirroring the flags; flags override it");
  app.add_option("--workers", o.workers, "Thread count for parallel kernels")->check(CLI::PositiveNumber);

  auto* fetch = app.add_subcommand("fetch", "Collect public-domain images from the MET API");
  fetch->add_option("--ids-file", o.ids_file, "File of object ids, whitespace separated");
  fetch->add_option("--ids", o.id_range, "Id range FIRST-LAST");
  fetch->add_option("--n", o.n_target, "Number of images to keep")->required();
  fetch->add_option("--concurrency", o.fetch_workers, "Requests in flight");
  fetch->add_option("--retries", o.retries, "Tries per request");
  fetch->add_option("--out", o.out, "Corpus directory");

  auto* masks = app.add_subcommand("masks", "Sample or import fragment masks");
  add_seed(masks, o);
  masks->add_option("--count", o.count, "Procedural masks to sample")->check(CLI::NonNegativeNumber);
  masks->add_option("--side", o.side, "Mask side in pixels")->check(CLI::PositiveNumber);
  masks->add_option("--import", o.import_dir, "Postprocess PNG masks from this directory instead");
  masks->add_option("--out", o.out, "Output directory");

  auto* generate = app.add_subcommand("generate", "Build a puzzle dataset with splits");
  add_seed(generate, o);
  generate->add_option("--n", o.n, "Number of puzzles")->check(CLI::PositiveNumber);
  generate->add_option("--k", o.k, "Grid side")->check(CLI::PositiveNumber);
  generate->add_option("--canvas", o.canvas, "Canvas side (default: per k)");
  generate->add_option("--sources", o.sources, "Directory of source images (default: gradients)");
  generate->add_option("--masks", o.masks, "procedural, square, or a directory of mask PNGs");
  generate->add_option("--train", o.train, "Train ratio");
  generate->add_option("--val", o.val, "Validation ratio");
  generate->add_option("--test", o.test, "Test ratio");
  generate->add_option("--out", o.out, "Dataset root");

  auto* features = app.add_subcommand("features", "Shape features of a mask directory");
  features->add_option("--masks", o.mask_dir, "Mask directory")->required();
  features->add_option("--out", o.out, "Output directory");

  auto* compare = app.add_subcommand("stats-compare", "Compare real and synthetic mask statistics");
  compare->add_option("--real", o.real_dir, "Reference mask directory")->required();
  compare->add_option("--synth", o.synth_dir, "Synthetic mask directory")->required();
  compare->add_option("--out", o.out, "Output directory");

  auto* solve_cmd = app.add_subcommand("solve", "Solve every puzzle in a dataset");
  add_seed(solve_cmd, o);
  solve_cmd->add_option("--data", o.data, "Dataset root");
  solve_cmd->add_option("--split", o.split, "train, val, test or all")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  solve_cmd->add_option("--solver", o.solver, "greedy, ga, flow or random")
      ->check(CLI::IsMember({"greedy", "ga", "flow", "random"}));
  solve_cmd->add_option("--scorer", o.scorer, "Flow scorer: oracle, neighbor or linear")
      ->check(CLI::IsMember({"oracle", "neighbor", "linear"}));
  solve_cmd->add_option("--params", o.params, "Linear scorer parameters");
  solve_cmd->add_option("--steps", o.steps, "Flow steps");
  solve_cmd->add_option("--population", o.ga.population, "GA population");
  solve_cmd->add_option("--generations", o.ga.generations, "GA generations");
  solve_cmd->add_option("--patience", o.ga.early_stop_patience, "GA early-stop patience");
  solve_cmd->add_option("--mutation-rate", o.ga.mutation_rate, "GA mutation rate");
  solve_cmd->add_option("--crossover-rate", o.ga.crossover_rate, "GA crossover rate");
  solve_cmd->add_option("--tournament", o.ga.tournament_size, "GA tournament size");
  solve_cmd->add_option("--elitism", o.ga.elitism_ratio, "GA elite fraction");
  solve_cmd->add_flag("--record-timing", o.record_timing, "Store wall time in solutions");
  solve_cmd->add_option("--out", o.out, "Output directory");

  auto* train = app.add_subcommand("train-scorer", "Fit the linear flow scorer");
  add_seed(train, o);
  train->add_option("--data", o.data, "Dataset root");
  train->add_option("--split", o.split, "Split to train on")->check(CLI::IsMember({"train", "val", "test", "all"}));
  train->add_option("--epochs", o.epochs, "Epochs")->check(CLI::NonNegativeNumber);
  train->add_option("--lr", o.learning_rate, "Learning rate");
  train->add_option("--out", o.out, "Parameter file");

  auto* evaluate = app.add_subcommand("eval", "Metrics over solution files");
  evaluate->add_option("--data", o.data, "Dataset root");
  evaluate->add_option("--split", o.split, "Split")->check(CLI::IsMember({"train", "val", "test", "all"}));
  evaluate->add_option("--solutions", o.solutions, "Directory of solution JSON files");
  evaluate->add_option("--out", o.out, "Output directory");

  auto* render = app.add_subcommand("render", "Scrambled and solved composite PNG");
  render->add_option("--puzzle", o.puzzle, "Puzzle directory");
  render->add_option("--solution", o.solution, "Solution JSON (default: ground truth)");
  render->add_option("--out", o.out, "Output PNG");

  app.allow_extras();
  for (CLI::App* sub : app.get_subcommands({})) sub->allow_extras();

  // Splice config tokens in right after the subcommand so later flags win.
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] != "--config" && args[i].rfind("--config=", 0) != 0) continue;
    const bool inline_value = args[i] != "--config";
    if (!inline_value && i + 1 >= args.size()) throw UsageError("--config needs a path");
    const std::string path = inline_value ? args[i].substr(9) : args[i + 1];
    args.erase(args.begin() + i, args.begin() + i + (inline_value ? 1 : 2));
    const std::string sub = args.empty() ? "" : args[0];
    const auto extra = cli::config_to_args(path, sub);
    args.insert(args.begin() + (args.empty() ? 0 : 1), extra.begin(), extra.end());
    break;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (app.get_subcommands().empty()) throw UsageError("a subcommand is required; see --help");
  CLI::App* active = app.get_subcommands().front();
  if (const auto extra = app.remaining(true); !extra.empty()) unknown_flag(extra.front(), active);
  if (o.workers > 0) omp_set_num_threads(o.workers);

  const std::string name = active->get_name();
  if (name == "fetch") cmd_fetch(o);
  else if (name == "masks") cmd_masks(o);
  else if (name == "generate") cmd_generate(o);
  else if (name == "features") cmd_features(o);
  else if (name == "stats-compare") cmd_stats_compare(o);
  else if (name == "solve") cmd_solve(o);
  else if (name == "train-scorer") cmd_train(o);
  else if (name == "eval") cmd_eval(o);
  else if (name == "render") cmd_render(o);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gap::Error& e) {
    std::cerr << "gap: " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    std::cerr << "gap: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kData);
  } catch (const std::exception& e) {
    std::cerr << "gap: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kData);
  }
}
