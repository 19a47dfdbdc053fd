// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gap/compat.hpp"
#include "gap/eval.hpp"
#include "gap/maskforge.hpp"
#include "gap/puzzlegen.hpp"
#include "gap/shapestats.hpp"
#include "gap/solve.hpp"
#include "oracles.hpp"

using namespace gap;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

struct Solvable {
  compat::CompatibilityTable table;
  puzzlegen::Permutation truth;
};

// Shuffled gradient puzzle with square pieces.
Solvable square_gradient(int k, std::uint64_t seed) {
  Rng rng(seed);
  const auto img = puzzlegen::gradient_image(rng, k * 128);
  const auto inst = puzzlegen::shuffle(
      puzzlegen::make_puzzle(img, puzzlegen::GridSpec::for_k(k), puzzlegen::square_masks(), rng), rng);
  std::vector<raster::RasterImage> images;
  for (const auto& p : inst.pieces) images.push_back(p.image);
  return {compat::compatibility_table(images), inst.ground_truth};
}

std::vector<Solvable> square_gradients(int k, std::uint64_t base, int count) {
  std::vector<Solvable> out(count);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) out[i] = square_gradient(k, derive_seed(base, static_cast<std::uint64_t>(i)));
  return out;
}

// ---------------------------------------------------------------- criteria

Outcome random_baseline() {
  const auto t0 = Clock::now();
  puzzlegen::DatasetConfig cfg;
  cfg.n = 2000;
  cfg.seed = 2024;
  cfg.masks = puzzlegen::square_masks();
  std::vector<eval::EvalItem> items(cfg.n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < cfg.n; ++i) {
    const auto inst = puzzlegen::generate_puzzle(cfg, i);
    Rng rng(derive_seed(99, inst.puzzle_id));
    items[i] = {inst.puzzle_id, 3, puzzlegen::random_permutation(9, rng), inst.ground_truth};
  }
  const auto report = eval::evaluate(items);
  const double expected_sra = 100.0 * oracle::exhaustive_random_sra(3);
  const double secs = seconds_since(t0);
  const bool ok = std::abs(report.aa - 100.0 / 9.0) <= 1.0 && std::abs(report.sra - expected_sra) <= 0.5 &&
                  report.sra >= 8.0 && report.sra <= 9.0 && secs < 60;
  return {ok, fmt("AA %.2f%% (target 11.11 +- 1), SRA %.2f%% (S9 oracle %.3f +- 0.5), %.1f s", report.aa, report.sra,
                  expected_sra, secs)};
}

Outcome flow_soundness() {
  const auto t0 = Clock::now();
  std::map<int, double> per_step_us;
  int solved_total = 0;
  for (int k : {3, 5}) {
    const int n = k * k;
    int solved = 0;
    double elapsed = 0;
    for (int p = 0; p < 500; ++p) {
      Rng rng(derive_seed(7000 + k, static_cast<std::uint64_t>(p)));
      const auto truth = puzzlegen::random_permutation(n, rng);
      const solve::OracleScorer scorer(truth);
      const auto s0 = Clock::now();
      const auto r = solve::flow_solve(scorer, {k, nullptr}, {20}, rng);
      elapsed += std::chrono::duration<double, std::micro>(Clock::now() - s0).count();
      solved += r.perm == truth;
    }
    per_step_us[n] = elapsed / (500.0 * 20.0);
    solved_total += solved;
    if (solved != 500) return {false, fmt("N=%g solved %g/500", n, solved)};
  }
  const double ratio = per_step_us[25] / per_step_us[9];
  const double secs = seconds_since(t0);
  return {solved_total == 1000 && ratio <= 12.0 && secs < 120,
          fmt("PA 100%% at N=9 and N=25; per-step %.2f us -> %.2f us (x%.2f, limit 12), %.1f s", per_step_us[9],
              per_step_us[25], ratio, secs)};
}

Outcome interpolation_marginals() {
  const auto t0 = Clock::now();
  std::vector<int> pi0(9), pi1(9);
  for (int i = 0; i < 9; ++i) pi0[i] = i, pi1[i] = (i + 4) % 9;
  double worst = 0;
  Rng rng(31);
  for (double t : {0.1, 0.5, 0.9}) {
    std::vector<int> hits(9, 0);
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) {
      const auto s = solve::sample_interpolant(pi0, pi1, t, rng);
      for (int i = 0; i < 9; ++i) hits[i] += s[i] == pi1[i];
    }
    for (int h : hits) worst = std::max(worst, std::abs(h / static_cast<double>(draws) - t));
  }
  const double secs = seconds_since(t0);
  return {worst <= 0.01 && secs < 30, fmt("max |rate - t| = %.4f (limit 0.01), %.1f s", worst, secs)};
}

Outcome gradient_check() {
  Rng rng(41);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 2;
    const auto f = square_gradient(k, derive_seed(4100, static_cast<std::uint64_t>(trial)));
    const solve::PuzzleContext ctx{k, &f.table};
    solve::LinearScorerParams params;
    for (auto& w : params.weights) w = rng.uniform(-2, 2);
    const double t = rng.uniform();
    const auto state = solve::sample_interpolant(puzzlegen::random_permutation(k * k, rng), f.truth, t, rng);
    std::array<double, solve::kLinearFeatureCount> grad{};
    solve::linear_cfm_loss_grad(params, ctx, state, f.truth, t, grad);
    for (int w = 0; w < solve::kLinearFeatureCount; ++w) {
      const double h = 1e-4;
      auto plus = params, minus = params;
      plus.weights[w] += h;
      minus.weights[w] -= h;
      const double fd = (solve::cfm_loss_at(solve::LinearScorer(plus), ctx, state, f.truth, t).sum -
                         solve::cfm_loss_at(solve::LinearScorer(minus), ctx, state, f.truth, t).sum) / (2 * h);
      worst = std::max(worst, std::abs(fd - grad[w]) / std::max({std::abs(fd), std::abs(grad[w]), 1e-6}));
    }
  }
  return {worst < 1e-4, fmt("max relative error %.2e over 20 configurations (limit 1e-4)", worst)};
}

Outcome learning_signal() {
  const auto t0 = Clock::now();
  const auto train_set = square_gradients(3, 5000, 200);
  const auto held_out = square_gradients(3, 6000, 50);
  std::vector<solve::TrainingPuzzle> train;
  for (const auto& s : train_set) train.push_back({3, s.table, s.truth});
  Rng rng(51);
  const auto trained = solve::train_linear_scorer(train, {}, rng);
  const solve::LinearScorer scorer(trained.params);
  std::vector<eval::EvalItem> items(held_out.size());
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    Rng solve_rng(derive_seed(52, static_cast<std::uint64_t>(i)));
    items[i] = {std::to_string(i), 3, solve::flow_solve(scorer, {3, &held_out[i].table}, {}, solve_rng).perm,
                held_out[i].truth};
  }
  const auto report = eval::evaluate(items);
  const double secs = seconds_since(t0);
  return {report.aa >= 100.0 / 9.0 + 10.0 && secs < 300,
          fmt("held-out AA %.2f%% (needs >= 21.11), final train loss %.3f, %.1f s", report.aa, trained.final_loss, secs)};
}

Outcome greedy_sanity() {
  const auto set = square_gradients(3, 8000, 50);
  double correct = 0;
  int violations = 0, solved = 0;
  for (const auto& s : set) {
    const auto r = solve::greedy_solve(s.table, 3);
    correct += eval::piece_accuracy(r.perm, s.truth);
    if (r.perm == s.truth) {
      ++solved;
      if (compat::bbm_of_permutation(r.perm, 3, s.table) < compat::bbm_of_permutation(s.truth, 3, s.table) - 1e-9)
        ++violations;
    }
  }
  const double aa = 100.0 * correct / set.size();
  return {aa >= 95.0 && violations == 0,
          fmt("AA %.2f%% (needs >= 95), %g/50 exact, BBM violations %g", aa, solved, violations)};
}

Outcome ga_contracts() {
  int solved = 0, nonmonotone = 0, invalid = 0;
  for (int run = 0; run < 100; ++run) {
    const auto s = square_gradient(2, derive_seed(9000, static_cast<std::uint64_t>(run)));
    Rng rng(derive_seed(9100, static_cast<std::uint64_t>(run)));
    const auto r = solve::ga_solve(s.table, 2, {}, rng, [&](int, const std::vector<std::vector<int>>& pop) {
      for (const auto& ind : pop) invalid += !puzzlegen::is_permutation(ind) || ind.size() != 4;
    });
    for (std::size_t g = 1; g < r.trace.size(); ++g) nonmonotone += r.trace[g] < r.trace[g - 1];
    solved += r.perm == s.truth;
  }
  // operator closure
  Rng rng(92);
  auto p = puzzlegen::random_permutation(16, rng);
  auto q = puzzlegen::random_permutation(16, rng);
  int bad_ops = 0;
  for (int op = 0; op < 100000; ++op) {
    switch (op % 4) {
      case 0: solve::mutate_swap(p, rng); break;
      case 1: solve::mutate_inversion(p, rng); break;
      case 2: solve::mutate_scramble(p, rng); break;
      default: {
        const int a = static_cast<int>(rng.uniform_index(16));
        const int b = a + 1 + static_cast<int>(rng.uniform_index(16 - a));
        q = solve::pmx_crossover(p, q, a, b);
        bad_ops += !puzzlegen::is_permutation(q);
      }
    }
    bad_ops += !puzzlegen::is_permutation(p);
  }
  return {solved >= 99 && nonmonotone == 0 && invalid == 0 && bad_ops == 0,
          fmt("2x2 solved %g/100, non-monotone steps %g, invalid individuals %g, bad operator results %g", solved,
              nonmonotone, invalid, bad_ops)};
}

Outcome mask_pipeline() {
  const auto masks = maskforge::sample_masks(8, 1000, 128, {});
  int bad = 0, not_idempotent = 0;
  for (const auto& m : masks) {
    const auto t = oracle::topology(m);
    bad += t.components != 1 || t.holes != 0;
    not_idempotent += !(maskforge::postprocess(m) == m);
  }
  return {bad == 0 && not_idempotent == 0,
          fmt("1000 masks: %g fail flood-fill check, %g change under re-processing", bad, not_idempotent)};
}

Outcome shape_features() {
  maskforge::BinaryMask disk(128);
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x)
      if ((x - 64.0) * (x - 64.0) + (y - 64.0) * (y - 64.0) <= 1600.0) disk.set(x, y);
  const auto f = shapestats::extract_features(disk);
  const double area_err = std::abs(f.area - M_PI * 1600) / (M_PI * 1600);
  double worst = 0;
  for (const auto& g : shapestats::extract_features_batch(maskforge::sample_masks(9, 1000, 128, {})))
    worst = std::max(worst, std::abs(g.circularity * g.compactness - 4 * M_PI));
  return {area_err <= 0.02 && f.circularity >= 0.95 && f.circularity <= 1.02 && f.solidity >= 0.98 && worst <= 1e-9,
          fmt("disk area err %.4f, circularity %.4f, solidity %.4f; max |circ*comp - 4pi| %.1e", area_err,
              f.circularity, f.solidity, worst)};
}

Outcome pca_check() {
  Rng rng(10);
  double worst_eig = 0, worst_sum = 0;
  bool descending = true;
  for (int trial = 0; trial < 50; ++trial) {
    shapestats::FeatureMatrix m(200);
    for (auto& row : m) {
      const double z = rng.normal();
      for (int c = 0; c < shapestats::kFeatureCount; ++c) row[c] = rng.normal() + 0.3 * c * z;
    }
    const auto p = shapestats::pca(m);
    const auto ref = oracle::eigenvalues(oracle::correlation(m));
    double sum = 0;
    for (int c = 0; c < shapestats::kFeatureCount; ++c) {
      worst_eig = std::max(worst_eig, std::abs(p.eigenvalues[c] - ref[c]));
      if (c > 0 && p.explained_variance_ratio[c] > p.explained_variance_ratio[c - 1]) descending = false;
      sum += p.explained_variance_ratio[c];
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  return {worst_eig <= 1e-6 && worst_sum <= 1e-9 && descending,
          fmt("max eigenvalue gap %.1e vs dense oracle, max |sum - 1| %.1e, descending %g", worst_eig, worst_sum,
              descending)};
}

Outcome metric_identities() {
  const puzzlegen::Permutation id = puzzlegen::identity_permutation(9);
  const puzzlegen::Permutation swapped = {1, 0, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<puzzlegen::Permutation> ids{id}, sw{swapped};
  const double pa = eval::perfect_accuracy(ids, ids), aa = eval::absolute_accuracy(ids, ids);
  const double s = eval::sra(id, id, 3);
  const double swap_aa = eval::absolute_accuracy(sw, ids), swap_sra = eval::sra(swapped, id, 3);
  const bool ok = pa == 100.0 && aa == 100.0 && s == 1.0 && std::abs(swap_aa - 700.0 / 9.0) < 1e-12 &&
                  swap_sra == 8.0 / 12.0 && std::abs(swap_sra - oracle::sra(swapped, id, 3)) == 0.0;
  return {ok, fmt("identity PA %.0f, AA %.0f, SRA %.1f; ", pa, aa, s) +
                  fmt("adjacent swap AA %.2f%%, SRA %.4f (8/12 = %.4f)", swap_aa, swap_sra, 8.0 / 12.0)};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + GAP_CLI_PATH + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) {
      std::ifstream f(e.path(), std::ios::binary);
      out[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(f), {}};
    }
  return out;
}

Outcome reproducibility() {
  const fs::path root = fs::temp_directory_path() / "gap_acceptance_repro";
  fs::remove_all(root);
  std::vector<std::string> differing;
  for (const char* run : {"a", "b"})
    if (run_cli("generate --n 6 --k 3 --seed 12 --out " + (root / run / "data").string()) != 0)
      return {false, "generate failed"};
  if (tree(root / "a" / "data") != tree(root / "b" / "data")) differing.push_back("generate");
  const std::vector<std::pair<std::string, std::string>> solvers = {
      {"greedy", "--solver greedy --seed 3"},
      {"ga", "--solver ga --seed 3 --generations 100"},
      {"flow-neighbor", "--solver flow --scorer neighbor --seed 3"},
      {"flow-oracle", "--solver flow --scorer oracle --seed 3"},
      {"random", "--solver random --seed 3"}};
  for (const auto& [name, flags] : solvers) {
    for (const char* run : {"a", "b"})
      if (run_cli("solve " + flags + " --data " + (root / "a" / "data").string() + " --out " +
                  (root / run / name).string()) != 0)
        return {false, "solve " + name + " failed"};
    if (tree(root / "a" / name) != tree(root / "b" / name)) differing.push_back(name);
  }
  fs::remove_all(root);
  std::string detail = "generate + 5 solver configurations compared byte-for-byte";
  for (const auto& d : differing) detail += "; differs: " + d;
  return {differing.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"random baseline", random_baseline},
      {"flow engine soundness", flow_soundness},
      {"interpolation marginals", interpolation_marginals},
      {"gradient correctness", gradient_check},
      {"learning signal", learning_signal},
      {"greedy solver sanity", greedy_sanity},
      {"GA contracts", ga_contracts},
      {"mask pipeline", mask_pipeline},
      {"shape features", shape_features},
      {"PCA", pca_check},
      {"metric identities", metric_identities},
      {"reproducibility", reproducibility}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
