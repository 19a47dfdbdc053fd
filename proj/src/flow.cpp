#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "gap/error.hpp"
#include "gap/solve.hpp"

namespace gap::solve {

using compat::Direction;
using compat::kDirections;

void OracleScorer::logits(const PuzzleContext& ctx, std::span<const int>, double, std::vector<double>& out) const {
  const int n = ctx.size();
  out.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i) * n + truth_[i]] = margin_;
}

void ConstantScorer::logits(const PuzzleContext& ctx, std::span<const int>, double, std::vector<double>& out) const {
  out.assign(static_cast<std::size_t>(ctx.size()) * ctx.size(), value_);
}

namespace {

// occupants[pos] lists the pieces whose state entry is pos.
std::vector<std::vector<int>> occupancy(std::span<const int> state, int n) {
  std::vector<std::vector<int>> occ(n);
  for (int i = 0; i < static_cast<int>(state.size()); ++i) occ[state[i]].push_back(i);
  return occ;
}

int neighbor(int pos, int k, Direction d) {
  const int x = pos % k + compat::dx(d), y = pos / k + compat::dy(d);
  return x < 0 || y < 0 || x >= k || y >= k ? -1 : y * k + x;
}

const compat::CompatibilityTable& require_table(const PuzzleContext& ctx) {
  if (!ctx.table || ctx.table->size() != ctx.size())
    throw DataError("scorer needs a compatibility table matching the grid");
  return *ctx.table;
}

}  // namespace

void NeighborCompatScorer::logits(const PuzzleContext& ctx, std::span<const int> state, double,
                                  std::vector<double>& out) const {
  const int n = ctx.size();
  out.assign(static_cast<std::size_t>(n) * n, 0.0);
  if (n == 1) return;
  const auto& table = require_table(ctx);
  const auto occ = occupancy(state, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double sum = 0.0;
      int count = 0;
      for (Direction d : kDirections) {
        const int q = neighbor(j, ctx.k, d);
        if (q < 0) continue;
        for (int m : occ[q])
          if (m != i) sum += table.c(i, m, d), ++count;
      }
      out[static_cast<std::size_t>(i) * n + j] = count ? sum / count : 0.0;
    }
  }
}

void linear_features(const PuzzleContext& ctx, std::span<const int> state, double t, std::vector<double>& phi) {
  const int n = ctx.size();
  phi.assign(static_cast<std::size_t>(n) * n * kLinearFeatureCount, 0.0);
  const compat::CompatibilityTable* table = n > 1 ? &require_table(ctx) : nullptr;
  const auto occ = occupancy(state, n);
  // Mean compatibility of each piece per direction, subtracted so that an
  // average neighbour and a missing one both contribute 0.
  std::vector<double> base(4 * static_cast<std::size_t>(n), 0.0);
  std::vector<double> edge(4 * static_cast<std::size_t>(n), 0.0);
  if (table)
    for (int i = 0; i < n; ++i)
      for (Direction d : kDirections) {
        double s = 0.0, best = 0.0;
        for (int m = 0; m < n; ++m)
          if (m != i) s += table->c(i, m, d), best = std::max(best, table->c(i, m, d));
        base[i * 4 + static_cast<int>(d)] = s / (n - 1);
        edge[i * 4 + static_cast<int>(d)] = s / (n - 1) - best;
      }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double* f = &phi[(static_cast<std::size_t>(i) * n + j) * kLinearFeatureCount];
      for (Direction d : kDirections) {
        const int q = neighbor(j, ctx.k, d);
        if (q < 0) {
          f[static_cast<int>(d)] = edge[i * 4 + static_cast<int>(d)];
          continue;
        }
        double sum = 0.0;
        int count = 0;
        for (int m : occ[q])
          if (m != i) sum += table->c(i, m, d), ++count;
        f[static_cast<int>(d)] = count ? sum / count - base[i * 4 + static_cast<int>(d)] : 0.0;
      }
      f[4] = state[i] == j ? 1.0 : 0.0;
      f[5] = t;
      f[6] = 1.0;
    }
  }
}

void LinearScorer::logits(const PuzzleContext& ctx, std::span<const int> state, double t,
                          std::vector<double>& out) const {
  std::vector<double> phi;
  linear_features(ctx, state, t, phi);
  const std::size_t cells = static_cast<std::size_t>(ctx.size()) * ctx.size();
  out.assign(cells, 0.0);
  for (std::size_t c = 0; c < cells; ++c)
    for (int f = 0; f < kLinearFeatureCount; ++f) out[c] += params_.weights[f] * phi[c * kLinearFeatureCount + f];
}

void save_params(const std::filesystem::path& path, const LinearScorerParams& params) {
  nlohmann::ordered_json j;
  j["feature_version"] = params.feature_version;
  j["features"] = {"compat_left", "compat_right", "compat_up", "compat_down", "stay", "t", "bias"};
  j["weights"] = params.weights;
  const std::string text = j.dump(2) + "\n";
  raster::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

LinearScorerParams load_params(const std::filesystem::path& path) {
  const auto bytes = raster::read_file(path);
  try {
    const auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
    LinearScorerParams p;
    p.feature_version = j.at("feature_version").get<int>();
    if (p.feature_version != kLinearFeatureVersion) throw SchemaVersionError(p.feature_version, kLinearFeatureVersion);
    const auto w = j.at("weights").get<std::vector<double>>();
    if (w.size() != kLinearFeatureCount) throw SchemaError("scorer weights must have 7 entries");
    for (int f = 0; f < kLinearFeatureCount; ++f) {
      if (!std::isfinite(w[f])) throw SchemaError("scorer weights must be finite");
      p.weights[f] = w[f];
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void FlowConfig::validate() const {
  if (steps < 1) throw ConfigError("flow steps must be >= 1");
}

std::vector<int> sample_interpolant(std::span<const int> pi0, std::span<const int> pi1, double t, Rng& rng) {
  if (!(t >= 0.0 && t <= 1.0)) throw UsageError("interpolation time must lie in [0, 1]");
  if (pi0.size() != pi1.size()) throw UsageError("source and target permutations differ in length");
  std::vector<int> out(pi0.size());
  for (std::size_t i = 0; i < pi0.size(); ++i) out[i] = rng.bernoulli(t) ? pi1[i] : pi0[i];
  return out;
}

Permutation greedy_assign(std::span<const double> logits, int n) {
  std::vector<double> confidence(n);
  for (int i = 0; i < n; ++i)
    confidence[i] = *std::max_element(logits.begin() + static_cast<std::ptrdiff_t>(i) * n,
                                      logits.begin() + static_cast<std::ptrdiff_t>(i + 1) * n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return confidence[a] > confidence[b]; });

  Permutation perm(n, -1);
  std::vector<char> taken(n, 0);
  for (int i : order) {
    int best = -1;
    for (int j = 0; j < n; ++j)
      if (!taken[j] && (best < 0 || logits[static_cast<std::size_t>(i) * n + j] > logits[static_cast<std::size_t>(i) * n + best]))
        best = j;
    perm[i] = best;
    taken[best] = 1;
  }
  return perm;
}

FlowResult flow_solve(const Scorer& scorer, const PuzzleContext& ctx, const FlowConfig& config, Rng& rng) {
  config.validate();
  const int n = ctx.size();
  FlowResult result;
  Permutation state = puzzlegen::random_permutation(n, rng);
  result.states.push_back(state);
  std::vector<double> logits;
  for (int s = 1; s <= config.steps; ++s) {
    const double t = static_cast<double>(s) / config.steps;
    scorer.logits(ctx, state, t, logits);
    state = greedy_assign(logits, n);
    result.states.push_back(state);
  }
  puzzlegen::require_permutation(state, n);
  result.perm = state;
  return result;
}

namespace {

double log_sum_exp(const double* l, int n) {
  const double m = *std::max_element(l, l + n);
  double s = 0.0;
  for (int j = 0; j < n; ++j) s += std::exp(l[j] - m);
  return m + std::log(s);
}

}  // namespace

CfmLoss cfm_loss_at(const Scorer& scorer, const PuzzleContext& ctx, std::span<const int> state,
                    std::span<const int> pi1, double t) {
  const int n = ctx.size();
  std::vector<double> logits;
  scorer.logits(ctx, state, t, logits);
  for (double l : logits)
    if (!std::isfinite(l)) throw DataError("scorer produced a non-finite logit");
  CfmLoss loss;
  for (int i = 0; i < n; ++i) {
    const double* row = &logits[static_cast<std::size_t>(i) * n];
    loss.sum += log_sum_exp(row, n) - row[pi1[i]];
  }
  loss.mean = loss.sum / n;
  return loss;
}

CfmLoss cfm_loss(const Scorer& scorer, const PuzzleContext& ctx, std::span<const int> pi0, std::span<const int> pi1,
                 double t, Rng& rng) {
  const auto state = sample_interpolant(pi0, pi1, t, rng);
  return cfm_loss_at(scorer, ctx, state, pi1, t);
}

double linear_cfm_loss_grad(const LinearScorerParams& params, const PuzzleContext& ctx, std::span<const int> state,
                            std::span<const int> pi1, double t, std::array<double, kLinearFeatureCount>& grad) {
  const int n = ctx.size();
  std::vector<double> phi;
  linear_features(ctx, state, t, phi);
  grad.fill(0.0);
  std::vector<double> l(n), p(n);
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* fi = &phi[static_cast<std::size_t>(i) * n * kLinearFeatureCount];
    for (int j = 0; j < n; ++j) {
      l[j] = 0.0;
      for (int f = 0; f < kLinearFeatureCount; ++f) l[j] += params.weights[f] * fi[j * kLinearFeatureCount + f];
    }
    const double lse = log_sum_exp(l.data(), n);
    loss += lse - l[pi1[i]];
    for (int j = 0; j < n; ++j) {
      const double coeff = std::exp(l[j] - lse) - (j == pi1[i] ? 1.0 : 0.0);
      for (int f = 0; f < kLinearFeatureCount; ++f) grad[f] += coeff * fi[j * kLinearFeatureCount + f];
    }
  }
  return loss;
}

TrainResult train_linear_scorer(std::span<const TrainingPuzzle> puzzles, const TrainConfig& config, Rng& rng) {
  if (puzzles.empty()) throw DataError("training needs at least one puzzle");
  if (config.epochs < 0) throw ConfigError("epochs must be >= 0");
  TrainResult result;
  if (config.epochs == 0) {
    double sum = 0.0;
    for (const auto& p : puzzles) sum += std::log(static_cast<double>(p.k * p.k));
    result.final_loss = sum / puzzles.size();
    return result;
  }
  auto& w = result.params.weights;
  std::array<double, kLinearFeatureCount> grad{};
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const Permutation order = puzzlegen::random_permutation(static_cast<int>(puzzles.size()), rng);
    double total = 0.0;
    for (int idx : order) {
      const TrainingPuzzle& p = puzzles[idx];
      const PuzzleContext ctx{p.k, &p.table};
      const int n = ctx.size();
      const Permutation pi0 = puzzlegen::random_permutation(n, rng);
      const double t = rng.uniform();
      const auto state = sample_interpolant(pi0, p.truth, t, rng);
      const double loss = linear_cfm_loss_grad(result.params, ctx, state, p.truth, t, grad);
      if (!std::isfinite(loss)) throw DivergenceError(epoch);
      for (int f = 0; f < kLinearFeatureCount; ++f) w[f] -= config.learning_rate * grad[f] / n;
      total += loss / n;
    }
    for (double x : w)
      if (!std::isfinite(x)) throw DivergenceError(epoch);
    result.epoch_loss.push_back(total / puzzles.size());
  }
  result.final_loss = result.epoch_loss.back();
  return result;
}

}  // namespace gap::solve
