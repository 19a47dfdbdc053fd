#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "gap/compat.hpp"
#include "gap/puzzlegen.hpp"
#include "gap/rng.hpp"

namespace gap::solve {

using puzzlegen::Permutation;

// ---------------------------------------------------------------- greedy

struct GreedyResult {
  Permutation perm;
  double bbm = 1.0;
  int refinements = 0;  // accepted refinement rounds
};

// Best-buddy seeded placement on a (2k-1)^2 working grid. Slots are only
// offered while the occupied bounding box stays within k x k, so the final
// segment always fills the frame. Refinement rebuilds from the largest
// best-buddy segment while BBM strictly improves. k = 1 ignores the table.
GreedyResult greedy_solve(const compat::CompatibilityTable& table, int k);

// ---------------------------------------------------------------- genetic

struct GaConfig {
  int population = 100;
  int generations = 1000;
  int early_stop_patience = 100;
  double mutation_rate = 0.01;
  double crossover_rate = 0.8;
  int tournament_size = 3;
  double elitism_ratio = 0.1;

  void validate() const;  // throws ConfigError
};

// Child keeps parent1[cut1, cut2) and fills the rest from parent2, following
// the segment's value mapping out of conflicts.
Permutation pmx_crossover(std::span<const int> parent1, std::span<const int> parent2, int cut1, int cut2);

void mutate_swap(std::vector<int>& individual, Rng& rng);
void mutate_inversion(std::vector<int>& individual, Rng& rng);
void mutate_scramble(std::vector<int>& individual, Rng& rng);

// Individuals are layouts: entry p is the piece at position p. Fitness is the
// negated sum of RIGHT and DOWN dissimilarities over adjacent positions.
double layout_fitness(std::span<const int> layout, int k, const compat::CompatibilityTable& table);

struct GaResult {
  Permutation perm;  // piece -> position
  double best_fitness = 0.0;
  std::vector<double> trace;  // best-so-far fitness after each generation
  int generations = 0;
};

// Called with the population after initialisation (generation 0) and after
// every generation.
using GaObserver = std::function<void(int generation, const std::vector<std::vector<int>>& population)>;

GaResult ga_solve(const compat::CompatibilityTable& table, int k, const GaConfig& config, Rng& rng,
                  const GaObserver& observer = {});

// ---------------------------------------------------------------- flow

struct PuzzleContext {
  int k = 1;
  const compat::CompatibilityTable* table = nullptr;  // may be null for scorers that ignore it
  int size() const { return k * k; }
};

// Produces N x N logits, out[i * N + j] for piece i at position j, given the
// current (possibly colliding) assignment state and time t.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual void logits(const PuzzleContext& ctx, std::span<const int> state, double t,
                      std::vector<double>& out) const = 0;
};

// +margin on the ground-truth position of each piece, 0 elsewhere.
class OracleScorer : public Scorer {
 public:
  explicit OracleScorer(Permutation truth, double margin = 10.0) : truth_(std::move(truth)), margin_(margin) {}
  void logits(const PuzzleContext& ctx, std::span<const int> state, double t, std::vector<double>& out) const override;

 private:
  Permutation truth_;
  double margin_;
};

class ConstantScorer : public Scorer {
 public:
  explicit ConstantScorer(double value = 0.0) : value_(value) {}
  void logits(const PuzzleContext& ctx, std::span<const int> state, double t, std::vector<double>& out) const override;

 private:
  double value_;
};

// Mean compatibility of piece i with every piece (other than i) currently
// assigned to a grid neighbour of position j; 0 when there is none.
class NeighborCompatScorer : public Scorer {
 public:
  void logits(const PuzzleContext& ctx, std::span<const int> state, double t, std::vector<double>& out) const override;
};

inline constexpr int kLinearFeatureCount = 7;
inline constexpr int kLinearFeatureVersion = 1;

struct LinearScorerParams {
  std::array<double, kLinearFeatureCount> weights{};
  int feature_version = kLinearFeatureVersion;
};

// phi(i, j, state, t) = [c_left, c_right, c_up, c_down, stay, t, 1]. For an
// on-grid neighbour of j in direction d, c_d is the mean C(i, m, d) over its
// occupants m != i minus the mean of C(i, ., d) over all other pieces (0 when
// unoccupied). For an off-grid direction c_d = mean - max of C(i, ., d), which
// penalises border cells for pieces that have a strong partner that way.
// stay = [state[i] == j]. Writes N*N*7 values.
void linear_features(const PuzzleContext& ctx, std::span<const int> state, double t, std::vector<double>& phi);

class LinearScorer : public Scorer {
 public:
  explicit LinearScorer(LinearScorerParams params) : params_(params) {}
  void logits(const PuzzleContext& ctx, std::span<const int> state, double t, std::vector<double>& out) const override;
  const LinearScorerParams& params() const { return params_; }

 private:
  LinearScorerParams params_;
};

void save_params(const std::filesystem::path& path, const LinearScorerParams& params);
LinearScorerParams load_params(const std::filesystem::path& path);

struct FlowConfig {
  int steps = 20;
  void validate() const;
};

// Each piece independently takes pi1(i) with probability t, else pi0(i).
// Throws UsageError for t outside [0, 1].
std::vector<int> sample_interpolant(std::span<const int> pi0, std::span<const int> pi1, double t, Rng& rng);

// Pieces in descending order of their maximum logit (ties: smaller index)
// each take their best still-free position (ties: smaller position).
Permutation greedy_assign(std::span<const double> logits, int n);

struct FlowResult {
  Permutation perm;
  std::vector<Permutation> states;  // pi_0 .. pi_S
};

FlowResult flow_solve(const Scorer& scorer, const PuzzleContext& ctx, const FlowConfig& config, Rng& rng);

struct CfmLoss {
  double sum = 0.0;   // sum over pieces of -log softmax(l_i)[pi1(i)]
  double mean = 0.0;  // per piece
};

// Loss at a given interpolant state. Throws DataError on non-finite logits.
CfmLoss cfm_loss_at(const Scorer& scorer, const PuzzleContext& ctx, std::span<const int> state,
                    std::span<const int> pi1, double t);
// Samples pi_t first.
CfmLoss cfm_loss(const Scorer& scorer, const PuzzleContext& ctx, std::span<const int> pi0, std::span<const int> pi1,
                 double t, Rng& rng);

// Summed loss and its analytic gradient with respect to the weights.
double linear_cfm_loss_grad(const LinearScorerParams& params, const PuzzleContext& ctx, std::span<const int> state,
                            std::span<const int> pi1, double t, std::array<double, kLinearFeatureCount>& grad);

struct TrainingPuzzle {
  int k = 1;
  compat::CompatibilityTable table;
  Permutation truth;
};

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 0.5;
};

struct TrainResult {
  LinearScorerParams params;
  double final_loss = 0.0;  // mean per-piece loss over the last epoch
  std::vector<double> epoch_loss;
};

// Plain SGD from zero weights: per puzzle draw pi0 uniformly and t ~ U(0,1),
// sample pi_t and step along the per-piece mean gradient. Throws
// DivergenceError when the loss becomes non-finite.
TrainResult train_linear_scorer(std::span<const TrainingPuzzle> puzzles, const TrainConfig& config, Rng& rng);

}  // namespace gap::solve
