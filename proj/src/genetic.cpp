#include <algorithm>
#include <cmath>
#include <numeric>

#include "gap/error.hpp"
#include "gap/solve.hpp"

namespace gap::solve {

using compat::CompatibilityTable;
using compat::Direction;

void GaConfig::validate() const {
  auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate(mutation_rate) || !rate(crossover_rate) || !rate(elitism_ratio))
    throw ConfigError("GA rates must lie in [0, 1]");
  if (tournament_size < 1) throw ConfigError("tournament size must be >= 1");
  if (population <= tournament_size) throw ConfigError("GA population must exceed the tournament size");
  if (generations < 0 || early_stop_patience < 1) throw ConfigError("GA generation limits must be positive");
}

Permutation pmx_crossover(std::span<const int> parent1, std::span<const int> parent2, int cut1, int cut2) {
  const int n = static_cast<int>(parent1.size());
  if (parent2.size() != parent1.size() || cut1 < 0 || cut1 >= cut2 || cut2 > n)
    throw UsageError("invalid PMX arguments");
  std::vector<int> pos2(n);
  for (int i = 0; i < n; ++i) pos2[parent2[i]] = i;
  std::vector<char> in_segment(n, 0);
  Permutation child(n, -1);
  for (int i = cut1; i < cut2; ++i) {
    child[i] = parent1[i];
    in_segment[parent1[i]] = 1;
  }
  for (int i = cut1; i < cut2; ++i) {
    const int v = parent2[i];
    if (in_segment[v]) continue;
    int pos = i;
    do {
      pos = pos2[parent1[pos]];
    } while (pos >= cut1 && pos < cut2);
    child[pos] = v;
  }
  for (int i = 0; i < n; ++i)
    if (child[i] < 0) child[i] = parent2[i];
  return child;
}

namespace {

// Two distinct cut points, returned ordered.
std::pair<int, int> segment_bounds(int n, Rng& rng) {
  int a = rng.uniform_int(0, n - 1);
  int b = rng.uniform_int(0, n - 2);
  if (b >= a) ++b;
  return {std::min(a, b), std::max(a, b)};
}

}  // namespace

void mutate_swap(std::vector<int>& individual, Rng& rng) {
  const int n = static_cast<int>(individual.size());
  if (n < 2) return;
  auto [a, b] = segment_bounds(n, rng);
  std::swap(individual[a], individual[b]);
}

void mutate_inversion(std::vector<int>& individual, Rng& rng) {
  const int n = static_cast<int>(individual.size());
  if (n < 2) return;
  auto [a, b] = segment_bounds(n, rng);
  std::reverse(individual.begin() + a, individual.begin() + b + 1);
}

void mutate_scramble(std::vector<int>& individual, Rng& rng) {
  const int n = static_cast<int>(individual.size());
  if (n < 2) return;
  auto [a, b] = segment_bounds(n, rng);
  for (int i = b; i > a; --i) std::swap(individual[i], individual[a + rng.uniform_index(i - a + 1)]);
}

double layout_fitness(std::span<const int> layout, int k, const CompatibilityTable& table) {
  double sum = 0.0;
  for (int y = 0; y < k; ++y) {
    for (int x = 0; x < k; ++x) {
      const int p = layout[y * k + x];
      if (x + 1 < k) sum += table.d(p, layout[y * k + x + 1], Direction::kRight);
      if (y + 1 < k) sum += table.d(p, layout[(y + 1) * k + x], Direction::kDown);
    }
  }
  return -sum;
}

GaResult ga_solve(const CompatibilityTable& table, int k, const GaConfig& config, Rng& rng,
                  const GaObserver& observer) {
  config.validate();
  GaResult result;
  const int n = k * k;
  if (n == 1) {
    result.perm = {0};
    return result;
  }
  if (table.size() != n) throw DataError("compatibility table size does not match the grid");

  const int pop_size = config.population;
  const int elites = static_cast<int>(std::ceil(config.elitism_ratio * pop_size));
  std::vector<std::vector<int>> population(pop_size);
  std::vector<double> fitness(pop_size);
  for (int i = 0; i < pop_size; ++i) {
    population[i] = puzzlegen::random_permutation(n, rng);
    fitness[i] = layout_fitness(population[i], k, table);
  }
  if (observer) observer(0, population);

  std::vector<int> best = population[0];
  double best_fitness = fitness[0];
  auto record_best = [&] {
    bool improved = false;
    for (int i = 0; i < pop_size; ++i)
      if (fitness[i] > best_fitness) best_fitness = fitness[i], best = population[i], improved = true;
    return improved;
  };
  record_best();

  auto tournament = [&]() -> const std::vector<int>& {
    int winner = static_cast<int>(rng.uniform_index(pop_size));
    for (int t = 1; t < config.tournament_size; ++t) {
      const int c = static_cast<int>(rng.uniform_index(pop_size));
      if (fitness[c] > fitness[winner]) winner = c;
    }
    return population[winner];
  };

  int stale = 0;
  std::vector<int> order(pop_size);
  for (int gen = 1; gen <= config.generations; ++gen) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fitness[a] > fitness[b]; });
    std::vector<std::vector<int>> next;
    next.reserve(pop_size);
    for (int e = 0; e < elites && e < pop_size; ++e) next.push_back(population[order[e]]);
    while (static_cast<int>(next.size()) < pop_size) {
      const std::vector<int>& p1 = tournament();
      const std::vector<int>& p2 = tournament();
      std::vector<int> child;
      if (rng.bernoulli(config.crossover_rate)) {
        auto [cut1, cut2] = segment_bounds(n + 1, rng);
        child = pmx_crossover(p1, p2, cut1, cut2);
      } else {
        child = p1;
      }
      if (rng.bernoulli(config.mutation_rate)) {
        switch (rng.uniform_index(3)) {
          case 0: mutate_swap(child, rng); break;
          case 1: mutate_inversion(child, rng); break;
          default: mutate_scramble(child, rng); break;
        }
      }
      next.push_back(std::move(child));
    }
    population = std::move(next);
    for (int i = 0; i < pop_size; ++i) fitness[i] = layout_fitness(population[i], k, table);
    if (observer) observer(gen, population);

    stale = record_best() ? 0 : stale + 1;
    result.trace.push_back(best_fitness);
    result.generations = gen;
    if (stale >= config.early_stop_patience) break;
  }

  result.perm = puzzlegen::inverse(best);
  result.best_fitness = best_fitness;
  puzzlegen::require_permutation(result.perm, n);
  return result;
}

}  // namespace gap::solve
