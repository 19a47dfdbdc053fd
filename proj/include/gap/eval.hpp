#pragma once

#include <span>
#include <string>
#include <vector>

#include "gap/puzzlegen.hpp"

namespace gap::eval {

using puzzlegen::Permutation;

// Percentages over a batch. Throws DataError on length mismatches.
double perfect_accuracy(std::span<const Permutation> preds, std::span<const Permutation> gts);
double absolute_accuracy(std::span<const Permutation> preds, std::span<const Permutation> gts);

// Fraction of correctly placed pieces in one puzzle.
double piece_accuracy(std::span<const int> pred, std::span<const int> gt);

// Fraction of the 2k(k-1) ground-truth neighbour pairs (right and down) whose
// pieces keep the same relation under pred. Throws DataError unless N = k^2.
double sra(std::span<const int> pred, std::span<const int> gt, int k);

struct PuzzleMetrics {
  std::string puzzle_id;
  int n = 0;
  bool exact = false;
  double accuracy = 0.0;  // fraction
  double sra = 0.0;       // fraction
};

struct MetricsReport {
  std::string solver;
  int n_puzzles = 0;
  double pa = 0.0;   // percent
  double aa = 0.0;   // percent
  double sra = 0.0;  // percent
  std::vector<PuzzleMetrics> rows;
};

struct EvalItem {
  std::string puzzle_id;
  int k = 0;
  Permutation pred;
  Permutation gt;
};

// Per-puzzle rows are computed in parallel; the serial variant is the reference.
MetricsReport evaluate(std::span<const EvalItem> items);
MetricsReport evaluate_serial(std::span<const EvalItem> items);

}  // namespace gap::eval
