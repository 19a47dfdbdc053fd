#include "gap/eval.hpp"

#include <algorithm>
#include <numeric>

#include "gap/error.hpp"

namespace gap::eval {

namespace {

void check_batch(std::span<const Permutation> preds, std::span<const Permutation> gts) {
  if (preds.size() != gts.size()) throw DataError("prediction and ground-truth counts differ");
  if (preds.empty()) throw DataError("no puzzles to evaluate");
  for (std::size_t p = 0; p < preds.size(); ++p)
    if (preds[p].size() != gts[p].size()) throw DataError("prediction and ground truth differ in length");
}

}  // namespace

double piece_accuracy(std::span<const int> pred, std::span<const int> gt) {
  if (pred.size() != gt.size() || pred.empty()) throw DataError("prediction and ground truth differ in length");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == gt[i];
  return static_cast<double>(correct) / pred.size();
}

double perfect_accuracy(std::span<const Permutation> preds, std::span<const Permutation> gts) {
  check_batch(preds, gts);
  std::size_t exact = 0;
  for (std::size_t p = 0; p < preds.size(); ++p) exact += preds[p] == gts[p];
  return 100.0 * exact / preds.size();
}

double absolute_accuracy(std::span<const Permutation> preds, std::span<const Permutation> gts) {
  check_batch(preds, gts);
  double sum = 0.0;
  for (std::size_t p = 0; p < preds.size(); ++p) sum += piece_accuracy(preds[p], gts[p]);
  return 100.0 * sum / preds.size();
}

double sra(std::span<const int> pred, std::span<const int> gt, int k) {
  const std::size_t n = static_cast<std::size_t>(k) * k;
  if (k < 1 || gt.size() != n || pred.size() != n) throw DataError("SRA needs N = k^2 pieces");
  if (k == 1) return 1.0;
  const Permutation at = puzzlegen::inverse(gt);  // position -> piece
  int preserved = 0;
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const int a = at[r * k + c];
      const int pa = pred[a];
      if (c + 1 < k) {
        const int pb = pred[at[r * k + c + 1]];
        preserved += pb / k == pa / k && pb % k == pa % k + 1;
      }
      if (r + 1 < k) {
        const int pb = pred[at[(r + 1) * k + c]];
        preserved += pb / k == pa / k + 1 && pb % k == pa % k;
      }
    }
  }
  return static_cast<double>(preserved) / (2.0 * k * (k - 1));
}

namespace {

PuzzleMetrics score_item(const EvalItem& item) {
  PuzzleMetrics m;
  m.puzzle_id = item.puzzle_id;
  m.n = static_cast<int>(item.gt.size());
  puzzlegen::require_permutation(item.gt, item.gt.size());
  puzzlegen::require_permutation(item.pred, item.gt.size());
  m.exact = item.pred == item.gt;
  m.accuracy = piece_accuracy(item.pred, item.gt);
  m.sra = sra(item.pred, item.gt, item.k);
  return m;
}

MetricsReport aggregate(std::vector<PuzzleMetrics> rows) {
  MetricsReport report;
  report.n_puzzles = static_cast<int>(rows.size());
  double exact = 0.0, acc = 0.0, sra_sum = 0.0;
  for (const auto& r : rows) exact += r.exact, acc += r.accuracy, sra_sum += r.sra;
  report.pa = 100.0 * exact / rows.size();
  report.aa = 100.0 * acc / rows.size();
  report.sra = 100.0 * sra_sum / rows.size();
  report.rows = std::move(rows);
  return report;
}

}  // namespace

MetricsReport evaluate_serial(std::span<const EvalItem> items) {
  if (items.empty()) throw DataError("no puzzles to evaluate");
  std::vector<PuzzleMetrics> rows;
  rows.reserve(items.size());
  for (const auto& item : items) rows.push_back(score_item(item));
  return aggregate(std::move(rows));
}

MetricsReport evaluate(std::span<const EvalItem> items) {
  if (items.empty()) throw DataError("no puzzles to evaluate");
  std::vector<PuzzleMetrics> rows(items.size());
  std::vector<std::string> errors(items.size());
  const auto n = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      rows[i] = score_item(items[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw DataError(items[i].puzzle_id + ": " + errors[i]);
  return aggregate(std::move(rows));
}

}  // namespace gap::eval
