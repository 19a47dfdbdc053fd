#include <algorithm>

#include "gap/error.hpp"
#include "gap/solve.hpp"

namespace gap::solve {

using compat::CompatibilityTable;
using compat::Direction;
using compat::kDirections;

namespace {

class WorkingGrid {
 public:
  explicit WorkingGrid(int k) : k_(k), side_(2 * k - 1), cells_(static_cast<std::size_t>(side_) * side_, -1) {}

  int side() const { return side_; }
  int at(int x, int y) const { return inside(x, y) ? cells_[y * side_ + x] : -1; }
  void put(int x, int y, int piece) {
    cells_[y * side_ + x] = piece;
    ++count_;
    min_x_ = std::min(min_x_, x), max_x_ = std::max(max_x_, x);
    min_y_ = std::min(min_y_, y), max_y_ = std::max(max_y_, y);
  }
  int count() const { return count_; }
  bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < side_ && y < side_; }
  // Whether occupying (x, y) keeps the bounding box within k x k.
  bool fits(int x, int y) const {
    if (count_ == 0) return true;
    return std::max(max_x_, x) - std::min(min_x_, x) < k_ && std::max(max_y_, y) - std::min(min_y_, y) < k_;
  }
  // The k x k frame at the bounding box, row-major.
  std::vector<int> crop() const {
    std::vector<int> out(static_cast<std::size_t>(k_) * k_, -1);
    for (int y = 0; y < k_; ++y)
      for (int x = 0; x < k_; ++x) out[y * k_ + x] = at(min_x_ + x, min_y_ + y);
    return out;
  }

 private:
  int k_;
  int side_;
  std::vector<int> cells_;
  int count_ = 0;
  int min_x_ = 1 << 30, max_x_ = -1, min_y_ = 1 << 30, max_y_ = -1;
};

// Among the free slots with the most occupied neighbours, place the
// (slot, piece) pair with the highest average compatibility. Ties prefer more
// best-buddy neighbours, then the row-major first slot, then the smaller piece.
void grow(WorkingGrid& grid, std::vector<char>& placed, const CompatibilityTable& table) {
  const int n = table.size();
  while (grid.count() < n) {
    int max_neighbors = 0;
    for (int y = 0; y < grid.side(); ++y) {
      for (int x = 0; x < grid.side(); ++x) {
        if (grid.at(x, y) >= 0 || !grid.fits(x, y)) continue;
        int neighbors = 0;
        for (Direction d : kDirections) neighbors += grid.at(x + compat::dx(d), y + compat::dy(d)) >= 0;
        max_neighbors = std::max(max_neighbors, neighbors);
      }
    }
    if (max_neighbors == 0) throw DataError("greedy placement found no free slot");

    int best = -1, best_x = -1, best_y = -1, best_buddies = -1;
    double best_avg = -1.0;
    for (int y = 0; y < grid.side(); ++y) {
      for (int x = 0; x < grid.side(); ++x) {
        if (grid.at(x, y) >= 0 || !grid.fits(x, y)) continue;
        int neighbors = 0;
        for (Direction d : kDirections) neighbors += grid.at(x + compat::dx(d), y + compat::dy(d)) >= 0;
        if (neighbors != max_neighbors) continue;
        for (int p = 0; p < n; ++p) {
          if (placed[p]) continue;
          double sum = 0.0;
          int buddies = 0;
          for (Direction d : kDirections) {
            const int q = grid.at(x + compat::dx(d), y + compat::dy(d));
            if (q < 0) continue;
            sum += table.c(p, q, d);
            buddies += table.are_best_buddies(p, q, d);
          }
          const double avg = sum / neighbors;
          if (avg > best_avg || (avg == best_avg && buddies > best_buddies))
            best = p, best_x = x, best_y = y, best_avg = avg, best_buddies = buddies;
        }
      }
    }
    grid.put(best_x, best_y, best);
    placed[best] = 1;
  }
}

// Cells of the largest best-buddy-connected segment of a full k x k layout;
// ties go to the segment reached first in row-major order.
std::vector<int> largest_segment(const std::vector<int>& layout, int k, const CompatibilityTable& table) {
  std::vector<int> label(layout.size(), -1);
  std::vector<int> best_cells;
  for (int start = 0; start < static_cast<int>(layout.size()); ++start) {
    if (label[start] >= 0) continue;
    std::vector<int> cells{start};
    label[start] = start;
    for (std::size_t head = 0; head < cells.size(); ++head) {
      const int cell = cells[head];
      const int x = cell % k, y = cell / k;
      for (Direction d : kDirections) {
        const int nx = x + compat::dx(d), ny = y + compat::dy(d);
        if (nx < 0 || ny < 0 || nx >= k || ny >= k) continue;
        const int next = ny * k + nx;
        if (label[next] >= 0 || !table.are_best_buddies(layout[cell], layout[next], d)) continue;
        label[next] = start;
        cells.push_back(next);
      }
    }
    if (cells.size() > best_cells.size()) best_cells = std::move(cells);
  }
  return best_cells;
}

}  // namespace

GreedyResult greedy_solve(const CompatibilityTable& table, int k) {
  GreedyResult result;
  if (k == 1) {
    result.perm = {0};
    return result;
  }
  const int n = k * k;
  if (table.size() != n) throw DataError("compatibility table size does not match the grid");

  int seed = 0;
  for (int p = 1; p < n; ++p)
    if (table.best_buddy_count(p) > table.best_buddy_count(seed)) seed = p;

  WorkingGrid grid(k);
  std::vector<char> placed(n, 0);
  grid.put(k - 1, k - 1, seed);
  placed[seed] = 1;
  grow(grid, placed, table);
  std::vector<int> layout = grid.crop();
  double score = compat::bbm(layout, k, k, table);

  for (int round = 0; round < 4 * n; ++round) {
    const std::vector<int> segment = largest_segment(layout, k, table);
    if (static_cast<int>(segment.size()) == n) break;
    int min_x = k, min_y = k, max_x = 0, max_y = 0;
    for (int cell : segment) {
      min_x = std::min(min_x, cell % k), max_x = std::max(max_x, cell % k);
      min_y = std::min(min_y, cell / k), max_y = std::max(max_y, cell / k);
    }
    // Offset so the segment can still grow k - width cells either way.
    const int ox = k - (max_x - min_x + 1) - min_x;
    const int oy = k - (max_y - min_y + 1) - min_y;
    WorkingGrid next(k);
    std::vector<char> used(n, 0);
    for (int cell : segment) {
      next.put(cell % k + ox, cell / k + oy, layout[cell]);
      used[layout[cell]] = 1;
    }
    grow(next, used, table);
    const std::vector<int> candidate = next.crop();
    const double candidate_score = compat::bbm(candidate, k, k, table);
    if (!(candidate_score > score)) break;
    layout = candidate;
    score = candidate_score;
    ++result.refinements;
  }

  result.perm = puzzlegen::inverse(layout);
  result.bbm = score;
  puzzlegen::require_permutation(result.perm, n);
  return result;
}

}  // namespace gap::solve
