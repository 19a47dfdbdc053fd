#pragma once

// Independent reference computations for tests. None of these call into the
// library code they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gap/maskforge.hpp"

namespace oracle {

// Flood fill over a plain bool grid: 4-connected foreground components and
// background regions that do not reach the border.
struct Topology {
  int components = 0;
  int holes = 0;
};

inline Topology topology(const gap::maskforge::BinaryMask& mask) {
  const int n = mask.side();
  std::vector<int> seen(static_cast<std::size_t>(n) * n, 0);
  Topology t;
  auto fill = [&](int sx, int sy, bool fg) {
    bool touches_border = false;
    std::queue<std::pair<int, int>> q;
    q.push({sx, sy});
    seen[sy * n + sx] = 1;
    while (!q.empty()) {
      auto [x, y] = q.front();
      q.pop();
      if (x == 0 || y == 0 || x == n - 1 || y == n - 1) touches_border = true;
      const int nb[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
      for (auto& p : nb) {
        if (p[0] < 0 || p[1] < 0 || p[0] >= n || p[1] >= n) continue;
        if (seen[p[1] * n + p[0]] || mask.at(p[0], p[1]) != fg) continue;
        seen[p[1] * n + p[0]] = 1;
        q.push({p[0], p[1]});
      }
    }
    return touches_border;
  };
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (seen[y * n + x]) continue;
      const bool fg = mask.at(x, y);
      const bool border = fill(x, y, fg);
      if (fg) ++t.components;
      else if (!border) ++t.holes;
    }
  return t;
}

// SRA by direct pair enumeration over positions: for every ordered pair of
// pieces (a, b) with b directly right of / below a in the ground truth, check
// the same offset holds in the prediction.
inline double sra(const std::vector<int>& pred, const std::vector<int>& gt, int k) {
  const int n = k * k;
  int total = 0, kept = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const int ra = gt[a] / k, ca = gt[a] % k, rb = gt[b] / k, cb = gt[b] % k;
      const bool right = ra == rb && cb == ca + 1;
      const bool down = ca == cb && rb == ra + 1;
      if (!right && !down) continue;
      ++total;
      const int pra = pred[a] / k, pca = pred[a] % k, prb = pred[b] / k, pcb = pred[b] % k;
      if (right && pra == prb && pcb == pca + 1) ++kept;
      if (down && pca == pcb && prb == pra + 1) ++kept;
    }
  return total == 0 ? 1.0 : static_cast<double>(kept) / total;
}

// Mean SRA of every prediction in S_N against the identity, by enumeration.
inline double exhaustive_random_sra(int k) {
  std::vector<int> gt(k * k), pred(k * k);
  for (int i = 0; i < k * k; ++i) gt[i] = pred[i] = i;
  double sum = 0.0;
  std::uint64_t count = 0;
  do {
    sum += sra(pred, gt, k);
    ++count;
  } while (std::next_permutation(pred.begin(), pred.end()));
  return sum / static_cast<double>(count);
}

// Descending eigenvalues of a symmetric matrix via Eigen.
template <std::size_t N>
std::array<double, N> eigenvalues(const std::array<std::array<double, N>, N>& m) {
  Eigen::Matrix<double, N, N> a;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) a(i, j) = m[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(a);
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = es.eigenvalues()(N - 1 - i);
  return out;
}

// Sample correlation matrix of the columns (n - 1 denominators).
template <std::size_t N>
std::array<std::array<double, N>, N> correlation(const std::vector<std::array<double, N>>& rows) {
  const std::size_t n = rows.size();
  std::array<double, N> mean{}, sd{};
  for (const auto& r : rows)
    for (std::size_t c = 0; c < N; ++c) mean[c] += r[c] / n;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < N; ++c) sd[c] += (r[c] - mean[c]) * (r[c] - mean[c]);
  for (auto& s : sd) s = std::sqrt(s / (n - 1));
  std::array<std::array<double, N>, N> out{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      double acc = 0.0;
      for (const auto& r : rows) acc += (r[i] - mean[i]) * (r[j] - mean[j]);
      out[i][j] = acc / (n - 1) / (sd[i] * sd[j]);
    }
  return out;
}

// CIE sRGB (D65) to L*a*b*, components 0..255.
inline std::array<double, 3> srgb_to_lab(double r8, double g8, double b8) {
  auto lin = [](double v) {
    v /= 255.0;
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
  };
  const double r = lin(r8), g = lin(g8), b = lin(b8);
  const double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  auto f = [](double t) {
    const double d = 6.0 / 29.0;
    return t > d * d * d ? std::cbrt(t) : t / (3 * d * d) + 4.0 / 29.0;
  };
  const double fx = f(X / 0.95047), fy = f(Y / 1.0), fz = f(Z / 1.08883);
  return {116 * fy - 16, 500 * (fx - fy), 200 * (fy - fz)};
}

}  // namespace oracle
