#include "gap/shapestats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gap/error.hpp"

namespace gap::shapestats {

using maskforge::BinaryMask;

std::array<double, kFeatureCount> ShapeFeatures::as_array() const {
  return {area, perimeter, aspect_ratio, solidity, circularity, compactness,
          static_cast<double>(vertices), static_cast<double>(concavities)};
}

std::vector<Point> trace_outer_contour(const BinaryMask& mask) {
  // Clockwise (y down) starting west.
  static constexpr Point kDirs[8] = {{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  const int n = mask.side();
  Point start{-1, -1};
  for (int y = 0; y < n && start.x < 0; ++y)
    for (int x = 0; x < n; ++x)
      if (mask.at(x, y)) {
        start = {x, y};
        break;
      }
  if (start.x < 0) throw EmptyMaskError("cannot trace the contour of an empty mask");

  auto direction_index = [](Point from, Point to) {
    const Point d{to.x - from.x, to.y - from.y};
    for (int k = 0; k < 8; ++k)
      if (kDirs[k] == d) return k;
    return 0;
  };
  // Returns false when the pixel is isolated.
  auto step = [&](Point cur, Point& backtrack, Point& next) {
    const int k0 = direction_index(cur, backtrack);
    Point prev = backtrack;
    for (int i = 1; i <= 8; ++i) {
      const Point& d = kDirs[(k0 + i) % 8];
      const Point p{cur.x + d.x, cur.y + d.y};
      if (mask.get(p.x, p.y)) {
        next = p;
        backtrack = prev;
        return true;
      }
      prev = p;
    }
    return false;
  };

  std::vector<Point> contour{start};
  Point backtrack{start.x - 1, start.y};
  Point first_move;
  if (!step(start, backtrack, first_move)) return contour;
  Point cur = first_move;
  // Jacob's stopping criterion: stop when the start pixel is entered and the
  // following move repeats the first one.
  const std::size_t limit = 4 * static_cast<std::size_t>(n) * n + 8;
  while (contour.size() < limit) {
    Point next;
    step(cur, backtrack, next);
    if (cur == start && next == first_move) break;
    contour.push_back(cur);
    cur = next;
  }
  return contour;
}

double crofton_perimeter(const BinaryMask& mask) {
  const int n = mask.side();
  auto transitions = [&](int dx, int dy) {
    long count = 0;
    for (int y = -1; y <= n; ++y)
      for (int x = -1; x <= n; ++x)
        if (mask.get(x, y) != mask.get(x + dx, y + dy)) ++count;
    return static_cast<double>(count);
  };
  const double axis = transitions(1, 0) + transitions(0, 1);
  const double diagonal = transitions(1, 1) + transitions(1, -1);
  return std::numbers::pi / 8.0 * (axis + diagonal / std::numbers::sqrt2);
}

namespace {

long cross(const Point& o, const Point& a, const Point& b) {
  return static_cast<long>(a.x - o.x) * (b.y - o.y) - static_cast<long>(a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::vector<Point> convex_hull(std::vector<Point> points) {
  std::sort(points.begin(), points.end(),
            [](const Point& a, const Point& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;
  std::vector<Point> hull(2 * points.size());
  std::size_t k = 0;
  for (const Point& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

double lattice_hull_area(const std::vector<Point>& hull) {
  if (hull.empty()) return 0.0;
  long twice_area = 0;
  long boundary = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    twice_area += static_cast<long>(a.x) * b.y - static_cast<long>(b.x) * a.y;
    boundary += std::gcd(std::abs(a.x - b.x), std::abs(a.y - b.y));
  }
  return std::abs(twice_area) / 2.0 + boundary / 2.0 + 1.0;
}

namespace {

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = p.x - a.x, wy = p.y - a.y;
  const double len2 = vx * vx + vy * vy;
  if (len2 == 0.0) return std::hypot(wx, wy);
  const double t = std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0);
  return std::hypot(wx - t * vx, wy - t * vy);
}

// Indices are positions along the closed contour; `last` may exceed size().
void douglas_peucker(const std::vector<Point>& c, std::size_t first, std::size_t last, double epsilon,
                     std::vector<std::size_t>& keep) {
  if (last <= first + 1) return;
  const std::size_t n = c.size();
  double best = -1.0;
  std::size_t index = first;
  for (std::size_t i = first + 1; i < last; ++i) {
    const double d = segment_distance(c[i % n], c[first % n], c[last % n]);
    if (d > best) best = d, index = i;
  }
  if (best > epsilon) {
    douglas_peucker(c, first, index, epsilon, keep);
    keep.push_back(index % n);
    douglas_peucker(c, index, last, epsilon, keep);
  }
}

}  // namespace

std::vector<std::size_t> douglas_peucker_closed(const std::vector<Point>& contour, double epsilon) {
  const std::size_t n = contour.size();
  std::vector<std::size_t> keep;
  if (n < 3) {
    for (std::size_t i = 0; i < n; ++i) keep.push_back(i);
    return keep;
  }
  // Split the loop at the point farthest from the first one.
  std::size_t far = 0;
  double far_d = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = std::hypot(contour[i].x - contour[0].x, contour[i].y - contour[0].y);
    if (d > far_d) far_d = d, far = i;
  }
  keep.push_back(0);
  douglas_peucker(contour, 0, far, epsilon, keep);
  keep.push_back(far);
  douglas_peucker(contour, far, n, epsilon, keep);
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  return keep;
}

std::vector<double> discrete_curvature(const std::vector<Point>& contour) {
  const std::size_t n = contour.size();
  std::vector<double> kappa(n, 0.0);
  if (n < 5) return kappa;
  std::vector<std::array<double, 2>> smooth(n);
  double twice_area = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sx = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      const Point& p = contour[(i + n + k - 2) % n];
      sx += p.x, sy += p.y;
    }
    smooth[i] = {sx / 5.0, sy / 5.0};
    const Point& a = contour[i];
    const Point& b = contour[(i + 1) % n];
    twice_area += static_cast<double>(a.x) * b.y - static_cast<double>(b.x) * a.y;
  }
  const double orientation = twice_area >= 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prev = smooth[(i + n - 2) % n];
    const auto& cur = smooth[i];
    const auto& next = smooth[(i + 2) % n];
    const double a_in = std::atan2(cur[1] - prev[1], cur[0] - prev[0]);
    const double a_out = std::atan2(next[1] - cur[1], next[0] - cur[0]);
    double turn = a_out - a_in;
    while (turn > std::numbers::pi) turn -= 2.0 * std::numbers::pi;
    while (turn <= -std::numbers::pi) turn += 2.0 * std::numbers::pi;
    kappa[i] = orientation * turn / 2.0;
  }
  return kappa;
}

ShapeFeatures extract_features(const BinaryMask& mask) {
  ShapeFeatures f;
  const int n = mask.side();
  int min_x = n, max_x = -1, min_y = n, max_y = -1;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (mask.at(x, y)) {
        f.area += 1.0;
        min_x = std::min(min_x, x), max_x = std::max(max_x, x);
        min_y = std::min(min_y, y), max_y = std::max(max_y, y);
      }
  if (f.area == 0.0) throw EmptyMaskError("cannot extract features of an empty mask");

  const auto contour = trace_outer_contour(mask);
  f.perimeter = crofton_perimeter(mask);
  f.aspect_ratio = static_cast<double>(max_x - min_x + 1) / (max_y - min_y + 1);
  f.solidity = f.area / lattice_hull_area(convex_hull(contour));
  f.circularity = 4.0 * std::numbers::pi * f.area / (f.perimeter * f.perimeter);
  f.compactness = f.perimeter * f.perimeter / f.area;
  f.vertices = static_cast<int>(douglas_peucker_closed(contour, kDouglasPeuckerFraction * f.perimeter).size());
  const auto kappa = discrete_curvature(contour);
  f.concavities = static_cast<int>(std::count_if(kappa.begin(), kappa.end(),
                                                 [](double k) { return k < -kConcavityThreshold; }));
  return f;
}

std::vector<ShapeFeatures> extract_features_batch_serial(const std::vector<BinaryMask>& masks) {
  std::vector<ShapeFeatures> out(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) out[i] = extract_features(masks[i]);
  return out;
}

std::vector<ShapeFeatures> extract_features_batch(const std::vector<BinaryMask>& masks) {
  std::vector<ShapeFeatures> out(masks.size());
  const auto count = static_cast<std::ptrdiff_t>(masks.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = extract_features(masks[i]);
  return out;
}

namespace {

double lower_median(const double* sorted, std::size_t n) { return sorted[(n - 1) / 2]; }

}  // namespace

FeatureSummary summarize_values(std::vector<double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw DataError("summary statistics need at least 2 samples");
  std::sort(values.begin(), values.end());
  FeatureSummary s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / (n - 1));
  s.median = lower_median(values.data(), n);
  s.min = values.front();
  s.max = values.back();
  const std::size_t half = n / 2;
  const double q1 = lower_median(values.data(), half);
  const double q3 = lower_median(values.data() + (n - half), half);
  s.iqr = q3 - q1;
  return s;
}

SummaryStats summarize(const std::vector<ShapeFeatures>& samples) {
  if (samples.size() < 2) throw DataError("summary statistics need at least 2 samples");
  SummaryStats stats;
  stats.n = samples.size();
  for (int f = 0; f < kFeatureCount; ++f) {
    std::vector<double> column;
    column.reserve(samples.size());
    for (const auto& s : samples) column.push_back(s.as_array()[f]);
    stats.features[f] = summarize_values(std::move(column));
  }
  return stats;
}

void jacobi_eigen(std::array<std::array<double, kFeatureCount>, kFeatureCount> a,
                  std::array<double, kFeatureCount>& eigenvalues,
                  std::array<std::array<double, kFeatureCount>, kFeatureCount>& eigenvectors) {
  constexpr int n = kFeatureCount;
  std::array<std::array<double, n>, n> v{};
  for (int i = 0; i < n; ++i) v[i][i] = 1.0;

  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale += a[i][j] * a[i][j];
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off <= 1e-30 * scale || off == 0.0) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::array<int, n> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] > a[j][j]; });
  for (int r = 0; r < n; ++r) {
    eigenvalues[r] = a[order[r]][order[r]];
    for (int k = 0; k < n; ++k) eigenvectors[r][k] = v[k][order[r]];
  }
}

PcaResult pca(const FeatureMatrix& samples) {
  const std::size_t n = samples.size();
  if (n < 9) throw DataError("PCA needs at least 9 samples, got " + std::to_string(n));
  PcaResult r;
  for (int f = 0; f < kFeatureCount; ++f) {
    double sum = 0.0;
    for (const auto& row : samples) sum += row[f];
    r.mean[f] = sum / n;
    double ss = 0.0;
    for (const auto& row : samples) ss += (row[f] - r.mean[f]) * (row[f] - r.mean[f]);
    r.sd[f] = std::sqrt(ss / (n - 1));
    if (!(r.sd[f] > 1e-12 * std::max(1.0, std::abs(r.mean[f]))))
      throw DataError("PCA feature column '" + std::string(kFeatureNames[f]) + "' is constant");
  }
  FeatureMatrix z(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int f = 0; f < kFeatureCount; ++f) z[i][f] = (samples[i][f] - r.mean[f]) / r.sd[f];

  std::array<std::array<double, kFeatureCount>, kFeatureCount> cov{};
  for (int a = 0; a < kFeatureCount; ++a) {
    for (int b = a; b < kFeatureCount; ++b) {
      double s = 0.0;
      for (const auto& row : z) s += row[a] * row[b];
      cov[a][b] = cov[b][a] = s / (n - 1);
    }
  }
  jacobi_eigen(cov, r.eigenvalues, r.loadings);

  for (auto& row : r.loadings) {
    int big = 0;
    for (int k = 1; k < kFeatureCount; ++k)
      if (std::abs(row[k]) > std::abs(row[big])) big = k;
    if (row[big] < 0.0)
      for (double& x : row) x = -x;
  }
  double total = 0.0;
  for (double ev : r.eigenvalues) total += std::max(ev, 0.0);
  for (int c = 0; c < kFeatureCount; ++c) r.explained_variance_ratio[c] = std::max(r.eigenvalues[c], 0.0) / total;

  r.projected.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < kFeatureCount; ++c) {
      double s = 0.0;
      for (int f = 0; f < kFeatureCount; ++f) s += z[i][f] * r.loadings[c][f];
      r.projected[i][c] = s;
    }
  }
  return r;
}

ValidationReport compare_distributions(const std::vector<ShapeFeatures>& real,
                                       const std::vector<ShapeFeatures>& synth) {
  if (real.empty() || synth.empty()) throw DataError("both feature lists must be non-empty");
  ValidationReport report;
  report.real = summarize(real);
  report.synth = summarize(synth);
  for (int f = 0; f < kFeatureCount; ++f) {
    const double base = report.real.features[f].mean;
    const double diff = report.synth.features[f].mean - base;
    report.relative_mean_difference[f] = base != 0.0 ? diff / std::abs(base) : (diff == 0.0 ? 0.0 : INFINITY);
  }

  FeatureMatrix pooled;
  for (const auto& s : real) pooled.push_back(s.as_array()), report.group.push_back(0);
  for (const auto& s : synth) pooled.push_back(s.as_array()), report.group.push_back(1);
  try {
    report.pooled_pca = pca(pooled);
  } catch (const DataError& e) {
    report.pca_note = e.what();
    return report;
  }
  const auto& proj = report.pooled_pca->projected;
  std::array<double, 2> sum_r{}, sum_s{}, mean{};
  for (std::size_t i = 0; i < proj.size(); ++i) {
    auto& acc = report.group[i] == 0 ? sum_r : sum_s;
    for (int c = 0; c < 2; ++c) acc[c] += proj[i][c], mean[c] += proj[i][c] / proj.size();
  }
  double var = 0.0;
  for (const auto& row : proj)
    for (int c = 0; c < 2; ++c) var += (row[c] - mean[c]) * (row[c] - mean[c]);
  var /= 2.0 * (proj.size() - 1);
  for (int c = 0; c < 2; ++c) {
    report.real_centroid[c] = sum_r[c] / real.size();
    report.synth_centroid[c] = sum_s[c] / synth.size();
  }
  const double gap = std::hypot(report.real_centroid[0] - report.synth_centroid[0],
                                report.real_centroid[1] - report.synth_centroid[1]);
  report.centroid_gap_pooled_sd = var > 0.0 ? gap / std::sqrt(var) : 0.0;
  return report;
}

}  // namespace gap::shapestats
