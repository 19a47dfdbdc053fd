#include "gap/maskforge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "gap/error.hpp"

namespace gap::maskforge {

namespace {

constexpr int kDx4[4] = {1, -1, 0, 0};
constexpr int kDy4[4] = {0, 0, 1, -1};

// Labels 4-connected regions of pixels equal to `value`. Labels start at 0 and
// are assigned in row-major order of each region's first pixel.
std::vector<int> label_regions(const BinaryMask& mask, bool value, std::vector<std::size_t>& sizes) {
  const int n = mask.side();
  std::vector<int> label(static_cast<std::size_t>(n) * n, -1);
  std::vector<std::pair<int, int>> stack;
  sizes.clear();
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (mask.at(x, y) != value || label[y * n + x] >= 0) continue;
      const int id = static_cast<int>(sizes.size());
      std::size_t count = 0;
      label[y * n + x] = id;
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        ++count;
        for (int d = 0; d < 4; ++d) {
          const int nx = cx + kDx4[d], ny = cy + kDy4[d];
          if (!mask.in_bounds(nx, ny) || mask.at(nx, ny) != value || label[ny * n + nx] >= 0) continue;
          label[ny * n + nx] = id;
          stack.emplace_back(nx, ny);
        }
      }
      sizes.push_back(count);
    }
  }
  return label;
}

std::vector<std::pair<int, int>> disk_offsets(int radius) {
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dx, dy);
  return offsets;
}

}  // namespace

std::size_t BinaryMask::area() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void ProceduralMaskParams::validate() const {
  if (!(base_radius_fraction > 0.0 && base_radius_fraction <= 0.5))
    throw ConfigError("base_radius_fraction must be in (0, 0.5]");
  if (vertex_min < 3 || vertex_max < vertex_min) throw ConfigError("vertex_count range must satisfy 3 <= min <= max");
  if (radial_noise_amplitude < 0.0 || boundary_roughness_scale < 0.0)
    throw ConfigError("noise amplitudes must be >= 0");
}

BinaryMask binarize(const raster::RasterImage& gray, double threshold) {
  if (gray.channels() != 1) throw ShapeError("binarize needs a single-channel image");
  if (gray.width() != gray.height())
    throw ShapeError("mask image must be square, got " + std::to_string(gray.width()) + "x" +
                     std::to_string(gray.height()));
  const double scale = 1.0 / gray.full_scale();
  BinaryMask out(gray.width());
  for (int y = 0; y < gray.height(); ++y)
    for (int x = 0; x < gray.width(); ++x) out.set(x, y, gray.at(x, y, 0) * scale > threshold);
  return out;
}

BinaryMask fill_holes(const BinaryMask& mask) {
  const int n = mask.side();
  std::vector<std::uint8_t> reached(static_cast<std::size_t>(n) * n, 0);
  std::vector<std::pair<int, int>> stack;
  auto seed = [&](int x, int y) {
    if (!mask.at(x, y) && !reached[y * n + x]) {
      reached[y * n + x] = 1;
      stack.emplace_back(x, y);
    }
  };
  for (int i = 0; i < n; ++i) {
    seed(i, 0);
    seed(i, n - 1);
    seed(0, i);
    seed(n - 1, i);
  }
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    for (int d = 0; d < 4; ++d) {
      const int nx = x + kDx4[d], ny = y + kDy4[d];
      if (mask.in_bounds(nx, ny)) seed(nx, ny);
    }
  }
  BinaryMask out(n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) out.set(x, y, !reached[y * n + x]);
  return out;
}

BinaryMask largest_component(const BinaryMask& mask) {
  std::vector<std::size_t> sizes;
  const auto label = label_regions(mask, true, sizes);
  if (sizes.empty()) throw EmptyMaskError("mask has no foreground pixels");
  int best = 0;
  for (int i = 1; i < static_cast<int>(sizes.size()); ++i)
    if (sizes[i] > sizes[best]) best = i;
  BinaryMask out(mask.side());
  const int n = mask.side();
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) out.set(x, y, label[y * n + x] == best);
  return out;
}

BinaryMask morphological_close(const BinaryMask& mask, int radius) {
  if (radius < 1) throw ConfigError("closing radius must be >= 1");
  const int n = mask.side();
  const int padded = n + 2 * radius;
  const auto offsets = disk_offsets(radius);
  // Dilation on the padded frame so foreground may spill past the border.
  std::vector<std::uint8_t> dilated(static_cast<std::size_t>(padded) * padded, 0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (!mask.at(x, y)) continue;
      for (auto [dx, dy] : offsets) dilated[(y + radius + dy) * padded + (x + radius + dx)] = 1;
    }
  }
  BinaryMask out(n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      bool keep = true;
      for (auto [dx, dy] : offsets) {
        if (!dilated[(y + radius + dy) * padded + (x + radius + dx)]) {
          keep = false;
          break;
        }
      }
      out.set(x, y, keep);
    }
  }
  return out;
}

int count_components(const BinaryMask& mask) {
  std::vector<std::size_t> sizes;
  label_regions(mask, true, sizes);
  return static_cast<int>(sizes.size());
}

int count_holes(const BinaryMask& mask) {
  std::vector<std::size_t> sizes;
  const auto label = label_regions(mask, false, sizes);
  const int n = mask.side();
  std::vector<bool> touches_border(sizes.size(), false);
  for (int i = 0; i < n; ++i) {
    for (int idx : {label[i], label[(n - 1) * n + i], label[i * n], label[i * n + n - 1]})
      if (idx >= 0) touches_border[idx] = true;
  }
  return static_cast<int>(std::count(touches_border.begin(), touches_border.end(), false));
}

bool satisfies_postprocess_invariants(const BinaryMask& mask) {
  return mask.area() >= 1 && count_components(mask) == 1 && count_holes(mask) == 0;
}

BinaryMask postprocess(const BinaryMask& raw) {
  constexpr int kMaxRounds = 16;
  BinaryMask current = morphological_close(largest_component(fill_holes(raw)), 2);
  for (int round = 0; round < kMaxRounds; ++round) {
    // Closing can bridge a narrow inlet (creating a hole) or, rarely, split
    // off a thin strand; rerun the steps until nothing changes.
    if (satisfies_postprocess_invariants(current)) return current;
    current = morphological_close(largest_component(fill_holes(current)), 2);
  }
  return largest_component(fill_holes(current));
}

BinaryMask postprocess(const raster::RasterImage& raw) { return postprocess(binarize(raw, 0.5)); }

namespace {

// Even-odd point-in-polygon test.
bool inside_polygon(const std::vector<std::pair<double, double>>& poly, double px, double py) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto [xi, yi] = poly[i];
    const auto [xj, yj] = poly[j];
    if ((yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi) inside = !inside;
  }
  return inside;
}

}  // namespace

BinaryMask sample_procedural_mask(Rng& rng, int side, const ProceduralMaskParams& params) {
  if (side < 32) throw ConfigError("procedural masks need side >= 32");
  params.validate();
  constexpr int kMaxAttempts = 16;
  constexpr int kBoundarySamples = 256;
  const double center = side / 2.0;
  const double base = params.base_radius_fraction * side;
  const double max_radius = side / 2.0 - 1.0;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const int vertices = rng.uniform_int(params.vertex_min, params.vertex_max);
    const double rotation = rng.uniform(0.0, 2.0 * std::numbers::pi / vertices);
    std::vector<double> vertex_radius(vertices);
    for (double& r : vertex_radius) r = base * (1.0 + params.radial_noise_amplitude * rng.uniform(-1.0, 1.0));

    // Roughness: white noise smoothed by a circular 5-tap box filter.
    std::vector<double> noise(kBoundarySamples), rough(kBoundarySamples, 0.0);
    for (double& v : noise) v = params.boundary_roughness_scale > 0.0 ? rng.normal() : 0.0;
    for (int i = 0; i < kBoundarySamples; ++i) {
      for (int k = -2; k <= 2; ++k) rough[i] += noise[(i + k + kBoundarySamples) % kBoundarySamples];
      rough[i] *= params.boundary_roughness_scale / std::sqrt(5.0);
    }

    // Boundary points: straight polygon edges between vertices, displaced radially.
    std::vector<std::pair<double, double>> poly;
    poly.reserve(kBoundarySamples);
    const double step = 2.0 * std::numbers::pi / vertices;
    for (int i = 0; i < kBoundarySamples; ++i) {
      const double u = static_cast<double>(i) * vertices / kBoundarySamples;
      const int v0 = static_cast<int>(u) % vertices;
      const int v1 = (v0 + 1) % vertices;
      const double frac = u - std::floor(u);
      const double a0 = rotation + v0 * step, a1 = rotation + (v0 + 1) * step;
      const double x0 = vertex_radius[v0] * std::cos(a0), y0 = vertex_radius[v0] * std::sin(a0);
      const double x1 = vertex_radius[v1] * std::cos(a1), y1 = vertex_radius[v1] * std::sin(a1);
      double x = x0 + frac * (x1 - x0), y = y0 + frac * (y1 - y0);
      const double r = std::hypot(x, y);
      const double target = std::clamp(r + rough[i], 1.0, max_radius);
      x *= target / r;
      y *= target / r;
      poly.emplace_back(x, y);
    }

    if (params.square_bbox) {
      double min_x = 1e9, max_x = -1e9, min_y = 1e9, max_y = -1e9;
      for (auto [x, y] : poly) {
        min_x = std::min(min_x, x), max_x = std::max(max_x, x);
        min_y = std::min(min_y, y), max_y = std::max(max_y, y);
      }
      const double half = std::max(max_x - min_x, max_y - min_y) / 2.0;
      const double cx = (min_x + max_x) / 2.0, cy = (min_y + max_y) / 2.0;
      const double hx = (max_x - min_x) / 2.0, hy = (max_y - min_y) / 2.0;
      for (auto& [x, y] : poly) {
        x = (x - cx) * (hx > 0 ? half / hx : 1.0);
        y = (y - cy) * (hy > 0 ? half / hy : 1.0);
        const double r = std::hypot(x, y);
        if (r > max_radius) x *= max_radius / r, y *= max_radius / r;
      }
    }

    raster::RasterImage raw(side, side, 1, raster::SampleMode::kNormalized);
    bool any = false;
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        const bool in = inside_polygon(poly, x + 0.5 - center, y + 0.5 - center);
        raw.at(x, y, 0) = in ? 1.0f : 0.0f;
        any = any || in;
      }
    }
    if (!any) continue;
    return postprocess(raw);
  }
  throw EmptyMaskError("procedural mask rasterized empty after 16 attempts");
}

std::vector<BinaryMask> sample_masks_serial(std::uint64_t seed, int count, int side,
                                            const ProceduralMaskParams& params) {
  std::vector<BinaryMask> out(count);
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    out[i] = sample_procedural_mask(rng, side, params);
  }
  return out;
}

std::vector<BinaryMask> sample_masks(std::uint64_t seed, int count, int side,
                                     const ProceduralMaskParams& params) {
  params.validate();
  if (side < 32) throw ConfigError("procedural masks need side >= 32");
  std::vector<BinaryMask> out(count);
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    out[i] = sample_procedural_mask(rng, side, params);
  }
  return out;
}

raster::RasterImage to_image(const BinaryMask& mask) {
  raster::RasterImage img(mask.side(), mask.side(), 1);
  for (int y = 0; y < mask.side(); ++y)
    for (int x = 0; x < mask.side(); ++x) img.at(x, y, 0) = mask.at(x, y) ? 255.0f : 0.0f;
  return img;
}

BinaryMask from_alpha(const raster::RasterImage& rgba) {
  if (rgba.channels() != 4) throw ShapeError("expected an RGBA image");
  if (rgba.width() != rgba.height()) throw ShapeError("piece image must be square");
  BinaryMask mask(rgba.width());
  for (int y = 0; y < rgba.height(); ++y)
    for (int x = 0; x < rgba.width(); ++x) mask.set(x, y, rgba.at(x, y, 3) > 0.0f);
  return mask;
}

void save_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
  raster::save_png(path, to_image(mask));
}

BinaryMask import_mask(const std::filesystem::path& path) {
  auto img = raster::load_image(path);
  if (img.channels() != 1) img = img.with_channels(1);
  return postprocess(img);
}

}  // namespace gap::maskforge
