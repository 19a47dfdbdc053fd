#include <gtest/gtest.h>

#include <filesystem>

#include "gap/error.hpp"
#include "gap/maskforge.hpp"
#include "oracles.hpp"

using namespace gap::maskforge;
using gap::raster::RasterImage;
using gap::raster::SampleMode;

namespace {

BinaryMask disk(int side, double cx, double cy, double r) {
  BinaryMask m(side);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y);
  return m;
}

BinaryMask ring(int side, double c, double r_in, double r_out) {
  BinaryMask m(side);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      const double d2 = (x - c) * (x - c) + (y - c) * (y - c);
      if (d2 <= r_out * r_out && d2 > r_in * r_in) m.set(x, y);
    }
  return m;
}

BinaryMask unite(const BinaryMask& a, const BinaryMask& b) {
  BinaryMask out(a.side());
  for (int y = 0; y < a.side(); ++y)
    for (int x = 0; x < a.side(); ++x) out.set(x, y, a.at(x, y) || b.at(x, y));
  return out;
}

RasterImage constant_gray(int side, float v) {
  RasterImage img(side, side, 1, SampleMode::kNormalized);
  for (auto& s : img.samples()) s = v;
  return img;
}

// Border flood fill of the background, everything unreached is foreground.
BinaryMask filled_by_oracle(const BinaryMask& m) {
  const int n = m.side();
  std::vector<char> outside(n * n, 0);
  std::vector<std::pair<int, int>> stack;
  for (int i = 0; i < n; ++i)
    for (auto p : {std::pair{i, 0}, std::pair{i, n - 1}, std::pair{0, i}, std::pair{n - 1, i}})
      if (!m.at(p.first, p.second) && !outside[p.second * n + p.first]) {
        outside[p.second * n + p.first] = 1;
        stack.push_back(p);
      }
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    for (auto [nx, ny] : {std::pair{x + 1, y}, std::pair{x - 1, y}, std::pair{x, y + 1}, std::pair{x, y - 1}}) {
      if (nx < 0 || ny < 0 || nx >= n || ny >= n || m.at(nx, ny) || outside[ny * n + nx]) continue;
      outside[ny * n + nx] = 1;
      stack.push_back({nx, ny});
    }
  }
  BinaryMask out(n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) out.set(x, y, !outside[y * n + x]);
  return out;
}

}  // namespace

TEST(Binarize, ThresholdIsStrict) {
  EXPECT_EQ(binarize(constant_gray(8, 0.49f), 0.5).area(), 0u);
  EXPECT_EQ(binarize(constant_gray(8, 0.51f), 0.5).area(), 64u);
  EXPECT_EQ(binarize(constant_gray(8, 0.5f), 0.5).area(), 0u);
}

TEST(Binarize, RejectsNonSquare) {
  RasterImage img(4, 3, 1);
  EXPECT_THROW(binarize(img, 0.5), gap::ShapeError);
}

TEST(FillHoles, RingBecomesDisk) {
  const BinaryMask r = ring(64, 32, 10, 20);
  EXPECT_EQ(fill_holes(r), disk(64, 32, 32, 20));
}

TEST(FillHoles, HoleFreeUnchanged) {
  const BinaryMask d = disk(64, 30, 30, 15);
  EXPECT_EQ(fill_holes(d), d);
}

TEST(FillHoles, NestedRingsMatchOracle) {
  const BinaryMask m = unite(ring(96, 48, 35, 44), ring(96, 48, 10, 20));
  const BinaryMask filled = fill_holes(m);
  EXPECT_EQ(filled, filled_by_oracle(m));
  EXPECT_EQ(filled, disk(96, 48, 48, 44));
}

TEST(LargestComponent, KeepsBigger) {
  BinaryMask m(16);
  for (int x = 0; x < 10; ++x) m.set(x, 2);
  for (int x = 0; x < 5; ++x) m.set(x, 8);
  BinaryMask expected(16);
  for (int x = 0; x < 10; ++x) expected.set(x, 2);
  EXPECT_EQ(largest_component(m), expected);
  EXPECT_EQ(largest_component(expected), expected);
}

TEST(LargestComponent, TieGoesToFirstInRowMajor) {
  BinaryMask m(16);
  for (int x = 0; x < 4; ++x) m.set(x + 10, 3);  // starts at row 3
  for (int x = 0; x < 4; ++x) m.set(x, 6);       // starts at row 6
  BinaryMask expected(16);
  for (int x = 0; x < 4; ++x) expected.set(x + 10, 3);
  EXPECT_EQ(largest_component(m), expected);
}

TEST(LargestComponent, EmptyThrows) { EXPECT_THROW(largest_component(BinaryMask(8)), gap::EmptyMaskError); }

TEST(Close, DiskUnchanged) {
  const BinaryMask d = disk(96, 48, 48, 30);
  EXPECT_EQ(morphological_close(d, 2), d);
}

TEST(Close, BridgesGapOfTwo) {
  // Two 3x5 bars one pixel apart; direct dilate / erode with the radius-2 disk.
  const int n = 11, r = 2;
  BinaryMask m(n);
  for (int y = 3; y <= 7; ++y)
    for (int x : {2, 3, 4, 6, 7, 8}) m.set(x, y);
  std::vector<char> dil(n * n, 0), ero(n * n, 0);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
          if (dx * dx + dy * dy <= r * r && m.get(x + dx, y + dy)) dil[y * n + x] = 1;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      bool all = true;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          if (dx * dx + dy * dy > r * r) continue;
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= n || yy >= n || !dil[yy * n + xx]) all = false;
        }
      ero[y * n + x] = all;
    }
  const BinaryMask closed = morphological_close(m, 2);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) EXPECT_EQ(closed.at(x, y), ero[y * n + x] != 0) << x << "," << y;
  EXPECT_TRUE(closed.at(5, 4) && closed.at(5, 5) && closed.at(5, 6));
  EXPECT_FALSE(m.at(5, 5));
}

TEST(Close, EmptyStaysEmpty) { EXPECT_EQ(morphological_close(BinaryMask(10), 2), BinaryMask(10)); }

TEST(Postprocess, CleanBlob) {
  const BinaryMask d = disk(64, 32, 32, 20);
  EXPECT_EQ(postprocess(d), d);
}

TEST(Postprocess, PinholeAndSpeck) {
  BinaryMask m = disk(64, 30, 30, 18);
  m.set(30, 30, false);
  m.set(60, 60);
  EXPECT_EQ(postprocess(m), disk(64, 30, 30, 18));
}

TEST(Postprocess, AllZeroThrows) {
  EXPECT_THROW(postprocess(constant_gray(16, 0.0f)), gap::EmptyMaskError);
}

TEST(Procedural, NoNoiseIsRegularPolygonDisk) {
  ProceduralMaskParams p;
  p.radial_noise_amplitude = 0.0;
  p.boundary_roughness_scale = 0.0;
  gap::Rng rng(5);
  const BinaryMask m = sample_procedural_mask(rng, 128, p);
  const double r = p.base_radius_fraction * 128;
  // a regular polygon with >= 7 vertices inscribed in radius r
  const double lo = 0.5 * 7 * r * r * std::sin(2 * M_PI / 7);
  EXPECT_GE(m.area(), lo * 0.97);
  EXPECT_LE(m.area(), M_PI * r * r * 1.03);
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x)
      if (m.at(x, y)) EXPECT_LE(std::hypot(x + 0.5 - 64, y + 0.5 - 64), r + 2.0);
}

TEST(Procedural, SameSeedSameMask) {
  EXPECT_EQ(sample_masks(9, 5, 128, {}), sample_masks(9, 5, 128, {}));
  EXPECT_NE(sample_masks(9, 1, 128, {}), sample_masks(10, 1, 128, {}));
}

TEST(Procedural, ParallelMatchesSerial) {
  EXPECT_EQ(sample_masks(3, 24, 128, {}), sample_masks_serial(3, 24, 128, {}));
}

TEST(Procedural, CalibratedMeanArea) {
  const auto masks = sample_masks(1, 1000, 128, {});
  double sum = 0;
  for (const auto& m : masks) sum += m.area();
  const double mean = sum / masks.size();
  EXPECT_GE(mean, 10716 * 0.85);
  EXPECT_LE(mean, 10716 * 1.15);
}

TEST(Procedural, OutputsPassFloodFillAndAreIdempotent) {
  const auto masks = sample_masks(11, 200, 128, {});
  for (const auto& m : masks) {
    const auto t = oracle::topology(m);
    ASSERT_EQ(t.components, 1);
    ASSERT_EQ(t.holes, 0);
    ASSERT_EQ(postprocess(m), m);
  }
}

TEST(Procedural, InvalidParams) {
  ProceduralMaskParams p;
  p.vertex_min = 2;
  EXPECT_THROW(p.validate(), gap::ConfigError);
}

TEST(Counting, AgreesWithOracle) {
  const BinaryMask m = unite(ring(64, 32, 8, 14), disk(64, 55, 55, 4));
  const auto t = oracle::topology(m);
  EXPECT_EQ(count_components(m), t.components);
  EXPECT_EQ(count_holes(m), t.holes);
  EXPECT_EQ(t.components, 2);
  EXPECT_EQ(t.holes, 1);
}

TEST(MaskIo, SaveImportRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "gap_mask_test.png";
  const BinaryMask d = disk(128, 60, 64, 40);
  save_mask_png(path, d);
  EXPECT_EQ(import_mask(path), d);
  std::filesystem::remove(path);
}

TEST(MaskIo, FromAlpha) {
  RasterImage img(4, 4, 4);
  img.at(1, 2, 3) = 1;
  const BinaryMask m = from_alpha(img);
  EXPECT_EQ(m.area(), 1u);
  EXPECT_TRUE(m.at(1, 2));
}
