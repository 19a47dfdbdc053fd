#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gap/raster.hpp"
#include "gap/rng.hpp"

namespace gap::maskforge {

// Square occupancy grid. Coordinates are (x, y) with x the column.
class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(int side) : side_(side), bits_(static_cast<std::size_t>(side) * side, 0) {}

  int side() const { return side_; }
  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < side_ && y < side_; }
  // Out-of-bounds reads as background.
  bool get(int x, int y) const { return in_bounds(x, y) && at(x, y); }

  std::size_t area() const;
  bool empty() const { return area() == 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * side_ + x; }

  int side_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct ProceduralMaskParams {
  double base_radius_fraction = 0.475;  // of the side length
  int vertex_min = 7;
  int vertex_max = 13;
  double radial_noise_amplitude = 0.18;   // fraction of the base radius
  double boundary_roughness_scale = 2.5;  // pixels
  // Rescale the shape so its bounding box is square, as the reference
  // fragments were normalized before training.
  bool square_bbox = false;

  void validate() const;
};

// Bit set iff sample > threshold (samples read in normalized scale).
BinaryMask binarize(const raster::RasterImage& gray, double threshold);

// Background pixels not 4-connected to the border through background become foreground.
BinaryMask fill_holes(const BinaryMask& mask);

// Largest 4-connected foreground component; ties go to the component whose
// first pixel comes first in row-major order. Throws EmptyMaskError.
BinaryMask largest_component(const BinaryMask& mask);

// Dilation followed by erosion with the disk {dx^2 + dy^2 <= r^2}. The frame is
// padded with background so the result is the true (extensive, idempotent)
// closing restricted to the frame.
BinaryMask morphological_close(const BinaryMask& mask, int radius = 2);

// binarize(0.5) -> fill_holes -> largest_component -> close(2), repeated on the
// result until it is a single hole-free component that closing leaves unchanged.
BinaryMask postprocess(const raster::RasterImage& raw);
BinaryMask postprocess(const BinaryMask& raw);

// Independent checks used by validation reports.
int count_components(const BinaryMask& mask);
int count_holes(const BinaryMask& mask);
bool satisfies_postprocess_invariants(const BinaryMask& mask);

// Star-convex polygon with random vertex radii plus boundary roughness,
// rasterized and run through postprocess.
BinaryMask sample_procedural_mask(Rng& rng, int side, const ProceduralMaskParams& params);

// Mask i is sampled from its own source seeded with derive_seed(seed, i).
std::vector<BinaryMask> sample_masks(std::uint64_t seed, int count, int side,
                                     const ProceduralMaskParams& params);
std::vector<BinaryMask> sample_masks_serial(std::uint64_t seed, int count, int side,
                                            const ProceduralMaskParams& params);

raster::RasterImage to_image(const BinaryMask& mask);  // 8-bit gray, 0 / 255
BinaryMask from_alpha(const raster::RasterImage& rgba);  // alpha > 0
void save_mask_png(const std::filesystem::path& path, const BinaryMask& mask);
// Loads a grayscale (or RGB) PNG and runs it through postprocess.
BinaryMask import_mask(const std::filesystem::path& path);

}  // namespace gap::maskforge
