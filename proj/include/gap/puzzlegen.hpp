#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gap/maskforge.hpp"
#include "gap/raster.hpp"
#include "gap/rng.hpp"

namespace gap::puzzlegen {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kPieceSide = 128;

struct GridSpec {
  int k = 3;
  int canvas = 384;
  int piece_side = kPieceSide;

  int cell() const { return canvas / k; }
  int size() const { return k * k; }
  // Throws ConfigError when k < 1 or the piece frame does not fit a cell.
  void validate() const;
  // 384 for k = 3, 640 for k = 5, otherwise k * 128.
  static GridSpec for_k(int k);

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Entry i is the position index (row * k + col) of piece i.
using Permutation = std::vector<int>;

bool is_permutation(std::span<const int> p);
// Throws DataError unless p is a bijection on {0..n-1}.
void require_permutation(std::span<const int> p, std::size_t n);
Permutation identity_permutation(int n);
Permutation random_permutation(int n, Rng& rng);  // Fisher-Yates
Permutation inverse(std::span<const int> p);

enum class Split { kTrain, kVal, kTest };
std::string to_string(Split s);
Split parse_split(const std::string& s);

struct Piece {
  int piece_id = 0;
  raster::RasterImage image;  // RGBA 8-bit, alpha = 255 * mask
  maskforge::BinaryMask mask;

  friend bool operator==(const Piece&, const Piece&) = default;
};

struct PuzzleInstance {
  std::string puzzle_id;
  GridSpec grid;
  std::vector<Piece> pieces;
  Permutation ground_truth;
  std::string source = "synthetic";
  Split split = Split::kTrain;

  friend bool operator==(const PuzzleInstance&, const PuzzleInstance&) = default;
};

// Produces one postprocessed mask of the requested side per call.
using MaskProvider = std::function<maskforge::BinaryMask(Rng&)>;

MaskProvider procedural_masks(maskforge::ProceduralMaskParams params = {}, int side = kPieceSide);
MaskProvider square_masks(int side = kPieceSide);  // fully opaque frame
// Draws uniformly from a fixed pool of imported masks.
MaskProvider pooled_masks(std::vector<maskforge::BinaryMask> pool);

// Resizes the image to the canvas and cuts one masked piece per cell, in
// row-major order, so the returned ground truth is the identity.
PuzzleInstance make_puzzle(const raster::RasterImage& image, const GridSpec& grid,
                           const MaskProvider& masks, Rng& rng);

// Fisher-Yates reorder of the pieces; piece ids are renumbered to the new
// order and the ground truth follows each piece.
PuzzleInstance shuffle(const PuzzleInstance& instance, Rng& rng);

// Canvas with piece i drawn in the cell perm[i]. Uncovered pixels stay (0,0,0,0).
raster::RasterImage render_layout(const PuzzleInstance& instance, std::span<const int> perm);

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

// Shuffles the indices, then val = floor(n * val), test = floor(n * test) and
// the remainder is train. Result is aligned with the input order.
std::vector<Split> split_dataset(std::size_t n, const SplitRatios& ratios, Rng& rng);

// Horizontal/vertical colour ramps with a random direction per channel.
raster::RasterImage gradient_image(Rng& rng, int side);

// Writes <dir>/manifest.json and <dir>/piece_##.png.
void write_manifest(const std::filesystem::path& dir, const PuzzleInstance& instance);
PuzzleInstance read_manifest(const std::filesystem::path& dir);
// The manifest text alone (stable key order, 2-space indent, trailing newline).
std::string manifest_json(const PuzzleInstance& instance);

struct DatasetConfig {
  int n = 10;
  GridSpec grid;
  std::uint64_t seed = 0;
  SplitRatios ratios;
  // Source images; when empty each puzzle gets its own gradient image.
  std::vector<std::filesystem::path> sources;
  MaskProvider masks;
};

struct DatasetEntry {
  std::string puzzle_id;
  Split split = Split::kTrain;
  std::filesystem::path dir;
};

std::string puzzle_id_for(int index);  // "p00000", "p00001", ...

// Builds and writes n puzzles under <root>/<split>/<puzzle_id>/. Each puzzle
// draws from Rng(derive_seed(seed, puzzle_id)), so output does not depend on
// scheduling.
std::vector<DatasetEntry> generate_dataset(const std::filesystem::path& root, const DatasetConfig& config);
// Same puzzles without touching the filesystem (sources must be empty).
PuzzleInstance generate_puzzle(const DatasetConfig& config, int index);

// All manifest directories below root, sorted by path.
std::vector<std::filesystem::path> find_puzzles(const std::filesystem::path& root);

}  // namespace gap::puzzlegen
