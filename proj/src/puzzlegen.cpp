#include "gap/puzzlegen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

#include "json.hpp"

#include "gap/error.hpp"

namespace gap::puzzlegen {

using maskforge::BinaryMask;
using raster::RasterImage;

void GridSpec::validate() const {
  if (k < 1) throw ConfigError("grid k must be >= 1, got " + std::to_string(k));
  if (piece_side < 1) throw ConfigError("piece side must be >= 1");
  if (canvas < 1 || cell() < piece_side)
    throw ConfigError("grid cell of " + std::to_string(cell()) + " px (canvas " + std::to_string(canvas) + ", k " +
                      std::to_string(k) + ") is smaller than the " + std::to_string(piece_side) + " px piece frame");
}

GridSpec GridSpec::for_k(int k) {
  GridSpec g;
  g.k = k;
  g.canvas = k * kPieceSide;
  return g;
}

bool is_permutation(std::span<const int> p) {
  std::vector<char> seen(p.size(), 0);
  for (int v : p) {
    if (v < 0 || static_cast<std::size_t>(v) >= p.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

void require_permutation(std::span<const int> p, std::size_t n) {
  if (p.size() != n) throw DataError("permutation has " + std::to_string(p.size()) + " entries, expected " + std::to_string(n));
  if (!is_permutation(p)) throw DataError("assignment is not a permutation");
}

Permutation identity_permutation(int n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

Permutation random_permutation(int n, Rng& rng) {
  Permutation p = identity_permutation(n);
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng.uniform_index(i + 1)]);
  return p;
}

Permutation inverse(std::span<const int> p) {
  Permutation inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<int>(i);
  return inv;
}

std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw SchemaError("unknown split '" + s + "'");
}

MaskProvider procedural_masks(maskforge::ProceduralMaskParams params, int side) {
  params.validate();
  return [params, side](Rng& rng) { return maskforge::sample_procedural_mask(rng, side, params); };
}

MaskProvider square_masks(int side) {
  return [side](Rng&) {
    BinaryMask m(side);
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) m.set(x, y);
    return m;
  };
}

MaskProvider pooled_masks(std::vector<BinaryMask> pool) {
  if (pool.empty()) throw DataError("mask pool is empty");
  return [pool = std::move(pool)](Rng& rng) { return pool[rng.uniform_index(pool.size())]; };
}

PuzzleInstance make_puzzle(const RasterImage& image, const GridSpec& grid, const MaskProvider& masks, Rng& rng) {
  grid.validate();
  const RasterImage canvas =
      raster::resize_bilinear(image.converted(raster::SampleMode::kInteger).with_channels(3), grid.canvas, grid.canvas);
  const int cell = grid.cell();
  const int side = grid.piece_side;
  const int inset = (cell - side) / 2;

  PuzzleInstance out;
  out.grid = grid;
  out.ground_truth = identity_permutation(grid.size());
  for (int r = 0; r < grid.k; ++r) {
    for (int c = 0; c < grid.k; ++c) {
      Piece piece;
      piece.piece_id = r * grid.k + c;
      piece.mask = masks(rng);
      if (piece.mask.side() != side)
        throw ShapeError("mask side " + std::to_string(piece.mask.side()) + " does not match piece frame " +
                         std::to_string(side));
      piece.image = RasterImage(side, side, 4);
      const int ox = c * cell + inset;
      const int oy = r * cell + inset;
      for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
          if (!piece.mask.at(x, y)) continue;
          for (int ch = 0; ch < 3; ++ch) piece.image.at(x, y, ch) = canvas.at(ox + x, oy + y, ch);
          piece.image.at(x, y, 3) = 255.0f;
        }
      }
      out.pieces.push_back(std::move(piece));
    }
  }
  return out;
}

PuzzleInstance shuffle(const PuzzleInstance& instance, Rng& rng) {
  const Permutation order = random_permutation(static_cast<int>(instance.pieces.size()), rng);
  PuzzleInstance out = instance;
  for (std::size_t m = 0; m < order.size(); ++m) {
    out.pieces[m] = instance.pieces[order[m]];
    out.pieces[m].piece_id = static_cast<int>(m);
    out.ground_truth[m] = instance.ground_truth[order[m]];
  }
  return out;
}

RasterImage render_layout(const PuzzleInstance& instance, std::span<const int> perm) {
  const GridSpec& g = instance.grid;
  require_permutation(perm, instance.pieces.size());
  RasterImage out(g.canvas, g.canvas, 4);
  const int inset = (g.cell() - g.piece_side) / 2;
  for (std::size_t i = 0; i < instance.pieces.size(); ++i) {
    const RasterImage& img = instance.pieces[i].image;
    const int ox = (perm[i] % g.k) * g.cell() + inset;
    const int oy = (perm[i] / g.k) * g.cell() + inset;
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        if (img.at(x, y, 3) > 0.0f)
          for (int ch = 0; ch < 4; ++ch) out.at(ox + x, oy + y, ch) = img.at(x, y, ch);
  }
  return out;
}

std::vector<Split> split_dataset(std::size_t n, const SplitRatios& ratios, Rng& rng) {
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
    throw ConfigError("split ratios must be non-negative and sum to 1");
  const Permutation order = random_permutation(static_cast<int>(n), rng);
  const auto n_val = static_cast<std::size_t>(std::floor(n * ratios.val + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(n * ratios.test + 1e-9));
  std::vector<Split> out(n, Split::kTrain);
  for (std::size_t m = 0; m < n; ++m) {
    if (m < n_val)
      out[order[m]] = Split::kVal;
    else if (m < n_val + n_test)
      out[order[m]] = Split::kTest;
  }
  return out;
}

RasterImage gradient_image(Rng& rng, int side) {
  RasterImage img(side, side, 3);
  for (int ch = 0; ch < 3; ++ch) {
    const double base = rng.uniform(64.0, 192.0);
    const double slope = rng.uniform(100.0, 200.0);
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double cx = std::cos(theta), cy = std::sin(theta);
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        const double u = (x + 0.5) / side - 0.5;
        const double v = (y + 0.5) / side - 0.5;
        img.at(x, y, ch) = static_cast<float>(std::round(std::clamp(base + slope * (cx * u + cy * v), 0.0, 255.0)));
      }
    }
  }
  return img;
}

namespace {

std::string piece_file(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "piece_%02d.png", index);
  return buf;
}

}  // namespace

std::string manifest_json(const PuzzleInstance& instance) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["puzzle_id"] = instance.puzzle_id;
  j["k"] = instance.grid.k;
  j["canvas"] = instance.grid.canvas;
  j["split"] = to_string(instance.split);
  j["source"] = instance.source;
  j["pieces"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < instance.pieces.size(); ++i) {
    const int pos = instance.ground_truth[i];
    j["pieces"].push_back({{"piece_id", instance.pieces[i].piece_id},
                           {"file", piece_file(static_cast<int>(i))},
                           {"gt_row", pos / instance.grid.k},
                           {"gt_col", pos % instance.grid.k}});
  }
  return j.dump(2) + "\n";
}

void write_manifest(const std::filesystem::path& dir, const PuzzleInstance& instance) {
  std::filesystem::create_directories(dir);
  const std::string text = manifest_json(instance);
  raster::write_file(dir / "manifest.json",
                     std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  for (std::size_t i = 0; i < instance.pieces.size(); ++i)
    raster::save_png(dir / piece_file(static_cast<int>(i)), instance.pieces[i].image);
}

PuzzleInstance read_manifest(const std::filesystem::path& dir) {
  const auto bytes = raster::read_file(dir / "manifest.json");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError((dir / "manifest.json").string() + ": " + e.what());
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) throw SchemaVersionError(version, kSchemaVersion);
    PuzzleInstance out;
    out.puzzle_id = j.at("puzzle_id").get<std::string>();
    out.grid.k = j.at("k").get<int>();
    out.grid.canvas = j.at("canvas").get<int>();
    out.grid.validate();
    out.split = parse_split(j.at("split").get<std::string>());
    out.source = j.at("source").get<std::string>();
    const auto& pieces = j.at("pieces");
    if (pieces.size() != static_cast<std::size_t>(out.grid.size()))
      throw SchemaError("manifest lists " + std::to_string(pieces.size()) + " pieces, expected " +
                        std::to_string(out.grid.size()));
    for (const auto& p : pieces) {
      const int row = p.at("gt_row").get<int>();
      const int col = p.at("gt_col").get<int>();
      if (row < 0 || col < 0 || row >= out.grid.k || col >= out.grid.k)
        throw SchemaError("ground-truth cell out of range");
      Piece piece;
      piece.piece_id = p.at("piece_id").get<int>();
      piece.image = raster::load_image(dir / p.at("file").get<std::string>()).with_channels(4);
      if (piece.image.width() != out.grid.piece_side || piece.image.height() != out.grid.piece_side)
        throw SchemaError("piece image is not " + std::to_string(out.grid.piece_side) + " px square");
      piece.mask = maskforge::from_alpha(piece.image);
      out.pieces.push_back(std::move(piece));
      out.ground_truth.push_back(row * out.grid.k + col);
    }
    if (!is_permutation(out.ground_truth)) throw SchemaError("ground truth is not a permutation");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError((dir / "manifest.json").string() + ": " + e.what());
  }
}

std::string puzzle_id_for(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p%05d", index);
  return buf;
}

namespace {

std::vector<Split> dataset_splits(const DatasetConfig& config) {
  Rng rng(derive_seed(config.seed, std::string_view("splits")));
  return split_dataset(static_cast<std::size_t>(config.n), config.ratios, rng);
}

PuzzleInstance build_puzzle(const DatasetConfig& config, int index, Split split) {
  const std::string id = puzzle_id_for(index);
  Rng rng(derive_seed(config.seed, std::string_view(id)));
  const MaskProvider masks = config.masks ? config.masks : procedural_masks();
  RasterImage image;
  std::string source = "synthetic";
  if (config.sources.empty()) {
    image = gradient_image(rng, config.grid.canvas);
  } else {
    image = raster::load_image(config.sources[index]);
    source = config.sources[index].stem().string();
  }
  PuzzleInstance puzzle = shuffle(make_puzzle(image, config.grid, masks, rng), rng);
  puzzle.puzzle_id = id;
  puzzle.source = source;
  puzzle.split = split;
  return puzzle;
}

void check_config(const DatasetConfig& config) {
  if (config.n < 1) throw ConfigError("dataset size must be >= 1");
  config.grid.validate();
  if (!config.sources.empty() && config.sources.size() < static_cast<std::size_t>(config.n))
    throw ConfigError("need one source image per puzzle: " + std::to_string(config.sources.size()) + " sources for " +
                      std::to_string(config.n) + " puzzles");
}

}  // namespace

PuzzleInstance generate_puzzle(const DatasetConfig& config, int index) {
  check_config(config);
  return build_puzzle(config, index, dataset_splits(config)[index]);
}

std::vector<DatasetEntry> generate_dataset(const std::filesystem::path& root, const DatasetConfig& config) {
  check_config(config);
  const auto splits = dataset_splits(config);
  std::vector<DatasetEntry> entries(config.n);
  for (int i = 0; i < config.n; ++i) {
    entries[i].puzzle_id = puzzle_id_for(i);
    entries[i].split = splits[i];
    entries[i].dir = root / to_string(splits[i]) / entries[i].puzzle_id;
  }
  std::vector<std::string> errors(config.n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < config.n; ++i) {
    try {
      write_manifest(entries[i].dir, build_puzzle(config, i, splits[i]));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (int i = 0; i < config.n; ++i)
    if (!errors[i].empty()) throw DataError(entries[i].puzzle_id + ": " + errors[i]);
  return entries;
}

std::vector<std::filesystem::path> find_puzzles(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> out;
  if (std::filesystem::exists(root / "manifest.json")) out.push_back(root);
  if (std::filesystem::is_directory(root))
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
      if (e.is_regular_file() && e.path().filename() == "manifest.json" && e.path().parent_path() != root)
        out.push_back(e.path().parent_path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gap::puzzlegen
