#include "gap/compat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "gap/error.hpp"

namespace gap::compat {

using raster::Lab;
using raster::LabImage;
using raster::RasterImage;

Direction opposite(Direction d) {
  switch (d) {
    case Direction::kLeft: return Direction::kRight;
    case Direction::kRight: return Direction::kLeft;
    case Direction::kUp: return Direction::kDown;
    case Direction::kDown: return Direction::kUp;
  }
  return d;
}

int dx(Direction d) { return d == Direction::kLeft ? -1 : d == Direction::kRight ? 1 : 0; }
int dy(Direction d) { return d == Direction::kUp ? -1 : d == Direction::kDown ? 1 : 0; }

const char* name(Direction d) {
  switch (d) {
    case Direction::kLeft: return "left";
    case Direction::kRight: return "right";
    case Direction::kUp: return "up";
    case Direction::kDown: return "down";
  }
  return "?";
}

EdgeSequence edge_sequence(const LabImage& lab, const RasterImage& piece, Direction d) {
  const int w = piece.width(), h = piece.height();
  const bool has_alpha = piece.channels() == 4;
  auto opaque = [&](int x, int y) { return !has_alpha || piece.at(x, y, 3) > 0.0f; };

  EdgeSequence seq;
  seq.direction = d;
  const bool horizontal = d == Direction::kLeft || d == Direction::kRight;
  const int lines = horizontal ? h : w;
  const int depth = horizontal ? w : h;
  const bool from_far_end = d == Direction::kRight || d == Direction::kDown;
  for (int line = 0; line < lines; ++line) {
    int found = 0;
    const Lab* first = nullptr;
    const Lab* second = nullptr;
    for (int s = 0; s < depth && found < 2; ++s) {
      const int along = from_far_end ? depth - 1 - s : s;
      const int x = horizontal ? along : line;
      const int y = horizontal ? line : along;
      if (!opaque(x, y)) continue;
      (found == 0 ? first : second) = &lab.at(x, y);
      ++found;
    }
    if (!first) continue;
    seq.outer.push_back(*first);
    seq.inner.push_back(second ? *second : *first);
  }
  if (seq.outer.empty()) throw EmptyMaskError("piece has no opaque pixels");
  return seq;
}

EdgeSequence edge_sequence(const RasterImage& piece, Direction d) {
  return edge_sequence(raster::rgb_to_lab(piece), piece, d);
}

PieceEdges piece_edges(const RasterImage& piece) {
  const LabImage lab = raster::rgb_to_lab(piece);
  PieceEdges out;
  for (Direction d : kDirections) out.edges[static_cast<int>(d)] = edge_sequence(lab, piece, d);
  return out;
}

namespace {

double channel_terms(const Lab& e, const Lab& e_in, const Lab& f) {
  return std::pow(std::abs(2.0 * e.L - e_in.L - f.L), kP) + std::pow(std::abs(2.0 * e.a - e_in.a - f.a), kP) +
         std::pow(std::abs(2.0 * e.b - e_in.b - f.b), kP);
}

}  // namespace

double edge_dissimilarity(const EdgeSequence& a, const EdgeSequence& b) {
  const std::size_t n = std::min(a.length(), b.length());
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t ka = resample_index(k, a.length(), n);
    const std::size_t kb = resample_index(k, b.length(), n);
    const double s = channel_terms(a.outer[ka], a.inner[ka], b.outer[kb]) +
                     channel_terms(b.outer[kb], b.inner[kb], a.outer[ka]);
    total += std::pow(s, kQ / kP);
  }
  return total;
}

double dissimilarity(const PieceEdges& i, const PieceEdges& j, Direction r) {
  return edge_dissimilarity(i[r], j[opposite(r)]);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw DataError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

CompatibilityTable::CompatibilityTable(int n, std::vector<double> dissimilarities)
    : n_(n), d_(std::move(dissimilarities)) {
  if (n < 2) throw DataError("a compatibility table needs at least 2 pieces");
  if (d_.size() != 4u * n * n) throw DataError("dissimilarity matrix has the wrong size");
  c_.assign(d_.size(), 0.0);
  norm_.assign(4u * n, 0.0);
  buddy_.assign(4u * n, -1);
  std::vector<double> row;
  for (Direction r : kDirections) {
    for (int i = 0; i < n; ++i) {
      d_[index(r, i, i)] = std::numeric_limits<double>::infinity();
      row.clear();
      for (int j = 0; j < n; ++j)
        if (j != i) row.push_back(d_[index(r, i, j)]);
      const double norm = std::max(percentile(row, 0.25), kNormalizerFloor);
      norm_[static_cast<int>(r) * n + i] = norm;
      for (int j = 0; j < n; ++j)
        if (j != i) c_[index(r, i, j)] = std::exp(-d_[index(r, i, j)] / norm);
    }
  }
  auto argmax = [&](int i, Direction r) {
    int best = -1;
    for (int j = 0; j < n; ++j)
      if (j != i && (best < 0 || c_[index(r, i, j)] > c_[index(r, i, best)])) best = j;
    return best;
  };
  std::vector<int> top(4u * n);
  for (Direction r : kDirections)
    for (int i = 0; i < n; ++i) top[static_cast<int>(r) * n + i] = argmax(i, r);
  for (Direction r : kDirections) {
    for (int i = 0; i < n; ++i) {
      const int j = top[static_cast<int>(r) * n + i];
      if (top[static_cast<int>(opposite(r)) * n + j] == i) buddy_[static_cast<int>(r) * n + i] = j;
    }
  }
}

int CompatibilityTable::best_buddy_count(int i) const {
  int count = 0;
  for (Direction r : kDirections) count += best_buddy(i, r) >= 0;
  return count;
}

std::vector<double> dissimilarity_matrix_serial(std::span<const PieceEdges> edges) {
  const std::size_t n = edges.size();
  std::vector<double> d(4 * n * n, 0.0);
  for (std::size_t row = 0; row < 4 * n; ++row) {
    const auto r = static_cast<Direction>(row / n);
    const std::size_t i = row % n;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) d[row * n + j] = dissimilarity(edges[i], edges[j], r);
  }
  return d;
}

std::vector<double> dissimilarity_matrix(std::span<const PieceEdges> edges) {
  const std::size_t n = edges.size();
  std::vector<double> d(4 * n * n, 0.0);
  const auto rows = static_cast<std::ptrdiff_t>(4 * n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t row = 0; row < rows; ++row) {
    const auto r = static_cast<Direction>(row / n);
    const std::size_t i = row % n;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) d[row * n + j] = dissimilarity(edges[i], edges[j], r);
  }
  return d;
}

namespace {

std::vector<PieceEdges> all_edges(std::span<const RasterImage> pieces, bool parallel) {
  if (pieces.size() < 2) throw DataError("a compatibility table needs at least 2 pieces");
  std::vector<PieceEdges> edges(pieces.size());
  std::vector<std::string> errors(pieces.size());
  const auto n = static_cast<std::ptrdiff_t>(pieces.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      edges[i] = piece_edges(pieces[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw DataError("piece " + std::to_string(i) + ": " + errors[i]);
  return edges;
}

}  // namespace

CompatibilityTable compatibility_table(std::span<const RasterImage> pieces) {
  const auto edges = all_edges(pieces, true);
  return CompatibilityTable(static_cast<int>(pieces.size()), dissimilarity_matrix(edges));
}

CompatibilityTable compatibility_table_serial(std::span<const RasterImage> pieces) {
  const auto edges = all_edges(pieces, false);
  return CompatibilityTable(static_cast<int>(pieces.size()), dissimilarity_matrix_serial(edges));
}

double bbm(std::span<const int> layout, int rows, int cols, const CompatibilityTable& table) {
  int edges = 0, buddies = 0;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      const int a = layout[y * cols + x];
      if (a < 0) continue;
      if (x + 1 < cols && layout[y * cols + x + 1] >= 0) {
        ++edges;
        buddies += table.are_best_buddies(a, layout[y * cols + x + 1], Direction::kRight);
      }
      if (y + 1 < rows && layout[(y + 1) * cols + x] >= 0) {
        ++edges;
        buddies += table.are_best_buddies(a, layout[(y + 1) * cols + x], Direction::kDown);
      }
    }
  }
  return edges == 0 ? 1.0 : static_cast<double>(buddies) / edges;
}

double bbm_of_permutation(std::span<const int> perm, int k, const CompatibilityTable& table) {
  std::vector<int> layout(static_cast<std::size_t>(k) * k, -1);
  for (std::size_t i = 0; i < perm.size(); ++i) layout[perm[i]] = static_cast<int>(i);
  return bbm(layout, k, k, table);
}

void write_dissimilarity_cache(const std::filesystem::path& path, const std::vector<double>& d) {
  std::vector<std::uint8_t> bytes(d.size() * 8);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(d[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  raster::write_file(path, bytes);
}

std::vector<double> read_dissimilarity_cache(const std::filesystem::path& path, int n) {
  const auto bytes = raster::read_file(path);
  const std::size_t count = 4u * n * n;
  if (bytes.size() != count * 8)
    throw DataError(path.string() + ": cache holds " + std::to_string(bytes.size()) + " bytes, expected " +
                    std::to_string(count * 8));
  std::vector<double> d(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    d[i] = std::bit_cast<double>(bits);
  }
  return d;
}

}  // namespace gap::compat
