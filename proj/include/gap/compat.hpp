#pragma once

#include <array>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "gap/raster.hpp"

namespace gap::compat {

// D(i, j, RIGHT) scores j placed directly to the right of i.
enum class Direction { kLeft = 0, kRight = 1, kUp = 2, kDown = 3 };
inline constexpr std::array<Direction, 4> kDirections = {Direction::kLeft, Direction::kRight, Direction::kUp,
                                                         Direction::kDown};

Direction opposite(Direction d);
// Grid offset of the neighbour lying in direction d (x is the column).
int dx(Direction d);
int dy(Direction d);
const char* name(Direction d);

inline constexpr double kP = 0.3;
inline constexpr double kQ = 0.0625;
inline constexpr double kNormalizerFloor = 1e-12;

// Outermost opaque pixel per row (LEFT/RIGHT) or column (UP/DOWN), in
// scanline order, plus the next opaque pixel inward. Rows without opaque
// pixels are skipped.
struct EdgeSequence {
  Direction direction = Direction::kRight;
  std::vector<raster::Lab> outer;
  std::vector<raster::Lab> inner;  // falls back to outer when there is no second pixel

  std::size_t length() const { return outer.size(); }
};

// Opaque means alpha > 0; RGB images are treated as fully opaque. Throws
// EmptyMaskError for a fully transparent piece.
EdgeSequence edge_sequence(const raster::RasterImage& piece, Direction d);
EdgeSequence edge_sequence(const raster::LabImage& lab, const raster::RasterImage& piece, Direction d);

// The four edges of one piece, computed once per table.
struct PieceEdges {
  std::array<EdgeSequence, 4> edges;
  const EdgeSequence& operator[](Direction d) const { return edges[static_cast<int>(d)]; }
};
PieceEdges piece_edges(const raster::RasterImage& piece);

// Prediction-based dissimilarity of `a` facing `b`, where `a` is the edge of
// piece i in direction r and `b` the edge of piece j in direction opposite(r).
// Per sample k the Lab channel terms |2 e^k - e_in^k - f^k|^P are summed, the
// two one-sided sums are added and raised to Q/P. The longer sequence is
// resampled to the shorter by nearest index.
double edge_dissimilarity(const EdgeSequence& a, const EdgeSequence& b);
double dissimilarity(const PieceEdges& i, const PieceEdges& j, Direction r);

// Index of the nearest sample when resampling `from` samples down to `to`.
inline std::size_t resample_index(std::size_t k, std::size_t from, std::size_t to) {
  return static_cast<std::size_t>((k + 0.5) * static_cast<double>(from) / static_cast<double>(to));
}

// Linear interpolation between order statistics at rank q * (n - 1).
double percentile(std::vector<double> values, double q);

class CompatibilityTable {
 public:
  CompatibilityTable() = default;
  // Derives normalizers, C and best buddies from raw dissimilarities laid out
  // direction-major: D[(r * n + i) * n + j]. Diagonal entries are ignored.
  CompatibilityTable(int n, std::vector<double> dissimilarities);

  int size() const { return n_; }
  double d(int i, int j, Direction r) const { return d_[index(r, i, j)]; }
  double c(int i, int j, Direction r) const { return c_[index(r, i, j)]; }
  double normalizer(int i, Direction r) const { return norm_[static_cast<int>(r) * n_ + i]; }
  // Mutual-argmax partner of i in direction r, or -1.
  int best_buddy(int i, Direction r) const { return buddy_[static_cast<int>(r) * n_ + i]; }
  bool are_best_buddies(int i, int j, Direction r) const { return best_buddy(i, r) == j; }
  int best_buddy_count(int i) const;
  const std::vector<double>& dissimilarities() const { return d_; }

 private:
  std::size_t index(Direction r, int i, int j) const {
    return (static_cast<std::size_t>(r) * n_ + i) * n_ + j;
  }

  int n_ = 0;
  std::vector<double> d_;
  std::vector<double> c_;
  std::vector<double> norm_;
  std::vector<int> buddy_;
};

// Throws DataError for fewer than two pieces. Rows (i, r) are computed in
// parallel; the serial variant is the reference.
CompatibilityTable compatibility_table(std::span<const raster::RasterImage> pieces);
CompatibilityTable compatibility_table_serial(std::span<const raster::RasterImage> pieces);
std::vector<double> dissimilarity_matrix(std::span<const PieceEdges> edges);
std::vector<double> dissimilarity_matrix_serial(std::span<const PieceEdges> edges);

// Fraction of adjacent occupied pairs that are best buddies in their joining
// direction. `layout` is a rows x cols grid of piece indices with -1 for an
// empty cell. No adjacent pairs gives 1.
double bbm(std::span<const int> layout, int rows, int cols, const CompatibilityTable& table);
// Same for a complete k x k placement given as piece -> position.
double bbm_of_permutation(std::span<const int> perm, int k, const CompatibilityTable& table);

// Raw little-endian float64 values, direction-major.
void write_dissimilarity_cache(const std::filesystem::path& path, const std::vector<double>& d);
std::vector<double> read_dissimilarity_cache(const std::filesystem::path& path, int n);

}  // namespace gap::compat
