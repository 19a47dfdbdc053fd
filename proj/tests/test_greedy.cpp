#include <gtest/gtest.h>

#include <algorithm>
#include <limits>

#include "gap/compat.hpp"
#include "gap/error.hpp"
#include "gap/eval.hpp"
#include "gap/puzzlegen.hpp"
#include "gap/solve.hpp"

using namespace gap;
using compat::Direction;

namespace {

puzzlegen::PuzzleInstance square_gradient(int k, std::uint64_t seed) {
  Rng rng(seed);
  const auto img = puzzlegen::gradient_image(rng, k * 128);
  auto inst = puzzlegen::make_puzzle(img, puzzlegen::GridSpec::for_k(k), puzzlegen::square_masks(), rng);
  return puzzlegen::shuffle(inst, rng);
}

compat::CompatibilityTable table_of(const puzzlegen::PuzzleInstance& inst) {
  std::vector<raster::RasterImage> images;
  for (const auto& p : inst.pieces) images.push_back(p.image);
  return compat::compatibility_table(images);
}

// Total RIGHT + DOWN dissimilarity of a piece -> position assignment.
double total_d(const std::vector<int>& perm, int k, const compat::CompatibilityTable& t) {
  const auto layout = puzzlegen::inverse(perm);
  double sum = 0;
  for (int y = 0; y < k; ++y)
    for (int x = 0; x < k; ++x) {
      if (x + 1 < k) sum += t.d(layout[y * k + x], layout[y * k + x + 1], Direction::kRight);
      if (y + 1 < k) sum += t.d(layout[y * k + x], layout[(y + 1) * k + x], Direction::kDown);
    }
  return sum;
}

}  // namespace

TEST(Greedy, SinglePiece) {
  const auto r = solve::greedy_solve(compat::CompatibilityTable(), 1);
  EXPECT_EQ(r.perm, puzzlegen::Permutation{0});
}

TEST(Greedy, TwoByTwoGradientMatchesExhaustiveOptimum) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = square_gradient(2, seed);
    const auto table = table_of(inst);
    std::vector<int> p = {0, 1, 2, 3}, best;
    double best_d = std::numeric_limits<double>::infinity();
    do {
      const double d = total_d(p, 2, table);
      if (d < best_d) best_d = d, best = p;
    } while (std::next_permutation(p.begin(), p.end()));
    ASSERT_EQ(best, inst.ground_truth) << "ground truth is not the 4! optimum, seed " << seed;
    EXPECT_EQ(solve::greedy_solve(table, 2).perm, inst.ground_truth) << "seed " << seed;
  }
}

TEST(Greedy, IdenticalPiecesGiveValidDeterministicResult) {
  std::vector<raster::RasterImage> pieces;
  for (int i = 0; i < 9; ++i) {
    raster::RasterImage img(16, 16, 4);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) img.at(x, y, 0) = 120, img.at(x, y, 1) = 30, img.at(x, y, 2) = 60, img.at(x, y, 3) = 255;
    pieces.push_back(img);
  }
  const auto table = compat::compatibility_table(pieces);
  const auto a = solve::greedy_solve(table, 3), b = solve::greedy_solve(table, 3);
  EXPECT_TRUE(puzzlegen::is_permutation(a.perm));
  EXPECT_EQ(a.perm, b.perm);
  EXPECT_GE(a.bbm, 0.0);
  EXPECT_LE(a.bbm, 1.0);
}

TEST(Greedy, SquareThreeByThreeHighAccuracy) {
  double correct = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto inst = square_gradient(3, seed);
    const auto table = table_of(inst);
    const auto r = solve::greedy_solve(table, 3);
    ASSERT_TRUE(puzzlegen::is_permutation(r.perm));
    EXPECT_DOUBLE_EQ(r.bbm, compat::bbm_of_permutation(r.perm, 3, table));
    correct += eval::piece_accuracy(r.perm, inst.ground_truth);
  }
  EXPECT_GE(correct / 20, 0.95);
}

TEST(Greedy, SizeMismatchThrows) {
  const auto inst = square_gradient(2, 1);
  EXPECT_THROW(solve::greedy_solve(table_of(inst), 3), DataError);
}
