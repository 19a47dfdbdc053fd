#include <gtest/gtest.h>

#include "gap/error.hpp"
#include "gap/eval.hpp"
#include "gap/rng.hpp"
#include "oracles.hpp"

using namespace gap;
using namespace gap::eval;
using puzzlegen::Permutation;

namespace {

Permutation identity(int n) {
  Permutation p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  return p;
}

}  // namespace

TEST(PerfectAccuracy, Examples) {
  const std::vector<Permutation> gts(4, identity(9));
  EXPECT_DOUBLE_EQ(perfect_accuracy(gts, gts), 100.0);
  std::vector<Permutation> none(4, Permutation{1, 0, 2, 3, 4, 5, 6, 7, 8});
  EXPECT_DOUBLE_EQ(perfect_accuracy(none, gts), 0.0);
  auto one = none;
  one[2] = identity(9);
  EXPECT_DOUBLE_EQ(perfect_accuracy(one, gts), 25.0);
  EXPECT_THROW(perfect_accuracy(std::vector<Permutation>(3, identity(9)), gts), DataError);
}

TEST(AbsoluteAccuracy, Examples) {
  const std::vector<Permutation> gt{identity(9)};
  EXPECT_DOUBLE_EQ(absolute_accuracy(gt, gt), 100.0);
  const std::vector<Permutation> swapped{{1, 0, 2, 3, 4, 5, 6, 7, 8}};
  EXPECT_NEAR(absolute_accuracy(swapped, gt), 700.0 / 9.0, 1e-12);
  EXPECT_THROW(absolute_accuracy(std::vector<Permutation>{identity(4)}, gt), DataError);
}

TEST(AbsoluteAccuracy, UniformRandomNearOneNinth) {
  Rng rng(1);
  std::vector<Permutation> preds, gts;
  for (int i = 0; i < 2000; ++i) {
    preds.push_back(puzzlegen::random_permutation(9, rng));
    gts.push_back(puzzlegen::random_permutation(9, rng));
  }
  EXPECT_NEAR(absolute_accuracy(preds, gts), 100.0 / 9.0, 1.0);
}

TEST(Sra, Identity) { EXPECT_DOUBLE_EQ(sra(identity(9), identity(9), 3), 1.0); }

TEST(Sra, AdjacentSwap) {
  const Permutation swapped = {1, 0, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_DOUBLE_EQ(sra(swapped, identity(9), 3), 8.0 / 12.0);
  EXPECT_DOUBLE_EQ(oracle::sra(swapped, identity(9), 3), 8.0 / 12.0);
}

TEST(Sra, AgreesWithPairOracleOnAllOfS9) {
  Permutation p = identity(9);
  const Permutation gt = {4, 0, 8, 2, 6, 1, 3, 7, 5};
  do ASSERT_DOUBLE_EQ(sra(p, gt, 3), oracle::sra(p, gt, 3));
  while (std::next_permutation(p.begin(), p.end()));
}

TEST(Sra, RandomMeanMatchesExhaustive) {
  const double exact = oracle::exhaustive_random_sra(3);
  EXPECT_NEAR(exact, 1.0 / 12.0, 1e-12);  // each of the 12 pairs survives with prob 6/72
  Rng rng(2);
  const Permutation gt = identity(9);
  double sum = 0;
  const int draws = 1000000;
  for (int d = 0; d < draws; ++d) sum += sra(puzzlegen::random_permutation(9, rng), gt, 3);
  EXPECT_NEAR(sum / draws, exact, 0.002);
}

TEST(Sra, NonSquareThrows) { EXPECT_THROW(sra(identity(8), identity(8), 3), DataError); }

TEST(Sra, SinglePiece) { EXPECT_DOUBLE_EQ(sra(identity(1), identity(1), 1), 1.0); }

TEST(Metrics, RelabelingInvariance) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto pred = puzzlegen::random_permutation(16, rng), gt = puzzlegen::random_permutation(16, rng);
    const auto relabel = puzzlegen::random_permutation(16, rng);
    Permutation pred2(16), gt2(16);
    for (int i = 0; i < 16; ++i) pred2[relabel[i]] = pred[i], gt2[relabel[i]] = gt[i];
    EXPECT_DOUBLE_EQ(sra(pred, gt, 4), sra(pred2, gt2, 4));
    EXPECT_DOUBLE_EQ(piece_accuracy(pred, gt), piece_accuracy(pred2, gt2));
  }
}

TEST(Metrics, PerfectIffAllAgree) {
  Rng rng(4);
  for (int t = 0; t < 2000; ++t) {
    const auto pred = puzzlegen::random_permutation(4, rng), gt = puzzlegen::random_permutation(4, rng);
    const bool exact = pred == gt;
    EXPECT_EQ(exact, piece_accuracy(pred, gt) == 1.0);
    EXPECT_EQ(exact, sra(pred, gt, 2) == 1.0);
  }
}

TEST(Evaluate, ReportAndParallelMatchesSerial) {
  Rng rng(5);
  std::vector<EvalItem> items;
  for (int i = 0; i < 50; ++i) {
    const auto gt = puzzlegen::random_permutation(9, rng);
    items.push_back({"p" + std::to_string(i), 3, i % 5 == 0 ? gt : puzzlegen::random_permutation(9, rng), gt});
  }
  const auto a = evaluate(items), b = evaluate_serial(items);
  EXPECT_EQ(a.n_puzzles, 50);
  EXPECT_EQ(a.pa, b.pa);
  EXPECT_EQ(a.aa, b.aa);
  EXPECT_EQ(a.sra, b.sra);
  ASSERT_EQ(a.rows.size(), 50u);
  EXPECT_GE(a.pa, 20.0);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].puzzle_id, items[i].puzzle_id);
    EXPECT_EQ(a.rows[i].sra, b.rows[i].sra);
  }
}
