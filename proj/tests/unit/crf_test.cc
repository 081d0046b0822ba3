// Copyright 2026 The robustsf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "robustsf/crf.h"

namespace robustsf {
namespace {

using testing::EnumeratedLogPartition;
using testing::EnumeratedMarginals;
using testing::EnumeratedMaxScore;
using testing::EnumeratedPathScore;
using testing::RandomMatrix;
using testing::RelativeError;

struct Instance {
  Matrix emissions;
  Matrix trans;
  std::vector<int> gold;
};

Instance RandomInstance(Rng& rng, double scale = 2.0) {
  const int k = 1 + static_cast<int>(rng.Index(4));
  const int l = 1 + static_cast<int>(rng.Index(6));
  Instance inst{RandomMatrix(l, k, rng, scale), RandomMatrix(k + 2, k + 2, rng, scale), {}};
  for (int i = 0; i < l; ++i) inst.gold.push_back(static_cast<int>(rng.Index(static_cast<std::size_t>(k))));
  return inst;
}

TEST(CrfTest, UniformScoresGiveLogOfPathCount) {
  const Matrix p = Matrix::Zero(2, 3);
  const Matrix t = Matrix::Zero(5, 5);
  EXPECT_NEAR(CrfLogPartition(p, t), std::log(9.0), 1e-12);
  const std::vector<int> gold = {0, 2};
  EXPECT_NEAR(CrfNll(p, t, gold), std::log(9.0), 1e-12);
}

TEST(CrfTest, SingleStepReducesToLogSumExp) {
  Matrix p(1, 3);
  p << 0.5, -1.0, 2.0;
  const double expected = std::log(std::exp(0.5) + std::exp(-1.0) + std::exp(2.0));
  EXPECT_NEAR(CrfLogPartition(p, Matrix::Zero(5, 5)), expected, 1e-12);
}

TEST(CrfTest, DominantGoldPathHasVanishingNll) {
  Matrix p = Matrix::Constant(3, 2, -50.0);
  const std::vector<int> gold = {1, 0, 1};
  for (int i = 0; i < 3; ++i) p(i, gold[i]) = 50.0;
  const double nll = CrfNll(p, Matrix::Zero(4, 4), gold);
  EXPECT_GE(nll, 0.0);
  EXPECT_LT(nll, 1e-12);
}

TEST(CrfTest, MatchesEnumeration) {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = RandomInstance(rng);
    const double log_z = EnumeratedLogPartition(inst.emissions, inst.trans);
    EXPECT_NEAR(CrfLogPartition(inst.emissions, inst.trans), log_z, 1e-6);
    EXPECT_NEAR(CrfPathScore(inst.emissions, inst.trans, inst.gold),
                EnumeratedPathScore(inst.emissions, inst.trans, inst.gold), 1e-12);
    EXPECT_NEAR(CrfNll(inst.emissions, inst.trans, inst.gold),
                log_z - EnumeratedPathScore(inst.emissions, inst.trans, inst.gold), 1e-6);
  }
}

TEST(CrfTest, PosteriorsMatchEnumeration) {
  Rng rng(102);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = RandomInstance(rng);
    const auto post = CrfPosteriors(inst.emissions, inst.trans);
    const Matrix expected = EnumeratedMarginals(inst.emissions, inst.trans);
    EXPECT_LT((post.node - expected).cwiseAbs().maxCoeff(), 1e-9);
    for (int i = 0; i < post.node.rows(); ++i) EXPECT_NEAR(post.node.row(i).sum(), 1.0, 1e-9);
  }
}

TEST(CrfTest, ViterbiMatchesBruteForceMaximum) {
  Rng rng(103);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = RandomInstance(rng);
    const auto path = Viterbi(inst.emissions, inst.trans);
    ASSERT_EQ(path.size(), static_cast<std::size_t>(inst.emissions.rows()));
    EXPECT_NEAR(CrfPathScore(inst.emissions, inst.trans, path),
                EnumeratedMaxScore(inst.emissions, inst.trans), 1e-9);
  }
}

TEST(CrfTest, ViterbiTiesGoToLowestIndex) {
  EXPECT_EQ(Viterbi(Matrix::Zero(3, 4), Matrix::Zero(6, 6)), (std::vector<int>{0, 0, 0}));
  Matrix p(1, 2);
  p << 0.0, 5.0;
  EXPECT_EQ(Viterbi(p, Matrix::Zero(4, 4)), (std::vector<int>{1}));
}

TEST(CrfTest, RejectsMismatchedTags) {
  const Matrix p = Matrix::Zero(2, 3);
  const Matrix t = Matrix::Zero(5, 5);
  const std::vector<int> short_gold = {0};
  const std::vector<int> bad_tag = {0, 3};
  EXPECT_THROW(CrfNll(p, t, short_gold), DataError);
  EXPECT_THROW(CrfNll(p, t, bad_tag), DataError);
}

TEST(CrfTest, BackwardMatchesFiniteDifferences) {
  Rng rng(104);
  const double h = 1e-5;
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = RandomInstance(rng, 1.0);
    Matrix d_p = Matrix::Zero(inst.emissions.rows(), inst.emissions.cols());
    Matrix d_t = Matrix::Zero(inst.trans.rows(), inst.trans.cols());
    CrfNllBackward(inst.emissions, inst.trans, inst.gold, 1.0, d_p, d_t);
    for (Matrix* m : {&inst.emissions, &inst.trans}) {
      Matrix numeric(m->rows(), m->cols());
      for (Eigen::Index i = 0; i < m->size(); ++i) {
        const double saved = m->data()[i];
        m->data()[i] = saved + h;
        const double up = CrfNll(inst.emissions, inst.trans, inst.gold);
        m->data()[i] = saved - h;
        const double down = CrfNll(inst.emissions, inst.trans, inst.gold);
        m->data()[i] = saved;
        numeric.data()[i] = (up - down) / (2 * h);
      }
      const Matrix& analytic = m == &inst.emissions ? d_p : d_t;
      // A single-label CRF has one path, so both gradients are rounding noise.
      if (analytic.norm() < 1e-9 && numeric.norm() < 1e-9) continue;
      EXPECT_LT(RelativeError(analytic, numeric), 1e-6);
    }
  }
}

TEST(CrfTest, BackwardScalesAndAccumulates) {
  Rng rng(105);
  const auto inst = RandomInstance(rng);
  Matrix d_p1 = Matrix::Zero(inst.emissions.rows(), inst.emissions.cols());
  Matrix d_t1 = Matrix::Zero(inst.trans.rows(), inst.trans.cols());
  CrfNllBackward(inst.emissions, inst.trans, inst.gold, 1.0, d_p1, d_t1);
  Matrix d_p2 = d_p1;
  Matrix d_t2 = d_t1;
  CrfNllBackward(inst.emissions, inst.trans, inst.gold, 2.0, d_p2, d_t2);
  EXPECT_LT((d_p2 - 3.0 * d_p1).norm(), 1e-12);
  EXPECT_LT((d_t2 - 3.0 * d_t1).norm(), 1e-12);
}

}  // namespace
}  // namespace robustsf
