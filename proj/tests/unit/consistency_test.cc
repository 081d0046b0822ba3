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
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "robustsf/consistency.h"
#include "robustsf/feature_augment.h"

namespace robustsf {
namespace {

using testing::CheckParamGradients;
using testing::EnumeratedLogPartition;
using testing::EnumeratedPathScore;
using testing::RandomDataset;
using testing::RandomMatrix;
using testing::TinyModel;

Dataset SmallData(std::uint64_t seed = 43, int n = 12, int max_len = 5) {
  Rng rng(seed);
  return RandomDataset(rng, n, max_len);
}

Matrix RowOf(std::initializer_list<double> values) {
  Matrix m(1, static_cast<Eigen::Index>(values.size()));
  Eigen::Index j = 0;
  for (double v : values) m(0, j++) = v;
  return m;
}

TEST(LossLogitsTest, EqualInputsGiveZero) {
  Rng rng(1);
  const Matrix p = RandomMatrix(4, 5, rng);
  EXPECT_NEAR(LossLogits(p, p), 0.0, 1e-15);
}

TEST(LossLogitsTest, SingleTokenKl) {
  const Matrix p = RowOf({std::log(0.5), std::log(0.5)});
  const Matrix q = RowOf({std::log(0.9), std::log(0.1)});
  const double expected = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
  EXPECT_NEAR(LossLogits(p, q), expected, 1e-12);
  EXPECT_NEAR(LossLogits(p, q), 0.5108, 1e-4);
}

TEST(LossLogitsTest, NonNegativeAndShiftInvariant) {
  Rng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const int rows = 1 + static_cast<int>(rng.Index(5));
    const int cols = 2 + static_cast<int>(rng.Index(5));
    const Matrix p = RandomMatrix(rows, cols, rng, 4.0);
    const Matrix q = RandomMatrix(rows, cols, rng, 4.0);
    const double kl = LossLogits(p, q);
    EXPECT_GE(kl, 0.0);
    EXPECT_NEAR(LossLogits(p.array() + 3.0, q.array() - 1.0), kl, 1e-12);
  }
}

TEST(LossLogitsTest, TokenMeanOfRowKl) {
  const Matrix p = (Matrix(2, 2) << std::log(0.5), std::log(0.5), 0.0, 0.0).finished();
  const Matrix q = (Matrix(2, 2) << std::log(0.9), std::log(0.1), 0.0, 0.0).finished();
  EXPECT_NEAR(LossLogits(p, q), LossLogits(p.topRows(1), q.topRows(1)) / 2.0, 1e-12);
}

TEST(LossLogitsTest, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix p = RandomMatrix(3, 4, rng, 2.0);
    Matrix q = RandomMatrix(3, 4, rng, 2.0);
    Matrix d_p = Matrix::Zero(3, 4), d_q = Matrix::Zero(3, 4);
    LossLogitsBackward(p, q, 1.0, d_p, d_q);
    for (Matrix* m : {&p, &q}) {
      Matrix numeric(3, 4);
      for (Eigen::Index i = 0; i < m->size(); ++i) {
        const double saved = m->data()[i];
        m->data()[i] = saved + h;
        const double up = LossLogits(p, q);
        m->data()[i] = saved - h;
        const double down = LossLogits(p, q);
        m->data()[i] = saved;
        numeric.data()[i] = (up - down) / (2 * h);
      }
      EXPECT_LT(testing::RelativeError(m == &p ? d_p : d_q, numeric), 1e-7);
    }
  }
}

TEST(LossLogitsTest, RejectsShapeMismatch) {
  EXPECT_THROW(LossLogits(Matrix::Zero(2, 3), Matrix::Zero(3, 3)), ConfigError);
}

TEST(LossRepreTest, Values) {
  EXPECT_EQ(LossRepre(RowOf({1.0}), RowOf({3.0})), 4.0);
  Rng rng(4);
  const Matrix a = RandomMatrix(3, 6, rng);
  const Matrix b = RandomMatrix(3, 6, rng);
  EXPECT_EQ(LossRepre(a, a), 0.0);
  EXPECT_DOUBLE_EQ(LossRepre(a, b), LossRepre(b, a));
  EXPECT_NEAR(LossRepre(a, b), (a - b).squaredNorm() / 18.0, 1e-15);
  EXPECT_THROW(LossRepre(a, b.leftCols(5)), ConfigError);
}

TEST(LossRepreTest, GradientIsScaledDifference) {
  Rng rng(5);
  const Matrix a = RandomMatrix(2, 3, rng);
  const Matrix b = RandomMatrix(2, 3, rng);
  Matrix d_a = Matrix::Zero(2, 3), d_b = Matrix::Zero(2, 3);
  LossRepreBackward(a, b, 0.5, d_a, d_b);
  EXPECT_LT((d_a - (a - b) / 6.0).norm(), 1e-15);
  EXPECT_LT((d_a + d_b).norm(), 1e-15);
}

TEST(TotalLossTest, WeightsConsistencyTerm) {
  EXPECT_EQ(TotalLoss(2.0, 3.0, 1.0), 5.0);
  EXPECT_EQ(TotalLoss(2.0, 3.0, 0.0), 2.0);
  EXPECT_EQ(TotalLoss(2.0, 3.0, 1.0, ConsistencyLoss::kNone), 2.0);
  const double base = TotalLoss(1.5, 0.7, 0.0);
  const double slope = TotalLoss(1.5, 0.7, 1.0) - base;
  for (double alpha : {0.25, 2.0, 7.5}) EXPECT_NEAR(TotalLoss(1.5, 0.7, alpha), base + alpha * slope, 1e-12);
  EXPECT_THROW(TotalLoss(1.0, 1.0, -0.1), ConfigError);
}

TEST(LossAugTest, IdenticalPairEqualsSupervisedLoss) {
  const Dataset data = SmallData();
  const Model model = TinyModel(data, 6, 3, 5, 1);
  for (const auto& s : data.sentences) {
    const auto loss = ExampleLossAndGradient(model, s, AugmentPlan{}, ConsistencyLoss::kAug, 1.0, nullptr);
    EXPECT_NEAR(loss.l_consis, loss.l_normal, 1e-12);
    EXPECT_NEAR(LossAug(model, s), loss.l_normal, 1e-12);
  }
}

TEST(LossAugTest, MatchesEnumeratedNll) {
  const Dataset data = SmallData(44, 10, 4);
  const Model model = TinyModel(data, 6, 3, 5, 2);
  for (const auto& s : data.sentences) {
    const auto trace = model.Forward(s.tokens, Mode::kEval, nullptr);
    const auto tags = model.scheme().Encode(s.tags);
    const double expected = EnumeratedLogPartition(trace.logits, model.params().trans) -
                            EnumeratedPathScore(trace.logits, model.params().trans, tags);
    EXPECT_NEAR(LossAug(model, s), expected, 1e-9);
    EXPECT_GE(LossAug(model, s), 0.0);
  }
}

TEST(TrainConfigTest, GateRejectsLengthChangingTokenwiseCombinations) {
  for (auto method : {TextAugmentMethod::kDeleteWord, TextAugmentMethod::kInsertWord,
                      TextAugmentMethod::kSubWord}) {
    for (auto loss : {ConsistencyLoss::kLogits, ConsistencyLoss::kRepre}) {
      TrainConfig config;
      config.loss_type = loss;
      config.text_augment = TextAugmentConfig::Defaults(method);
      config.text_augment->synonym_lexicon = std::make_shared<Lexicon>(BuiltinSynonyms());
      config.text_augment->sampler = std::make_shared<UnigramSampler>(SmallData());
      try {
        config.Validate();
        FAIL() << ToString(method) << "/" << ToString(loss) << " accepted";
      } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("length"), std::string::npos) << e.what();
      }
    }
  }
}

TEST(TrainConfigTest, AcceptsLengthPreservingCombinations) {
  for (auto loss : {ConsistencyLoss::kAug, ConsistencyLoss::kLogits, ConsistencyLoss::kRepre}) {
    TrainConfig config;
    config.loss_type = loss;
    config.text_augment = TextAugmentConfig::Defaults(TextAugmentMethod::kCharAug);
    EXPECT_NO_THROW(config.Validate());
    config.text_augment.reset();
    config.feature_augment = FeatureAugmentConfig::Defaults(FeatureAugmentMethod::kAdv);
    EXPECT_NO_THROW(config.Validate());
  }
  TrainConfig aug_delete;
  aug_delete.loss_type = ConsistencyLoss::kAug;
  aug_delete.text_augment = TextAugmentConfig::Defaults(TextAugmentMethod::kDeleteWord);
  EXPECT_NO_THROW(aug_delete.Validate());
}

TEST(TrainConfigTest, ConsistencyWithoutAugmentationIsRejected) {
  TrainConfig config;
  config.loss_type = ConsistencyLoss::kLogits;
  EXPECT_THROW(config.Validate(), ConfigError);
  config.loss_type = ConsistencyLoss::kNone;
  EXPECT_NO_THROW(config.Validate());
  config.epochs = 0;
  EXPECT_THROW(config.Validate(), ConfigError);
  EXPECT_THROW(ParseConsistencyLoss("mse"), ConfigError);
  EXPECT_EQ(ParseConsistencyLoss("repre"), ConsistencyLoss::kRepre);
}

// Fixed random choices for gradient checks.
struct PlanCase {
  std::string name;
  ConsistencyLoss loss;
  bool text;
  bool keep;
  bool shift;
};

AugmentPlan MakePlan(const Model& model, const Sentence& s, const PlanCase& c, Rng& rng) {
  AugmentPlan plan;
  const int d = model.hyper().input_dim();
  const int l = static_cast<int>(s.size());
  plan.clean_dropout = SampleDropoutScale(l, d, 0.2, rng);
  int aug_l = l;
  if (c.text) {
    plan.augmented = CharAug(s, 0.5, rng).sentence;
    aug_l = static_cast<int>(plan.augmented->size());
    plan.aug_dropout = SampleDropoutScale(aug_l, d, 0.2, rng);
  }
  if (c.keep) plan.feature_keep = TokenCutMask(aug_l, d, 0.3, rng);
  if (c.shift) plan.feature_shift = RandomMatrix(aug_l, d, rng, 0.3);
  return plan;
}

TEST(ExampleGradientTest, TotalLossMatchesFiniteDifferences) {
  const Dataset data = SmallData(45, 8, 5);
  const std::vector<PlanCase> cases = {
      {"aug_text", ConsistencyLoss::kAug, true, false, false},
      {"aug_feature", ConsistencyLoss::kAug, false, true, true},
      {"logits_text", ConsistencyLoss::kLogits, true, false, false},
      {"logits_feature", ConsistencyLoss::kLogits, false, true, true},
      {"repre_text", ConsistencyLoss::kRepre, true, true, false},
      {"repre_feature", ConsistencyLoss::kRepre, false, false, true},
  };
  for (const auto& c : cases) {
    Model model = TinyModel(data, 8, 4, 8, 3);
    Rng rng(17);
    const Sentence& s = data.sentences[1];
    const AugmentPlan plan = MakePlan(model, s, c, rng);
    ModelParams grads = model.params().ZerosLike();
    ExampleLossAndGradient(model, s, plan, c.loss, 0.7, &grads);
    auto loss = [&] { return ExampleLossAndGradient(model, s, plan, c.loss, 0.7, nullptr).total; };
    for (const auto& g : CheckParamGradients(model, grads, loss)) {
      EXPECT_LT(g.relative_error, 1e-4) << c.name << " " << g.name;
    }
  }
}

TEST(ExampleGradientTest, GradientValueMatchesLossValue) {
  const Dataset data = SmallData(46, 6, 5);
  const Model model = TinyModel(data, 6, 3, 4, 4);
  Rng rng(3);
  const PlanCase c{"logits", ConsistencyLoss::kLogits, true, true, true};
  const AugmentPlan plan = MakePlan(model, data.sentences[0], c, rng);
  ModelParams grads = model.params().ZerosLike();
  const auto with = ExampleLossAndGradient(model, data.sentences[0], plan, c.loss, 1.0, &grads);
  const auto without = ExampleLossAndGradient(model, data.sentences[0], plan, c.loss, 1.0, nullptr);
  EXPECT_DOUBLE_EQ(with.total, without.total);
  EXPECT_DOUBLE_EQ(with.l_consis, without.l_consis);
  EXPECT_DOUBLE_EQ(with.total, with.l_normal + with.l_consis);
}

TEST(ExampleGradientTest, AdversarialShiftUsesNormalizedSupervisedGradient) {
  const Dataset data = SmallData(47, 6, 5);
  const Model model = TinyModel(data, 6, 3, 4, 5);
  const Sentence& s = data.sentences[2];
  const auto tags = model.scheme().Encode(s.tags);
  for (bool with_text : {false, true}) {
    Rng rng(9);
    AugmentPlan plan;
    if (with_text) plan.augmented = CharAug(s, 0.6, rng).sentence;
    const Sentence& target = with_text ? *plan.augmented : s;

    // Supervised gradient of the perturbed sample with respect to its
    // embedding.
    const auto trace = model.Forward(target.tokens, Mode::kEval, nullptr);
    ModelParams scratch = model.params().ZerosLike();
    Matrix d_logits = Matrix::Zero(trace.logits.rows(), trace.logits.cols());
    model.LossBackward(trace.logits, with_text ? model.scheme().Encode(target.tags) : tags, 1.0, d_logits,
                       scratch);
    const Matrix g = Backward(trace, {d_logits, {}}, model.params(), scratch);

    AugmentPlan manual = plan;
    manual.feature_shift = AdvShift(g, 0.8);
    AugmentPlan adv = plan;
    adv.adversarial = true;
    adv.epsilon = 0.8;
    for (auto loss : {ConsistencyLoss::kAug, ConsistencyLoss::kLogits, ConsistencyLoss::kRepre}) {
      ModelParams ga = model.params().ZerosLike();
      ModelParams gm = model.params().ZerosLike();
      const auto la = ExampleLossAndGradient(model, s, adv, loss, 1.0, &ga);
      const auto lm = ExampleLossAndGradient(model, s, manual, loss, 1.0, &gm);
      EXPECT_NEAR(la.total, lm.total, 1e-12);
      auto ta = std::as_const(ga).Tensors();
      auto tm = std::as_const(gm).Tensors();
      for (std::size_t k = 0; k < ta.size(); ++k) {
        for (std::size_t i = 0; i < ta[k].values.size(); ++i) {
          ASSERT_NEAR(ta[k].values[i], tm[k].values[i], 1e-12) << ta[k].name;
        }
      }
      EXPECT_NEAR(manual.feature_shift.norm(), 0.8, 1e-12);
    }
  }
}

TEST(ExampleGradientTest, TokenwiseLossRejectsLengthChange) {
  const Dataset data = SmallData(48, 4, 5);
  const Model model = TinyModel(data, 6, 3, 4, 6);
  Sentence s = data.sentences[0];
  s.tokens.push_back("extra");
  s.tags.emplace_back("O");
  AugmentPlan plan;
  plan.augmented = s;
  EXPECT_THROW(ExampleLossAndGradient(model, data.sentences[0], plan, ConsistencyLoss::kLogits, 1.0, nullptr),
               ConfigError);
  EXPECT_NO_THROW(ExampleLossAndGradient(model, data.sentences[0], plan, ConsistencyLoss::kAug, 1.0, nullptr));
}

TEST(OptimizerTest, SgdStepsAgainstGradient) {
  ModelParams p = ModelParams::Zeros(3, 3, 2, 2, 2, 2);
  ModelParams g = p.ZerosLike();
  g.proj_b << 1.0, -2.0;
  OptimizerConfig config;
  config.kind = OptimizerKind::kSgd;
  config.learning_rate = 0.1;
  Optimizer opt(config, p);
  opt.Step(p, g);
  EXPECT_NEAR(p.proj_b(0), -0.1, 1e-15);
  EXPECT_NEAR(p.proj_b(1), 0.2, 1e-15);
  EXPECT_EQ(p.version, 1u);
}

TEST(OptimizerTest, AdamFirstStepHasLearningRateMagnitude) {
  ModelParams p = ModelParams::Zeros(3, 3, 2, 2, 2, 2);
  ModelParams g = p.ZerosLike();
  g.proj_b << 5.0, -0.01;
  Optimizer opt(OptimizerConfig{}, p);
  opt.Step(p, g);
  EXPECT_NEAR(p.proj_b(0), -1e-3, 1e-9);
  EXPECT_NEAR(p.proj_b(1), 1e-3, 1e-6);
  EXPECT_EQ(p.word_emb(0, 0), 0.0);
  EXPECT_EQ(opt.steps(), 1);
}

HyperConfig SmallHyper() {
  HyperConfig hyper;
  hyper.word_dim = 8;
  hyper.char_dim = 4;
  hyper.hidden = 8;
  hyper.seed = 3;
  return hyper;
}

TEST(TrainTest, IdenticalRunsGiveIdenticalLogs) {
  const auto splits = GenerateSyntheticCorpus(2, 60, 20, 1);
  const Vocabulary vocab = BuildVocab(splits.train, 1);
  TrainConfig config;
  config.epochs = 2;
  config.loss_type = ConsistencyLoss::kLogits;
  config.text_augment = TextAugmentConfig::Defaults(TextAugmentMethod::kCharAug);
  config.feature_augment = FeatureAugmentConfig::Defaults(FeatureAugmentMethod::kTokenCut);
  const auto a = Train(config, SmallHyper(), splits.train, splits.dev, vocab);
  const auto b = Train(config, SmallHyper(), splits.train, splits.dev, vocab);
  ASSERT_EQ(a.log.epochs.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a.log.epochs[i].l_normal, b.log.epochs[i].l_normal);
    EXPECT_EQ(a.log.epochs[i].l_consis, b.log.epochs[i].l_consis);
    EXPECT_EQ(a.log.epochs[i].dev_f1, b.log.epochs[i].dev_f1);
  }
  EXPECT_EQ(SerializeModel(a.model), SerializeModel(b.model));
}

TEST(TrainTest, ZeroAlphaMatchesPlainTraining) {
  const auto splits = GenerateSyntheticCorpus(4, 40, 15, 1);
  const Vocabulary vocab = BuildVocab(splits.train, 1);
  TrainConfig plain;
  plain.epochs = 2;
  const auto base = Train(plain, SmallHyper(), splits.train, splits.dev, vocab);
  for (auto loss : {ConsistencyLoss::kAug, ConsistencyLoss::kLogits, ConsistencyLoss::kRepre}) {
    TrainConfig config = plain;
    config.alpha = 0.0;
    config.loss_type = loss;
    config.text_augment = TextAugmentConfig::Defaults(TextAugmentMethod::kCharAug);
    config.feature_augment = FeatureAugmentConfig::Defaults(FeatureAugmentMethod::kDropout);
    const auto run = Train(config, SmallHyper(), splits.train, splits.dev, vocab);
    auto a = base.model.params().Tensors();
    auto b = run.model.params().Tensors();
    for (std::size_t k = 0; k < a.size(); ++k) {
      for (std::size_t i = 0; i < a[k].values.size(); ++i) {
        ASSERT_NEAR(a[k].values[i], b[k].values[i], 1e-9) << ToString(loss) << " " << a[k].name;
      }
    }
    EXPECT_EQ(run.log.best_epoch, base.log.best_epoch);
    for (std::size_t e = 0; e < base.log.epochs.size(); ++e) {
      EXPECT_NEAR(run.log.epochs[e].l_normal, base.log.epochs[e].l_normal, 1e-9);
      EXPECT_NEAR(run.log.epochs[e].dev_f1, base.log.epochs[e].dev_f1, 1e-9);
    }
  }
}

TEST(TrainTest, SupervisedLossFallsAcrossEpochs) {
  const auto splits = GenerateSyntheticCorpus(5, 150, 30, 1);
  const Vocabulary vocab = BuildVocab(splits.train, 1);
  TrainConfig config;
  config.epochs = 4;
  config.loss_type = ConsistencyLoss::kAug;
  config.text_augment = TextAugmentConfig::Defaults(TextAugmentMethod::kCharAug);
  std::vector<EpochRecord> seen;
  const auto result = Train(config, SmallHyper(), splits.train, splits.dev, vocab,
                            [&](const EpochRecord& r) { seen.push_back(r); });
  ASSERT_EQ(seen.size(), 4u);
  EXPECT_LT(seen.back().l_normal, seen.front().l_normal);
  EXPECT_LT(seen.back().l_consis, seen.front().l_consis);
  for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i].epoch, static_cast<int>(i) + 1);
  // The kept parameters belong to the best dev epoch.
  const double best = seen[static_cast<std::size_t>(result.log.best_epoch - 1)].dev_f1;
  for (const auto& r : seen) EXPECT_LE(r.dev_f1, best);
  EXPECT_DOUBLE_EQ(EvaluateF1(result.model, splits.dev), best);
  const std::string csv = result.log.ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,l_normal,l_consis,dev_f1,seconds");
}

TEST(TrainTest, InvalidCombinationFailsBeforeAnyEpoch) {
  const auto splits = GenerateSyntheticCorpus(6, 20, 5, 1);
  const Vocabulary vocab = BuildVocab(splits.train, 1);
  TrainConfig config;
  config.loss_type = ConsistencyLoss::kRepre;
  config.text_augment = TextAugmentConfig::Defaults(TextAugmentMethod::kInsertWord);
  bool called = false;
  EXPECT_THROW(Train(config, SmallHyper(), splits.train, splits.dev, vocab,
                     [&](const EpochRecord&) { called = true; }),
               ConfigError);
  EXPECT_FALSE(called);
}

TEST(TrainTest, InsertWordUsesTrainingSampler) {
  const auto splits = GenerateSyntheticCorpus(7, 30, 5, 1);
  const Vocabulary vocab = BuildVocab(splits.train, 1);
  TrainConfig config;
  config.epochs = 1;
  config.loss_type = ConsistencyLoss::kAug;
  config.text_augment = TextAugmentConfig::Defaults(TextAugmentMethod::kInsertWord);
  const auto result = Train(config, SmallHyper(), splits.train, splits.dev, vocab);
  EXPECT_GT(result.log.epochs[0].l_consis, 0.0);
}

TEST(TrainTest, RejectsEmptyTrainingSet) {
  const auto splits = GenerateSyntheticCorpus(8, 10, 5, 1);
  const Vocabulary vocab = BuildVocab(splits.train, 1);
  EXPECT_THROW(Train(TrainConfig{}, SmallHyper(), Dataset{}, splits.dev, vocab), DataError);
}

}  // namespace
}  // namespace robustsf
