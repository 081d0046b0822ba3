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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "robustsf/crf.h"
#include "robustsf/tagger.h"

namespace robustsf {
namespace {

using testing::CheckParamGradients;
using testing::RandomDataset;
using testing::RandomMatrix;
using testing::RelativeError;
using testing::TinyModel;

Dataset SmallData(std::uint64_t seed = 41) {
  Rng rng(seed);
  return RandomDataset(rng, 12, 5);
}

TEST(HyperConfigTest, RejectsBadValues) {
  HyperConfig hyper;
  EXPECT_NO_THROW(hyper.Validate());
  hyper.hidden = 0;
  EXPECT_THROW(hyper.Validate(), ConfigError);
  hyper = HyperConfig{};
  hyper.dropout = 1.0;
  EXPECT_THROW(hyper.Validate(), ConfigError);
  EXPECT_EQ(ParseObjective(ToString(Objective::kTokenCrossEntropy)), Objective::kTokenCrossEntropy);
  EXPECT_THROW(ParseObjective("hinge"), ConfigError);
}

TEST(EmbedTest, KnownTokenIsWordRowThenCharMean) {
  const Dataset data = SmallData();
  const Model model = TinyModel(data, 4, 3, 4, 1);
  const std::string word = data.sentences[0].tokens[0];
  const std::vector<std::string> tokens = {word};
  const EmbedTrace e = model.Embed(tokens, Mode::kEval, nullptr);
  const auto& p = model.params();
  ASSERT_EQ(e.output.rows(), 1);
  ASSERT_EQ(e.output.cols(), 7);
  Vector expected(7);
  expected.head(4) = p.word_emb.row(model.vocab().WordIndex(word)).transpose();
  Vector mean = Vector::Zero(3);
  const auto chars = Utf8Chars(word);
  for (const auto& c : chars) mean += p.char_emb.row(model.vocab().CharIndex(c)).transpose();
  expected.tail(3) = mean / static_cast<double>(chars.size());
  EXPECT_LT((e.output.row(0).transpose() - expected).norm(), 1e-12);
}

TEST(EmbedTest, UnknownWordsShareWordRowButNotCharPart) {
  const Dataset data = SmallData();
  const Model model = TinyModel(data, 4, 3, 4, 1);
  const std::vector<std::string> tokens = {"hotelzz", "thaiqq"};
  ASSERT_FALSE(model.vocab().HasWord(tokens[0]));
  ASSERT_FALSE(model.vocab().HasWord(tokens[1]));
  const EmbedTrace e = model.Embed(tokens, Mode::kEval, nullptr);
  EXPECT_EQ(e.output.row(0).head(4), model.params().word_emb.row(kUnkIndex));
  EXPECT_EQ(e.output.row(1).head(4), model.params().word_emb.row(kUnkIndex));
  EXPECT_NE(e.output.row(0).tail(3), e.output.row(1).tail(3));
}

TEST(EmbedTest, ZeroDropoutTrainModeMatchesEval) {
  const Dataset data = SmallData();
  HyperConfig hyper;
  hyper.word_dim = 4;
  hyper.char_dim = 3;
  hyper.hidden = 4;
  hyper.dropout = 0.0;
  const Model model = Model::Create(hyper, SchemeFromDataset(data), BuildVocab(data, 1));
  Rng rng(3);
  for (const auto& s : data.sentences) {
    const auto train = model.Forward(s.tokens, Mode::kTrain, &rng);
    const auto eval = model.Forward(s.tokens, Mode::kEval, nullptr);
    EXPECT_EQ(train.logits, eval.logits);
  }
}

TEST(EmbedTest, DropoutScaleIsInverted) {
  Rng rng(8);
  const Matrix scale = SampleDropoutScale(200, 50, 0.2, rng);
  int zeros = 0;
  for (Eigen::Index i = 0; i < scale.size(); ++i) {
    const double v = scale.data()[i];
    if (v == 0.0) {
      ++zeros;
    } else {
      EXPECT_DOUBLE_EQ(v, 1.0 / 0.8);
    }
  }
  EXPECT_NEAR(zeros / 10000.0, 0.2, 0.02);
}

TEST(LstmTest, ShapesAndZeroFixedPoint) {
  LstmParams p{Matrix::Zero(12, 5), Matrix::Zero(12, 3), Vector::Zero(12)};
  const auto trace = LstmForward(Matrix::Zero(4, 5), p, false);
  EXPECT_EQ(trace.hidden.rows(), 4);
  EXPECT_EQ(trace.hidden.cols(), 3);
  EXPECT_EQ(trace.hidden, Matrix::Zero(4, 3));
}

TEST(LstmTest, SingleTokenEncodesToOneRow) {
  const Dataset data = SmallData();
  const Model model = TinyModel(data, 4, 3, 5, 2);
  const std::vector<std::string> tokens = {"x"};
  const auto trace = model.Forward(tokens, Mode::kEval, nullptr);
  EXPECT_EQ(trace.encode.hidden.rows(), 1);
  EXPECT_EQ(trace.encode.hidden.cols(), 10);
}

TEST(LstmTest, ReversedInputSwapsDirectionsWithTiedWeights) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int l = 1 + static_cast<int>(rng.Index(6));
    ModelParams p = ModelParams::Zeros(4, 4, 3, 2, 4, 3);
    p.fwd = {RandomMatrix(16, 5, rng), RandomMatrix(16, 4, rng), RandomMatrix(16, 1, rng)};
    p.bwd = p.fwd;
    const Matrix x = RandomMatrix(l, 5, rng);
    const Matrix x_rev = x.colwise().reverse();
    const auto h = Encode(x, p).hidden;
    const auto h_rev = Encode(x_rev, p).hidden;
    for (int i = 0; i < l; ++i) {
      EXPECT_LT((h_rev.row(i).head(4) - h.row(l - 1 - i).tail(4)).norm(), 1e-12);
      EXPECT_LT((h_rev.row(i).tail(4) - h.row(l - 1 - i).head(4)).norm(), 1e-12);
    }
  }
}

TEST(ProjectTest, ZeroWeightsGiveBias) {
  ModelParams p = ModelParams::Zeros(4, 4, 2, 2, 3, 4);
  p.proj_b << 1, 2, 3, 4;
  const Matrix logits = Project(Matrix::Ones(5, 6), p);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(logits.row(i), p.proj_b.transpose());
}

TEST(ProjectTest, UnitVectorSelectsWeightRow) {
  Rng rng(13);
  ModelParams p = ModelParams::Zeros(4, 4, 2, 2, 3, 4);
  p.proj_w = RandomMatrix(6, 4, rng);
  Matrix h = Matrix::Zero(1, 6);
  h(0, 2) = 1.0;
  EXPECT_EQ(Project(h, p).row(0), p.proj_w.row(2));
}

TEST(ProjectTest, MatchesNaiveMultiply) {
  Rng rng(14);
  ModelParams p = ModelParams::Zeros(4, 4, 2, 2, 5, 7);
  p.proj_w = RandomMatrix(10, 7, rng);
  p.proj_b = RandomMatrix(7, 1, rng);
  const Matrix h = RandomMatrix(6, 10, rng);
  const Matrix logits = Project(h, p);
  for (int i = 0; i < 6; ++i) {
    for (int k = 0; k < 7; ++k) {
      double sum = p.proj_b(k);
      for (int j = 0; j < 10; ++j) sum += h(i, j) * p.proj_w(j, k);
      EXPECT_NEAR(logits(i, k), sum, 1e-12);
    }
  }
}

double CrfLoss(const Model& model, const Sentence& s) {
  const auto trace = model.Forward(s.tokens, Mode::kEval, nullptr);
  return model.Loss(trace.logits, model.scheme().Encode(s.tags));
}

ModelParams CrfGradient(const Model& model, const Sentence& s) {
  ModelParams grads = model.params().ZerosLike();
  const auto trace = model.Forward(s.tokens, Mode::kEval, nullptr);
  Matrix d_logits = Matrix::Zero(trace.logits.rows(), trace.logits.cols());
  model.LossBackward(trace.logits, model.scheme().Encode(s.tags), 1.0, d_logits, grads);
  Backward(trace, {d_logits, {}}, model.params(), grads);
  return grads;
}

TEST(BackwardTest, ZeroUpstreamGivesZeroGradients) {
  const Dataset data = SmallData();
  const Model model = TinyModel(data, 4, 3, 4, 5);
  const auto trace = model.Forward(data.sentences[0].tokens, Mode::kEval, nullptr);
  ModelParams grads = model.params().ZerosLike();
  const Matrix d_input = Backward(trace, {}, model.params(), grads);
  EXPECT_EQ(d_input.norm(), 0.0);
  for (const auto& t : std::as_const(grads).Tensors()) {
    for (double v : t.values) ASSERT_EQ(v, 0.0) << t.name;
  }
}

TEST(BackwardTest, CrfGradientsMatchFiniteDifferences) {
  const Dataset data = SmallData();
  for (std::uint64_t seed : {1, 2, 3}) {
    Model model = TinyModel(data, 8, 4, 8, seed);
    const Sentence& s = data.sentences[seed];
    const ModelParams grads = CrfGradient(model, s);
    for (const auto& g : CheckParamGradients(model, grads, [&] { return CrfLoss(model, s); })) {
      EXPECT_LT(g.relative_error, 1e-5) << g.name;
    }
  }
}

TEST(BackwardTest, TokenCrossEntropyGradientsMatchFiniteDifferences) {
  const Dataset data = SmallData();
  HyperConfig hyper;
  hyper.word_dim = 6;
  hyper.char_dim = 3;
  hyper.hidden = 5;
  hyper.objective = Objective::kTokenCrossEntropy;
  Model model = Model::Create(hyper, SchemeFromDataset(data), BuildVocab(data, 1));
  const Sentence& s = data.sentences[2];
  const ModelParams grads = CrfGradient(model, s);
  for (const auto& g : CheckParamGradients(model, grads, [&] { return CrfLoss(model, s); })) {
    if (g.name == "trans") {
      EXPECT_EQ(g.analytic_norm, 0.0);
      continue;
    }
    EXPECT_LT(g.relative_error, 1e-5) << g.name;
  }
}

TEST(BackwardTest, EmbeddingGradientMatchesFiniteDifferences) {
  const Dataset data = SmallData();
  const Model model = TinyModel(data, 8, 4, 8, 4);
  const Sentence& s = data.sentences[4];
  const auto tags = model.scheme().Encode(s.tags);
  EmbedTrace embed = model.Embed(s.tokens, Mode::kEval, nullptr);
  const auto trace = model.Run(embed);
  ModelParams grads = model.params().ZerosLike();
  Matrix d_logits = Matrix::Zero(trace.logits.rows(), trace.logits.cols());
  model.LossBackward(trace.logits, tags, 1.0, d_logits, grads);
  const Matrix analytic = Backward(trace, {d_logits, {}}, model.params(), grads);

  Matrix numeric(analytic.rows(), analytic.cols());
  const double h = 1e-5;
  for (Eigen::Index i = 0; i < embed.output.size(); ++i) {
    const double saved = embed.output.data()[i];
    embed.output.data()[i] = saved + h;
    const double up = model.Loss(model.Run(embed).logits, tags);
    embed.output.data()[i] = saved - h;
    const double down = model.Loss(model.Run(embed).logits, tags);
    embed.output.data()[i] = saved;
    numeric.data()[i] = (up - down) / (2 * h);
  }
  EXPECT_LT(RelativeError(analytic, numeric), 1e-5);
}

TEST(BackwardTest, DropoutGradientMatchesFiniteDifferences) {
  const Dataset data = SmallData();
  Model model = TinyModel(data, 6, 3, 4, 6);
  const Sentence& s = data.sentences[5];
  Rng rng(7);
  const Matrix scale = SampleDropoutScale(static_cast<int>(s.size()), 9, 0.3, rng);
  const auto tags = model.scheme().Encode(s.tags);
  auto loss = [&] {
    const auto t = model.Run(EmbedTokens(s.tokens, model.vocab(), model.params(), scale));
    return model.Loss(t.logits, tags);
  };
  ModelParams grads = model.params().ZerosLike();
  const auto trace = model.Run(EmbedTokens(s.tokens, model.vocab(), model.params(), scale));
  Matrix d_logits = Matrix::Zero(trace.logits.rows(), trace.logits.cols());
  model.LossBackward(trace.logits, tags, 1.0, d_logits, grads);
  Backward(trace, {d_logits, {}}, model.params(), grads);
  for (const auto& g : CheckParamGradients(model, grads, loss)) EXPECT_LT(g.relative_error, 1e-5) << g.name;
}

TEST(BackwardTest, RejectsStaleTrace) {
  const Dataset data = SmallData();
  Model model = TinyModel(data, 4, 3, 4, 5);
  const auto trace = model.Forward(data.sentences[0].tokens, Mode::kEval, nullptr);
  model.mutable_params().version += 1;
  ModelParams grads = model.params().ZerosLike();
  EXPECT_THROW(Backward(trace, {}, model.params(), grads), std::logic_error);
}

TEST(ModelTest, PredictDecodesViterbiPath) {
  const Dataset data = SmallData();
  const Model model = TinyModel(data, 4, 3, 4, 9);
  for (const auto& s : data.sentences) {
    const auto trace = model.Forward(s.tokens, Mode::kEval, nullptr);
    const auto path = Viterbi(trace.logits, model.params().trans);
    EXPECT_EQ(model.Predict(s.tokens), model.scheme().Decode(path));
  }
}

TEST(ModelParamsTest, TensorsCoverEveryParameter) {
  const ModelParams p = ModelParams::Zeros(10, 6, 4, 3, 5, 3);
  std::size_t total = 0;
  for (const auto& t : p.Tensors()) total += t.values.size();
  const std::size_t expected = 10 * 4 + 6 * 3 + 2 * (20 * 7 + 20 * 5 + 20) + 10 * 3 + 3 + 5 * 5;
  EXPECT_EQ(total, expected);
  EXPECT_TRUE(p.SameShape(p.ZerosLike()));
  EXPECT_TRUE(p.AllFinite());
}

TEST(CheckpointTest, RoundTripIsLossless) {
  const Dataset data = SmallData();
  const Model model = TinyModel(data, 5, 3, 4, 10);
  const Model back = DeserializeModel(SerializeModel(model));
  EXPECT_EQ(back.vocab(), model.vocab());
  EXPECT_EQ(back.scheme(), model.scheme());
  EXPECT_EQ(back.hyper().hidden, model.hyper().hidden);
  auto a = model.params().Tensors();
  auto b = back.params().Tensors();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    ASSERT_EQ(a[k].values.size(), b[k].values.size());
    for (std::size_t i = 0; i < a[k].values.size(); ++i) ASSERT_EQ(a[k].values[i], b[k].values[i]);
  }
  EXPECT_EQ(PredictDataset(back, data), PredictDataset(model, data));
  EXPECT_EQ(SerializeModel(back), SerializeModel(model));
}

TEST(CheckpointTest, RejectsTruncatedText) {
  const Dataset data = SmallData();
  const std::string text = SerializeModel(TinyModel(data, 4, 3, 4, 10));
  EXPECT_THROW(DeserializeModel(text.substr(0, text.size() / 2)), DataError);
  EXPECT_THROW(DeserializeModel("not a model"), DataError);
}

TEST(PretrainedTest, ReplacesKnownRows) {
  const Dataset data = SmallData();
  Model model = TinyModel(data, 3, 3, 4, 10);
  const std::string word = model.vocab().words()[2];
  const int replaced = LoadPretrainedEmbeddings(model, word + " 1 2 3\nunseenword 4 5 6\n");
  EXPECT_EQ(replaced, 1);
  EXPECT_EQ(model.params().word_emb.row(2), (Eigen::RowVector3d(1, 2, 3)));
  EXPECT_THROW(LoadPretrainedEmbeddings(model, word + " 1 2\n"), DataError);
}

}  // namespace
}  // namespace robustsf
