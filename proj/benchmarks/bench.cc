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

// Microbenchmarks for the CRF, the encoder and one consistency training step.

#include <benchmark/benchmark.h>

#include <vector>

#include "robustsf/consistency.h"
#include "robustsf/corpus.h"
#include "robustsf/crf.h"
#include "robustsf/tagger.h"
#include "robustsf/text_augment.h"

namespace robustsf {
namespace {

Matrix RandomMatrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Uniform(-1.0, 1.0);
  return m;
}

// Args: sentence length, label count.
void BM_CrfLogPartition(benchmark::State& state) {
  Rng rng(1);
  const int l = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const Matrix p = RandomMatrix(l, k, rng);
  const Matrix t = RandomMatrix(k + 2, k + 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(CrfLogPartition(p, t));
}
BENCHMARK(BM_CrfLogPartition)->Args({12, 11})->Args({40, 11})->Args({40, 41});

void BM_Viterbi(benchmark::State& state) {
  Rng rng(2);
  const int l = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const Matrix p = RandomMatrix(l, k, rng);
  const Matrix t = RandomMatrix(k + 2, k + 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(Viterbi(p, t));
}
BENCHMARK(BM_Viterbi)->Args({12, 11})->Args({40, 11})->Args({40, 41});

void BM_CrfNllBackward(benchmark::State& state) {
  Rng rng(3);
  const int l = 12, k = 11;
  const Matrix p = RandomMatrix(l, k, rng);
  const Matrix t = RandomMatrix(k + 2, k + 2, rng);
  std::vector<int> gold(l);
  for (auto& g : gold) g = static_cast<int>(rng.Index(k));
  Matrix d_p = Matrix::Zero(l, k), d_t = Matrix::Zero(k + 2, k + 2);
  for (auto _ : state) benchmark::DoNotOptimize(CrfNllBackward(p, t, gold, 1.0, d_p, d_t));
}
BENCHMARK(BM_CrfNllBackward);

// Shared model over a small synthetic corpus with default dimensions.
struct Fixture {
  CorpusSplits splits = GenerateSyntheticCorpus(7, 200, 20, 20);
  Model model = Model::Create(HyperConfig{}, SchemeFromDataset(splits.train), BuildVocab(splits.train, 1));
};

const Fixture& Shared() {
  static const Fixture fixture;
  return fixture;
}

void BM_EncodeForward(benchmark::State& state) {
  const auto& f = Shared();
  Rng rng(4);
  const Matrix input = RandomMatrix(static_cast<int>(state.range(0)), f.model.hyper().input_dim(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(Encode(input, f.model.params()));
}
BENCHMARK(BM_EncodeForward)->Arg(12)->Arg(40);

void BM_EncodeBackward(benchmark::State& state) {
  const auto& f = Shared();
  Rng rng(5);
  const int l = static_cast<int>(state.range(0));
  const Matrix input = RandomMatrix(l, f.model.hyper().input_dim(), rng);
  const auto trace = Encode(input, f.model.params());
  const Matrix d_hidden = RandomMatrix(l, 2 * f.model.hyper().hidden, rng);
  ModelParams grads = f.model.params().ZerosLike();
  for (auto _ : state) benchmark::DoNotOptimize(EncodeBackward(trace, d_hidden, f.model.params(), grads));
}
BENCHMARK(BM_EncodeBackward)->Arg(12)->Arg(40);

// One sentence: loss, gradient and an Adam step. Arg 0 is plain supervised
// training, arg 1 adds CharAug with the logits consistency term.
void BM_TrainingStep(benchmark::State& state) {
  const auto& f = Shared();
  Model model = f.model;
  Optimizer optimizer(OptimizerConfig{}, model.params());
  const Sentence& s = f.splits.train.sentences[0];
  const bool consistency = state.range(0) == 1;
  Rng rng(6);
  for (auto _ : state) {
    AugmentPlan plan;
    if (consistency) plan.augmented = CharAug(s, 0.1, rng).sentence;
    ModelParams grads = model.params().ZerosLike();
    const auto loss = ExampleLossAndGradient(model, s, plan,
                                             consistency ? ConsistencyLoss::kLogits : ConsistencyLoss::kNone,
                                             1.0, &grads);
    optimizer.Step(model.mutable_params(), grads);
    benchmark::DoNotOptimize(loss.total);
  }
}
BENCHMARK(BM_TrainingStep)->Arg(0)->Arg(1);

}  // namespace
}  // namespace robustsf

BENCHMARK_MAIN();
