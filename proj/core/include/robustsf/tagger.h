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

#ifndef ROBUSTSF_TAGGER_H_
#define ROBUSTSF_TAGGER_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robustsf/common.h"
#include "robustsf/corpus.h"

namespace robustsf {

// Training objective for the supervised term. kTokenCrossEntropy ignores the
// transition matrix and decodes by per-token argmax; it exists for ablations.
enum class Objective { kCrf, kTokenCrossEntropy };

std::string_view ToString(Objective objective);
Objective ParseObjective(std::string_view name);  // throws ConfigError

enum class Mode { kTrain, kEval };

struct HyperConfig {
  int word_dim = 64;
  int char_dim = 16;
  int hidden = 128;  // per direction
  double dropout = 0.2;
  std::uint64_t seed = 1;
  Objective objective = Objective::kCrf;

  void Validate() const;  // throws ConfigError
  int input_dim() const { return word_dim + char_dim; }
};

// One recurrent direction. Gate blocks are stacked in the order input,
// forget, candidate, output.
struct LstmParams {
  Matrix w_x;  // 4h x input_dim
  Matrix w_h;  // 4h x h
  Vector b;    // 4h
};

struct ModelParams {
  Matrix word_emb;  // V x word_dim
  Matrix char_emb;  // C x char_dim
  LstmParams fwd;
  LstmParams bwd;
  Matrix proj_w;  // 2h x K
  Vector proj_b;  // K
  Matrix trans;   // (K+2) x (K+2), see crf.h

  // Bumped by every optimizer step; traces record it so stale traces are
  // rejected by the backward pass.
  std::uint64_t version = 0;

  static ModelParams Zeros(int vocab_size, int char_vocab_size, int word_dim,
                           int char_dim, int hidden, int num_tags);
  // Uniform(-0.1, 0.1) for embeddings and weight matrices; zero biases and
  // transitions.
  static ModelParams Random(int vocab_size, int char_vocab_size, int word_dim,
                            int char_dim, int hidden, int num_tags, Rng& rng);
  ModelParams ZerosLike() const;

  int hidden() const { return static_cast<int>(fwd.w_h.cols()); }
  int num_tags() const { return static_cast<int>(proj_b.size()); }

  struct Tensor {
    std::string_view name;
    std::span<double> values;
  };
  struct ConstTensor {
    std::string_view name;
    std::span<const double> values;
  };
  // Every trainable tensor in a fixed order.
  std::vector<Tensor> Tensors();
  std::vector<ConstTensor> Tensors() const;

  void SetZero();
  bool AllFinite() const;
  bool SameShape(const ModelParams& other) const;
};

struct EmbedTrace {
  std::vector<int> word_ids;
  std::vector<std::vector<int>> char_ids;
  Matrix dropout_scale;  // L x d multipliers (0 or 1/(1-rate)); empty = none
  Matrix output;         // L x d
};

struct LstmTrace {
  bool reverse = false;
  Matrix gates;      // L x 4h, post-activation
  Matrix cells;      // L x h
  Matrix cell_tanh;  // L x h
  Matrix hidden;     // L x h
};

struct EncodeTrace {
  Matrix input;  // L x d
  LstmTrace fwd;
  LstmTrace bwd;
  Matrix hidden;  // L x 2h, [forward | backward]
};

struct ForwardTrace {
  EmbedTrace embed;
  // Feature-level perturbation between the embedder and the encoder:
  // input = embed.output .* feature_keep + feature_shift (either may be
  // empty).
  Matrix feature_keep;
  Matrix feature_shift;
  EncodeTrace encode;
  Matrix logits;  // L x K
  std::uint64_t params_version = 0;
};

// Inverted-dropout multipliers: each entry is 0 with probability `rate`,
// otherwise 1/(1-rate).
Matrix SampleDropoutScale(int rows, int cols, double rate, Rng& rng);

// Word row (UNK when out of vocabulary) concatenated with the mean of the
// token's character rows. `dropout_scale` (may be empty) multiplies the
// result elementwise.
EmbedTrace EmbedTokens(std::span<const std::string> tokens,
                       const Vocabulary& vocab, const ModelParams& params,
                       const Matrix& dropout_scale);

LstmTrace LstmForward(const Matrix& input, const LstmParams& params,
                      bool reverse);
// Returns d input; accumulates parameter gradients into `grads`.
Matrix LstmBackward(const LstmTrace& trace, const Matrix& input,
                    const Matrix& d_hidden, const LstmParams& params,
                    LstmParams& grads);

// Bidirectional encoder from zero initial states.
EncodeTrace Encode(const Matrix& input, const ModelParams& params);
Matrix EncodeBackward(const EncodeTrace& trace, const Matrix& d_hidden,
                      const ModelParams& params, ModelParams& grads);

// Logits = hidden * proj_w + proj_b (per row).
Matrix Project(const Matrix& hidden, const ModelParams& params);
Matrix ProjectBackward(const Matrix& hidden, const Matrix& d_logits,
                       const ModelParams& params, ModelParams& grads);

void EmbedBackward(const EmbedTrace& trace, const Matrix& d_output,
                   ModelParams& grads);

// Loss gradients flowing into a forward trace. Empty matrices mean zero.
struct Upstream {
  Matrix d_logits;
  Matrix d_hidden;
};

// Full backward pass through projection, encoder, feature perturbation and
// embedder. Returns dLoss/d(encoder input). Throws std::logic_error when the
// trace was produced with different parameters.
Matrix Backward(const ForwardTrace& trace, const Upstream& upstream,
                const ModelParams& params, ModelParams& grads);

// Per-token softmax cross-entropy (summed) and its logits gradient.
double TokenCrossEntropy(const Matrix& logits, std::span<const int> tags);
double TokenCrossEntropyBackward(const Matrix& logits, std::span<const int> tags,
                                 double scale, Matrix& d_logits);

// The tagger: hyperparameters, label scheme, vocabulary and parameters.
class Model {
 public:
  Model() = default;
  Model(HyperConfig hyper, LabelScheme scheme, Vocabulary vocab,
        ModelParams params);
  // Random initialisation seeded from hyper.seed.
  static Model Create(const HyperConfig& hyper, const LabelScheme& scheme,
                      const Vocabulary& vocab);

  const HyperConfig& hyper() const { return hyper_; }
  const LabelScheme& scheme() const { return scheme_; }
  const Vocabulary& vocab() const { return vocab_; }
  const ModelParams& params() const { return params_; }
  ModelParams& mutable_params() { return params_; }

  // Train mode draws a dropout mask from `rng` (required when dropout > 0).
  EmbedTrace Embed(std::span<const std::string> tokens, Mode mode,
                   Rng* rng) const;
  // Runs encoder and projection on an embedding, optionally perturbed.
  ForwardTrace Run(EmbedTrace embed, Matrix feature_keep = {},
                   Matrix feature_shift = {}) const;
  ForwardTrace Forward(std::span<const std::string> tokens, Mode mode,
                       Rng* rng) const;

  // Supervised loss for the configured objective.
  double Loss(const Matrix& logits, std::span<const int> tags) const;
  // Adds scale * dLoss/dlogits into d_logits (and transition gradients into
  // grads.trans for the CRF objective). Returns the loss.
  double LossBackward(const Matrix& logits, std::span<const int> tags,
                      double scale, Matrix& d_logits, ModelParams& grads) const;

  std::vector<int> Decode(const Matrix& logits) const;
  std::vector<std::string> Predict(std::span<const std::string> tokens) const;

 private:
  HyperConfig hyper_;
  LabelScheme scheme_;
  Vocabulary vocab_;
  ModelParams params_;
};

// Predicted tag strings for every sentence of a dataset (eval mode).
std::vector<std::vector<std::string>> PredictDataset(const Model& model,
                                                     const Dataset& dataset);

// Self-describing text checkpoint; doubles are written in shortest
// round-trip form, so Save followed by Load is lossless.
std::string SerializeModel(const Model& model);
Model DeserializeModel(std::string_view text);  // throws DataError
void SaveModel(const Model& model, const std::string& path);
Model LoadModel(const std::string& path);

// Reads "word v1 ... v_d" lines into rows of the word embedding for words the
// vocabulary knows. Returns the number of rows replaced. Throws DataError on a
// dimension mismatch.
int LoadPretrainedEmbeddings(Model& model, std::string_view text);

}  // namespace robustsf

#endif  // ROBUSTSF_TAGGER_H_
