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

#ifndef ROBUSTSF_CONSISTENCY_H_
#define ROBUSTSF_CONSISTENCY_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robustsf/common.h"
#include "robustsf/corpus.h"
#include "robustsf/feature_augment.h"
#include "robustsf/tagger.h"
#include "robustsf/text_augment.h"

namespace robustsf {

// Which layer the clean and augmented samples are asked to agree at.
enum class ConsistencyLoss {
  kNone,    // plain supervised training
  kAug,     // supervised loss of the augmented pair
  kLogits,  // token-mean KL(softmax(P) || softmax(P~))
  kRepre,   // element-mean squared error between H and H~
};

std::string_view ToString(ConsistencyLoss loss);
ConsistencyLoss ParseConsistencyLoss(std::string_view name);  // throws ConfigError

enum class OptimizerKind { kAdam, kSgd };

std::string_view ToString(OptimizerKind kind);
OptimizerKind ParseOptimizerKind(std::string_view name);  // throws ConfigError

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double momentum = 0.0;  // SGD only
  double weight_decay = 0.0;

  void Validate() const;  // throws ConfigError
};

struct TrainConfig {
  int epochs = 12;
  double alpha = 1.0;
  ConsistencyLoss loss_type = ConsistencyLoss::kNone;
  std::optional<TextAugmentConfig> text_augment;
  std::optional<FeatureAugmentConfig> feature_augment;
  OptimizerConfig optimizer;
  std::uint64_t seed = 1;
  bool shuffle = true;

  // Throws ConfigError. Token-wise losses (logits, repre) are rejected with a
  // text augmentation that can change the number of tokens.
  void Validate() const;
};

double LossLogits(const Matrix& p, const Matrix& p_tilde);
// Adds scale * d/dP and scale * d/dP~ into the two gradient matrices and
// returns the loss.
double LossLogitsBackward(const Matrix& p, const Matrix& p_tilde, double scale,
                          Matrix& d_p, Matrix& d_p_tilde);

double LossRepre(const Matrix& h, const Matrix& h_tilde);
double LossRepreBackward(const Matrix& h, const Matrix& h_tilde, double scale,
                         Matrix& d_h, Matrix& d_h_tilde);

// L_normal + alpha * L_consis, or L_normal for kNone. alpha must be >= 0.
double TotalLoss(double l_normal, double l_consis, double alpha,
                 ConsistencyLoss loss_type = ConsistencyLoss::kAug);

// Supervised loss of an (augmented) pair in eval mode.
double LossAug(const Model& model, const Sentence& augmented);

// Fixed random choices for one training example, so the example loss is a
// deterministic function of the parameters.
struct AugmentPlan {
  std::optional<Sentence> augmented;  // text-level sample; unset = clean input
  Matrix clean_dropout;               // embedder dropout multipliers (may be empty)
  Matrix aug_dropout;                 // for `augmented` (may be empty)
  Matrix feature_keep;                // 0/1 mask on the augmented features
  Matrix feature_shift;               // constant additive perturbation
  // Adds epsilon * G / ||G|| to the shift, with G the supervised-loss
  // gradient of the sample being perturbed. G is held constant.
  bool adversarial = false;
  double epsilon = 1.0;
};

struct ExampleLoss {
  double l_normal = 0.0;
  double l_consis = 0.0;
  double total = 0.0;
};

// Loss of one example and, when `grads` is given, accumulation of its exact
// gradient. `context` names the augmentation in shape diagnostics.
ExampleLoss ExampleLossAndGradient(const Model& model, const Sentence& clean,
                                   const AugmentPlan& plan, ConsistencyLoss loss_type,
                                   double alpha, ModelParams* grads,
                                   std::string_view context = "augmentation");

// First-order optimizer over ModelParams. Every step bumps params.version.
class Optimizer {
 public:
  Optimizer(const OptimizerConfig& config, const ModelParams& shape);
  void Step(ModelParams& params, const ModelParams& grads);
  std::int64_t steps() const { return steps_; }

 private:
  OptimizerConfig config_;
  ModelParams first_;
  ModelParams second_;
  std::int64_t steps_ = 0;
};

struct EpochRecord {
  int epoch = 0;
  double l_normal = 0.0;  // mean over training sentences
  double l_consis = 0.0;
  double dev_f1 = 0.0;    // span F1 in [0, 1]
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;

  // "epoch,l_normal,l_consis,dev_f1,seconds".
  std::string ToCsv() const;
};

struct TrainResult {
  Model model;  // parameters of the best dev epoch
  TrainLog log;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Per-sentence updates over `train` starting from `initial`, keeping the
// parameters of the epoch with the best dev span F1 (the latest on ties).
// Text augmentations and perturbations are resampled every epoch.
TrainResult Train(const TrainConfig& config, Model initial, const Dataset& train,
                  const Dataset& dev, const EpochCallback& on_epoch = {});
// Initialises a model from `hyper`, the label scheme of train and dev, and
// `vocab`.
TrainResult Train(const TrainConfig& config, const HyperConfig& hyper, const Dataset& train,
                  const Dataset& dev, const Vocabulary& vocab,
                  const EpochCallback& on_epoch = {});

// Span F1 in [0, 1] of a model on a dataset.
double EvaluateF1(const Model& model, const Dataset& dataset);

}  // namespace robustsf

#endif  // ROBUSTSF_CONSISTENCY_H_
