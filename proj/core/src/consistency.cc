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

#include "robustsf/consistency.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "robustsf/noise_eval.h"

namespace robustsf {

namespace {

// Row-wise log-softmax.
Matrix LogSoftmaxRows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    out.row(i) = logits.row(i).array() - lse;
  }
  return out;
}

void CheckSameShape(const Matrix& a, const Matrix& b, std::string_view what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError(std::string(what) + " consistency needs equal shapes, got " +
                      std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
                      std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

Eigen::Map<Eigen::ArrayXd> AsArray(std::span<double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

Eigen::Map<const Eigen::ArrayXd> AsArray(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

std::string_view ToString(ConsistencyLoss loss) {
  switch (loss) {
    case ConsistencyLoss::kNone: return "none";
    case ConsistencyLoss::kAug: return "aug";
    case ConsistencyLoss::kLogits: return "logits";
    case ConsistencyLoss::kRepre: return "repre";
  }
  return "unknown";
}

ConsistencyLoss ParseConsistencyLoss(std::string_view name) {
  for (auto loss : {ConsistencyLoss::kNone, ConsistencyLoss::kAug, ConsistencyLoss::kLogits,
                    ConsistencyLoss::kRepre}) {
    if (name == ToString(loss)) return loss;
  }
  throw ConfigError("unknown loss type '" + std::string(name) + "' (expected none, aug, logits or repre)");
}

std::string_view ToString(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind ParseOptimizerKind(std::string_view name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected adam or sgd)");
}

void OptimizerConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be non-negative");
}

void TrainConfig::Validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  optimizer.Validate();
  if (text_augment) text_augment->Validate();
  if (feature_augment) feature_augment->Validate();
  if (loss_type == ConsistencyLoss::kNone) return;
  if (!text_augment && !feature_augment) {
    throw ConfigError("loss type '" + std::string(ToString(loss_type)) +
                      "' needs a text or feature augmentation");
  }
  if ((loss_type == ConsistencyLoss::kLogits || loss_type == ConsistencyLoss::kRepre) &&
      text_augment && !AllowsTokenConsistency(text_augment->method)) {
    throw ConfigError("loss type '" + std::string(ToString(loss_type)) + "' compares clean and " +
                      "augmented tokens position by position, but " +
                      std::string(ToString(text_augment->method)) +
                      " can change the length of the token sequence");
  }
}

double LossLogits(const Matrix& p, const Matrix& p_tilde) {
  Matrix unused_p = Matrix::Zero(p.rows(), p.cols());
  Matrix unused_q = Matrix::Zero(p_tilde.rows(), p_tilde.cols());
  return LossLogitsBackward(p, p_tilde, 0.0, unused_p, unused_q);
}

double LossLogitsBackward(const Matrix& p, const Matrix& p_tilde, double scale, Matrix& d_p,
                          Matrix& d_p_tilde) {
  CheckSameShape(p, p_tilde, "logits");
  const auto n = p.rows();
  if (n == 0) return 0.0;
  const Matrix log_p = LogSoftmaxRows(p);
  const Matrix log_q = LogSoftmaxRows(p_tilde);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::ArrayXd lp = log_p.row(i).transpose().array();
    const Eigen::ArrayXd lq = log_q.row(i).transpose().array();
    const Eigen::ArrayXd prob = lp.exp();
    const Eigen::ArrayXd a = lp - lq;
    const double kl = (prob * a).sum();
    total += kl;
    if (scale != 0.0) {
      const double s = scale / static_cast<double>(n);
      d_p.row(i) += (s * prob * (a - kl)).matrix().transpose();
      d_p_tilde.row(i) += (s * (lq.exp() - prob)).matrix().transpose();
    }
  }
  return total / static_cast<double>(n);
}

double LossRepre(const Matrix& h, const Matrix& h_tilde) {
  CheckSameShape(h, h_tilde, "representation");
  if (h.size() == 0) return 0.0;
  return (h - h_tilde).squaredNorm() / static_cast<double>(h.size());
}

double LossRepreBackward(const Matrix& h, const Matrix& h_tilde, double scale, Matrix& d_h,
                         Matrix& d_h_tilde) {
  const double loss = LossRepre(h, h_tilde);
  if (scale != 0.0 && h.size() > 0) {
    Matrix g = (2.0 * scale / static_cast<double>(h.size())) * (h - h_tilde);
    d_h += g;
    d_h_tilde -= g;
  }
  return loss;
}

double TotalLoss(double l_normal, double l_consis, double alpha, ConsistencyLoss loss_type) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  if (loss_type == ConsistencyLoss::kNone) return l_normal;
  return l_normal + alpha * l_consis;
}

double LossAug(const Model& model, const Sentence& augmented) {
  auto tags = model.scheme().Encode(augmented.tags);
  auto trace = model.Forward(augmented.tokens, Mode::kEval, nullptr);
  return model.Loss(trace.logits, tags);
}

ExampleLoss ExampleLossAndGradient(const Model& model, const Sentence& clean,
                                   const AugmentPlan& plan, ConsistencyLoss loss_type,
                                   double alpha, ModelParams* grads, std::string_view context) {
  const ModelParams& params = model.params();
  const bool need_clean_gradient = plan.adversarial && !plan.augmented &&
                                   loss_type != ConsistencyLoss::kNone;
  ModelParams scratch;
  ModelParams* g = grads;
  if (!g && (plan.adversarial && loss_type != ConsistencyLoss::kNone)) {
    scratch = params.ZerosLike();
    g = &scratch;
  }

  const auto clean_tags = model.scheme().Encode(clean.tags);
  ForwardTrace clean_trace =
      model.Run(EmbedTokens(clean.tokens, model.vocab(), params, plan.clean_dropout));
  ExampleLoss loss;
  Matrix clean_grad_e;  // dL_normal/dE of the clean sample
  if (g && (grads || need_clean_gradient)) {
    Matrix d_logits = Matrix::Zero(clean_trace.logits.rows(), clean_trace.logits.cols());
    loss.l_normal = model.LossBackward(clean_trace.logits, clean_tags, 1.0, d_logits, *g);
    clean_grad_e = Backward(clean_trace, {d_logits, {}}, params, *g);
  } else {
    loss.l_normal = model.Loss(clean_trace.logits, clean_tags);
  }
  if (loss_type == ConsistencyLoss::kNone) {
    loss.total = loss.l_normal;
    return loss;
  }

  const Sentence& aug = plan.augmented ? *plan.augmented : clean;
  const auto aug_tags = plan.augmented ? model.scheme().Encode(aug.tags) : clean_tags;
  EmbedTrace aug_embed = plan.augmented
                             ? EmbedTokens(aug.tokens, model.vocab(), params, plan.aug_dropout)
                             : clean_trace.embed;
  Matrix shift = plan.feature_shift;
  if (plan.adversarial) {
    Matrix grad_e;
    if (!plan.augmented) {
      grad_e = clean_grad_e;
    } else {
      ModelParams adv_scratch = params.ZerosLike();
      ForwardTrace probe = model.Run(aug_embed);
      Matrix d_logits = Matrix::Zero(probe.logits.rows(), probe.logits.cols());
      model.LossBackward(probe.logits, aug_tags, 1.0, d_logits, adv_scratch);
      grad_e = Backward(probe, {d_logits, {}}, params, adv_scratch);
    }
    Matrix adv = AdvShift(grad_e, plan.epsilon);
    if (shift.size() == 0) {
      shift = std::move(adv);
    } else {
      shift += adv;
    }
  }
  ForwardTrace aug_trace = model.Run(std::move(aug_embed), plan.feature_keep, std::move(shift));

  Matrix d_aug_logits, d_aug_hidden, d_clean_logits, d_clean_hidden;
  switch (loss_type) {
    case ConsistencyLoss::kAug:
      if (grads) {
        d_aug_logits = Matrix::Zero(aug_trace.logits.rows(), aug_trace.logits.cols());
        loss.l_consis = model.LossBackward(aug_trace.logits, aug_tags, alpha, d_aug_logits, *grads);
      } else {
        loss.l_consis = model.Loss(aug_trace.logits, aug_tags);
      }
      break;
    case ConsistencyLoss::kLogits:
      if (aug_trace.logits.rows() != clean_trace.logits.rows()) {
        throw ConfigError("logits consistency: " + std::string(context) +
                          " changed the length of the token sequence");
      }
      d_clean_logits = Matrix::Zero(clean_trace.logits.rows(), clean_trace.logits.cols());
      d_aug_logits = Matrix::Zero(aug_trace.logits.rows(), aug_trace.logits.cols());
      loss.l_consis = LossLogitsBackward(clean_trace.logits, aug_trace.logits, grads ? alpha : 0.0,
                                         d_clean_logits, d_aug_logits);
      break;
    case ConsistencyLoss::kRepre:
      if (aug_trace.encode.hidden.rows() != clean_trace.encode.hidden.rows()) {
        throw ConfigError("representation consistency: " + std::string(context) +
                          " changed the length of the token sequence");
      }
      d_clean_hidden = Matrix::Zero(clean_trace.encode.hidden.rows(), clean_trace.encode.hidden.cols());
      d_aug_hidden = Matrix::Zero(aug_trace.encode.hidden.rows(), aug_trace.encode.hidden.cols());
      loss.l_consis = LossRepreBackward(clean_trace.encode.hidden, aug_trace.encode.hidden,
                                        grads ? alpha : 0.0, d_clean_hidden, d_aug_hidden);
      break;
    case ConsistencyLoss::kNone:
      break;
  }
  loss.total = TotalLoss(loss.l_normal, loss.l_consis, alpha, loss_type);
  if (grads) {
    Backward(aug_trace, {d_aug_logits, d_aug_hidden}, params, *grads);
    if (d_clean_logits.size() > 0 || d_clean_hidden.size() > 0) {
      Backward(clean_trace, {d_clean_logits, d_clean_hidden}, params, *grads);
    }
  }
  return loss;
}

Optimizer::Optimizer(const OptimizerConfig& config, const ModelParams& shape)
    : config_(config), first_(shape.ZerosLike()), second_(shape.ZerosLike()) {
  config_.Validate();
}

void Optimizer::Step(ModelParams& params, const ModelParams& grads) {
  if (!params.SameShape(grads)) throw std::invalid_argument("gradient shape does not match parameters");
  ++steps_;
  auto p = params.Tensors();
  auto g = grads.Tensors();
  auto m = first_.Tensors();
  auto v = second_.Tensors();
  const double lr = config_.learning_rate;
  const double wd = config_.weight_decay;
  if (config_.kind == OptimizerKind::kAdam) {
    const double t = static_cast<double>(steps_);
    const double c1 = 1.0 - std::pow(config_.beta1, t);
    const double c2 = 1.0 - std::pow(config_.beta2, t);
    for (std::size_t k = 0; k < p.size(); ++k) {
      auto theta = AsArray(p[k].values);
      Eigen::ArrayXd grad = AsArray(g[k].values);
      if (wd != 0.0) grad += wd * theta;
      auto mk = AsArray(m[k].values);
      auto vk = AsArray(v[k].values);
      mk = config_.beta1 * mk + (1.0 - config_.beta1) * grad;
      vk = config_.beta2 * vk + (1.0 - config_.beta2) * grad.square();
      theta -= lr * (mk / c1) / ((vk / c2).sqrt() + config_.epsilon);
    }
  } else {
    for (std::size_t k = 0; k < p.size(); ++k) {
      auto theta = AsArray(p[k].values);
      Eigen::ArrayXd grad = AsArray(g[k].values);
      if (wd != 0.0) grad += wd * theta;
      if (config_.momentum > 0.0) {
        auto mk = AsArray(m[k].values);
        mk = config_.momentum * mk + grad;
        theta -= lr * mk;
      } else {
        theta -= lr * grad;
      }
    }
  }
  ++params.version;
}

std::string TrainLog::ToCsv() const {
  std::string out = "epoch,l_normal,l_consis,dev_f1,seconds\n";
  for (const auto& e : epochs) {
    out += std::to_string(e.epoch) + "," + FormatDouble(e.l_normal) + "," + FormatDouble(e.l_consis) +
           "," + FormatDouble(e.dev_f1) + "," + FormatDouble(e.seconds) + "\n";
  }
  return out;
}

double EvaluateF1(const Model& model, const Dataset& dataset) {
  return SpanF1(PredictDataset(model, dataset), dataset).f1;
}

TrainResult Train(const TrainConfig& config, Model model, const Dataset& train, const Dataset& dev,
                  const EpochCallback& on_epoch) {
  if (train.sentences.empty()) throw DataError("training set is empty");
  std::optional<TextAugmentConfig> text = config.text_augment;
  if (text && text->method == TextAugmentMethod::kInsertWord && !text->sampler) {
    text->sampler = std::make_shared<UnigramSampler>(train);
  }
  {
    TrainConfig resolved = config;
    resolved.text_augment = text;
    resolved.Validate();
  }
  for (const auto* ds : {&train, &dev}) {
    for (const auto& s : ds->sentences) model.scheme().Encode(s.tags);
  }
  const bool augmenting = config.loss_type != ConsistencyLoss::kNone;
  const std::string context = text ? std::string(ToString(text->method))
                                   : config.feature_augment
                                         ? std::string(ToString(config.feature_augment->method))
                                         : std::string("augmentation");

  // Independent streams, so the clean path is unaffected by augmentation.
  Rng shuffle_rng(DeriveSeed(config.seed, 1));
  Rng dropout_rng(DeriveSeed(config.seed, 2));
  Rng text_rng(DeriveSeed(DeriveSeed(config.seed, 3), text ? text->seed : 0));
  Rng aug_dropout_rng(DeriveSeed(config.seed, 4));
  Rng feature_rng(DeriveSeed(DeriveSeed(config.seed, 5),
                             config.feature_augment ? config.feature_augment->seed : 0));

  const double dropout = model.hyper().dropout;
  const int dim = model.hyper().input_dim();
  Optimizer optimizer(config.optimizer, model.params());
  ModelParams grads = model.params().ZerosLike();
  std::vector<std::size_t> order(train.sentences.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  ModelParams best = model.params();
  double best_f1 = -1.0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    if (config.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.Index(i)]);
    }
    double sum_normal = 0.0;
    double sum_consis = 0.0;
    for (std::size_t idx : order) {
      const Sentence& s = train.sentences[idx];
      AugmentPlan plan;
      const int length = static_cast<int>(s.size());
      if (dropout > 0.0) plan.clean_dropout = SampleDropoutScale(length, dim, dropout, dropout_rng);
      if (augmenting) {
        int aug_length = length;
        if (text) {
          plan.augmented = ApplyTextAugment(*text, s, text_rng).sentence;
          aug_length = static_cast<int>(plan.augmented->size());
          if (dropout > 0.0) plan.aug_dropout = SampleDropoutScale(aug_length, dim, dropout, aug_dropout_rng);
        }
        if (const auto& f = config.feature_augment) {
          switch (f->method) {
            case FeatureAugmentMethod::kAdv:
              plan.adversarial = true;
              plan.epsilon = f->epsilon;
              break;
            case FeatureAugmentMethod::kTokenCut:
              plan.feature_keep = TokenCutMask(aug_length, dim, f->rate, feature_rng);
              break;
            case FeatureAugmentMethod::kFeatureCut:
              plan.feature_keep = FeatureCutMask(aug_length, dim, f->rate, feature_rng);
              break;
            case FeatureAugmentMethod::kDropout:
              plan.feature_keep = DropoutMask(aug_length, dim, f->rate, feature_rng);
              break;
          }
        }
      }
      grads.SetZero();
      auto loss = ExampleLossAndGradient(model, s, plan, config.loss_type, config.alpha, &grads, context);
      optimizer.Step(model.mutable_params(), grads);
      sum_normal += loss.l_normal;
      sum_consis += loss.l_consis;
    }
    if (!model.params().AllFinite()) {
      throw std::runtime_error("training diverged: non-finite parameters after epoch " +
                               std::to_string(epoch));
    }
    EpochRecord record;
    record.epoch = epoch;
    const double n = static_cast<double>(train.sentences.size());
    record.l_normal = sum_normal / n;
    record.l_consis = sum_consis / n;
    record.dev_f1 = dev.sentences.empty() ? 0.0 : EvaluateF1(model, dev);
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // Ties go to the later, longer-trained epoch.
    if (record.dev_f1 >= best_f1) {
      best_f1 = record.dev_f1;
      best = model.params();
      result.log.best_epoch = epoch;
    }
    result.log.epochs.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  model.mutable_params() = std::move(best);
  result.model = std::move(model);
  return result;
}

TrainResult Train(const TrainConfig& config, const HyperConfig& hyper, const Dataset& train,
                  const Dataset& dev, const Vocabulary& vocab, const EpochCallback& on_epoch) {
  const Dataset* sets[] = {&train, &dev};
  LabelScheme scheme = SchemeFromDatasets(sets);
  return Train(config, Model::Create(hyper, scheme, vocab), train, dev, on_epoch);
}

}  // namespace robustsf
