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

#include "robustsf/tagger.h"

#include <cmath>
#include <stdexcept>

#include "robustsf/crf.h"

namespace robustsf {

std::string_view ToString(Objective objective) {
  return objective == Objective::kCrf ? "crf" : "token_xent";
}

Objective ParseObjective(std::string_view name) {
  if (name == "crf") return Objective::kCrf;
  if (name == "token_xent") return Objective::kTokenCrossEntropy;
  throw ConfigError("unknown objective '" + std::string(name) + "'");
}

void HyperConfig::Validate() const {
  if (word_dim <= 0 || char_dim <= 0 || hidden <= 0) {
    throw ConfigError("embedding and hidden dimensions must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("dropout must lie in [0, 1)");
  }
}

namespace {

LstmParams LstmZeros(int input_dim, int hidden) {
  return {Matrix::Zero(4 * hidden, input_dim), Matrix::Zero(4 * hidden, hidden),
          Vector::Zero(4 * hidden)};
}

void FillUniform(Matrix& m, double bound, Rng& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.Uniform(-bound, bound);
  }
}

inline double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void CheckTrace(const ForwardTrace& trace, const ModelParams& params) {
  if (trace.params_version != params.version) {
    throw std::logic_error("stale forward trace: parameters changed since the forward pass");
  }
  if (trace.logits.cols() != params.num_tags() ||
      trace.encode.hidden.cols() != 2 * params.hidden() ||
      trace.encode.input.cols() != params.fwd.w_x.cols()) {
    throw std::logic_error("forward trace does not match parameter shapes");
  }
}

}  // namespace

ModelParams ModelParams::Zeros(int vocab_size, int char_vocab_size,
                               int word_dim, int char_dim, int hidden,
                               int num_tags) {
  ModelParams p;
  const int input_dim = word_dim + char_dim;
  p.word_emb = Matrix::Zero(vocab_size, word_dim);
  p.char_emb = Matrix::Zero(char_vocab_size, char_dim);
  p.fwd = LstmZeros(input_dim, hidden);
  p.bwd = LstmZeros(input_dim, hidden);
  p.proj_w = Matrix::Zero(2 * hidden, num_tags);
  p.proj_b = Vector::Zero(num_tags);
  p.trans = Matrix::Zero(num_tags + 2, num_tags + 2);
  return p;
}

ModelParams ModelParams::Random(int vocab_size, int char_vocab_size,
                                int word_dim, int char_dim, int hidden,
                                int num_tags, Rng& rng) {
  ModelParams p = Zeros(vocab_size, char_vocab_size, word_dim, char_dim, hidden, num_tags);
  constexpr double kBound = 0.1;
  FillUniform(p.word_emb, kBound, rng);
  FillUniform(p.char_emb, kBound, rng);
  FillUniform(p.fwd.w_x, kBound, rng);
  FillUniform(p.fwd.w_h, kBound, rng);
  FillUniform(p.bwd.w_x, kBound, rng);
  FillUniform(p.bwd.w_h, kBound, rng);
  FillUniform(p.proj_w, kBound, rng);
  return p;
}

ModelParams ModelParams::ZerosLike() const {
  ModelParams p = Zeros(static_cast<int>(word_emb.rows()),
                        static_cast<int>(char_emb.rows()),
                        static_cast<int>(word_emb.cols()),
                        static_cast<int>(char_emb.cols()), hidden(), num_tags());
  p.version = version;
  return p;
}

std::vector<ModelParams::Tensor> ModelParams::Tensors() {
  auto view = [](std::string_view name, auto& m) {
    return Tensor{name, std::span<double>(m.data(), static_cast<std::size_t>(m.size()))};
  };
  return {view("word_emb", word_emb), view("char_emb", char_emb),
          view("fwd.w_x", fwd.w_x),   view("fwd.w_h", fwd.w_h),
          view("fwd.b", fwd.b),       view("bwd.w_x", bwd.w_x),
          view("bwd.w_h", bwd.w_h),   view("bwd.b", bwd.b),
          view("proj_w", proj_w),     view("proj_b", proj_b),
          view("trans", trans)};
}

std::vector<ModelParams::ConstTensor> ModelParams::Tensors() const {
  std::vector<ConstTensor> out;
  for (auto& t : const_cast<ModelParams*>(this)->Tensors()) {
    out.push_back({t.name, std::span<const double>(t.values.data(), t.values.size())});
  }
  return out;
}

void ModelParams::SetZero() {
  for (auto& t : Tensors()) std::fill(t.values.begin(), t.values.end(), 0.0);
}

bool ModelParams::AllFinite() const {
  for (const auto& t : Tensors()) {
    for (double v : t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

bool ModelParams::SameShape(const ModelParams& other) const {
  auto a = Tensors();
  auto b = other.Tensors();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].values.size() != b[i].values.size()) return false;
  }
  return word_emb.cols() == other.word_emb.cols() &&
         char_emb.cols() == other.char_emb.cols() && hidden() == other.hidden() &&
         num_tags() == other.num_tags();
}

Matrix SampleDropoutScale(int rows, int cols, double rate, Rng& rng) {
  Matrix scale(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) scale(i, j) = rng.Bernoulli(rate) ? 0.0 : keep;
  }
  return scale;
}

EmbedTrace EmbedTokens(std::span<const std::string> tokens,
                       const Vocabulary& vocab, const ModelParams& params,
                       const Matrix& dropout_scale) {
  const auto n = static_cast<Eigen::Index>(tokens.size());
  const auto dw = params.word_emb.cols();
  const auto dc = params.char_emb.cols();
  EmbedTrace trace;
  trace.output.resize(n, dw + dc);
  for (Eigen::Index i = 0; i < n; ++i) {
    int w = vocab.WordIndex(tokens[i]);
    if (w >= params.word_emb.rows()) w = kUnkIndex;
    trace.word_ids.push_back(w);
    trace.output.row(i).head(dw) = params.word_emb.row(w);
    auto chars = vocab.CharIndices(tokens[i]);
    for (int& c : chars) {
      if (c >= params.char_emb.rows()) c = kUnkIndex;
    }
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(dc);
    for (int c : chars) mean += params.char_emb.row(c);
    if (!chars.empty()) mean /= static_cast<double>(chars.size());
    trace.output.row(i).tail(dc) = mean;
    trace.char_ids.push_back(std::move(chars));
  }
  if (dropout_scale.size() > 0) {
    if (dropout_scale.rows() != n || dropout_scale.cols() != dw + dc) {
      throw std::invalid_argument("dropout mask shape mismatch");
    }
    trace.dropout_scale = dropout_scale;
    trace.output.array() *= dropout_scale.array();
  }
  return trace;
}

void EmbedBackward(const EmbedTrace& trace, const Matrix& d_output,
                   ModelParams& grads) {
  Matrix d = d_output;
  if (trace.dropout_scale.size() > 0) d.array() *= trace.dropout_scale.array();
  const auto dw = grads.word_emb.cols();
  const auto dc = grads.char_emb.cols();
  for (std::size_t i = 0; i < trace.word_ids.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    grads.word_emb.row(trace.word_ids[i]) += d.row(row).head(dw);
    const auto& chars = trace.char_ids[i];
    if (chars.empty()) continue;
    Eigen::RowVectorXd share = d.row(row).tail(dc) / static_cast<double>(chars.size());
    for (int c : chars) grads.char_emb.row(c) += share;
  }
}

LstmTrace LstmForward(const Matrix& input, const LstmParams& params,
                      bool reverse) {
  const auto n = input.rows();
  const auto h = params.w_h.cols();
  LstmTrace trace;
  trace.reverse = reverse;
  trace.gates.resize(n, 4 * h);
  trace.cells.resize(n, h);
  trace.cell_tanh.resize(n, h);
  trace.hidden.resize(n, h);

  Matrix pre = input * params.w_x.transpose();
  pre.rowwise() += params.b.transpose();
  Vector h_prev = Vector::Zero(h);
  Vector c_prev = Vector::Zero(h);
  Vector z(4 * h);
  for (Eigen::Index s = 0; s < n; ++s) {
    const Eigen::Index t = reverse ? n - 1 - s : s;
    z.noalias() = params.w_h * h_prev;
    z += pre.row(t).transpose();
    for (Eigen::Index k = 0; k < h; ++k) {
      z(k) = Sigmoid(z(k));
      z(h + k) = Sigmoid(z(h + k));
      z(2 * h + k) = std::tanh(z(2 * h + k));
      z(3 * h + k) = Sigmoid(z(3 * h + k));
    }
    Vector c = z.segment(h, h).cwiseProduct(c_prev) +
               z.segment(0, h).cwiseProduct(z.segment(2 * h, h));
    Vector tc = c.array().tanh();
    Vector hh = z.segment(3 * h, h).cwiseProduct(tc);
    trace.gates.row(t) = z.transpose();
    trace.cells.row(t) = c.transpose();
    trace.cell_tanh.row(t) = tc.transpose();
    trace.hidden.row(t) = hh.transpose();
    h_prev = hh;
    c_prev = c;
  }
  return trace;
}

Matrix LstmBackward(const LstmTrace& trace, const Matrix& input,
                    const Matrix& d_hidden, const LstmParams& params,
                    LstmParams& grads) {
  const auto n = input.rows();
  const auto h = params.w_h.cols();
  Matrix d_pre(n, 4 * h);
  Matrix h_prev_rows = Matrix::Zero(n, h);
  Vector dh_next = Vector::Zero(h);
  Vector dc_next = Vector::Zero(h);
  Vector dz(4 * h);
  for (Eigen::Index s = n - 1; s >= 0; --s) {
    const Eigen::Index t = trace.reverse ? n - 1 - s : s;
    const Eigen::Index prev = trace.reverse ? t + 1 : t - 1;
    const bool has_prev = s > 0;
    if (has_prev) h_prev_rows.row(t) = trace.hidden.row(prev);

    const auto gates = trace.gates.row(t);
    Vector dh = d_hidden.row(t).transpose() + dh_next;
    for (Eigen::Index k = 0; k < h; ++k) {
      const double i = gates(k), f = gates(h + k), g = gates(2 * h + k),
                   o = gates(3 * h + k);
      const double tc = trace.cell_tanh(t, k);
      const double c_prev = has_prev ? trace.cells(prev, k) : 0.0;
      const double d_o = dh(k) * tc;
      const double dc = dh(k) * o * (1.0 - tc * tc) + dc_next(k);
      dz(k) = dc * g * i * (1.0 - i);
      dz(h + k) = dc * c_prev * f * (1.0 - f);
      dz(2 * h + k) = dc * i * (1.0 - g * g);
      dz(3 * h + k) = d_o * o * (1.0 - o);
      dc_next(k) = dc * f;
    }
    dh_next.noalias() = params.w_h.transpose() * dz;
    d_pre.row(t) = dz.transpose();
  }
  grads.w_x.noalias() += d_pre.transpose() * input;
  grads.w_h.noalias() += d_pre.transpose() * h_prev_rows;
  grads.b += d_pre.colwise().sum().transpose();
  return d_pre * params.w_x;
}

EncodeTrace Encode(const Matrix& input, const ModelParams& params) {
  EncodeTrace trace;
  trace.input = input;
  trace.fwd = LstmForward(input, params.fwd, false);
  trace.bwd = LstmForward(input, params.bwd, true);
  const auto h = params.hidden();
  trace.hidden.resize(input.rows(), 2 * h);
  trace.hidden.leftCols(h) = trace.fwd.hidden;
  trace.hidden.rightCols(h) = trace.bwd.hidden;
  return trace;
}

Matrix EncodeBackward(const EncodeTrace& trace, const Matrix& d_hidden,
                      const ModelParams& params, ModelParams& grads) {
  const auto h = params.hidden();
  Matrix d_input = LstmBackward(trace.fwd, trace.input, d_hidden.leftCols(h),
                                params.fwd, grads.fwd);
  d_input += LstmBackward(trace.bwd, trace.input, d_hidden.rightCols(h),
                          params.bwd, grads.bwd);
  return d_input;
}

Matrix Project(const Matrix& hidden, const ModelParams& params) {
  Matrix logits = hidden * params.proj_w;
  logits.rowwise() += params.proj_b.transpose();
  return logits;
}

Matrix ProjectBackward(const Matrix& hidden, const Matrix& d_logits,
                       const ModelParams& params, ModelParams& grads) {
  grads.proj_w.noalias() += hidden.transpose() * d_logits;
  grads.proj_b += d_logits.colwise().sum().transpose();
  return d_logits * params.proj_w.transpose();
}

Matrix Backward(const ForwardTrace& trace, const Upstream& upstream,
                const ModelParams& params, ModelParams& grads) {
  CheckTrace(trace, params);
  const auto n = trace.logits.rows();
  Matrix d_hidden = Matrix::Zero(n, trace.encode.hidden.cols());
  if (upstream.d_logits.size() > 0) {
    if (upstream.d_logits.rows() != n || upstream.d_logits.cols() != trace.logits.cols()) {
      throw std::invalid_argument("logits gradient shape mismatch");
    }
    d_hidden += ProjectBackward(trace.encode.hidden, upstream.d_logits, params, grads);
  }
  if (upstream.d_hidden.size() > 0) {
    if (upstream.d_hidden.rows() != n || upstream.d_hidden.cols() != d_hidden.cols()) {
      throw std::invalid_argument("hidden gradient shape mismatch");
    }
    d_hidden += upstream.d_hidden;
  }
  Matrix d_input = EncodeBackward(trace.encode, d_hidden, params, grads);
  Matrix d_embed = d_input;
  if (trace.feature_keep.size() > 0) d_embed.array() *= trace.feature_keep.array();
  EmbedBackward(trace.embed, d_embed, grads);
  return d_input;
}

double TokenCrossEntropy(const Matrix& logits, std::span<const int> tags) {
  Matrix unused = Matrix::Zero(logits.rows(), logits.cols());
  return TokenCrossEntropyBackward(logits, tags, 0.0, unused);
}

double TokenCrossEntropyBackward(const Matrix& logits, std::span<const int> tags,
                                 double scale, Matrix& d_logits) {
  if (static_cast<Eigen::Index>(tags.size()) != logits.rows()) {
    throw DataError("tag sequence length does not match sentence length");
  }
  double loss = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const int y = tags[static_cast<std::size_t>(i)];
    if (y < 0 || y >= logits.cols()) throw DataError("tag index out of range");
    double m = logits.row(i).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(i).array() - m).exp();
    double z = e.sum();
    loss += -(logits(i, y) - m - std::log(z));
    if (scale != 0.0) {
      d_logits.row(i) += scale * e / z;
      d_logits(i, y) -= scale;
    }
  }
  return loss;
}

Model::Model(HyperConfig hyper, LabelScheme scheme, Vocabulary vocab,
             ModelParams params)
    : hyper_(hyper),
      scheme_(std::move(scheme)),
      vocab_(std::move(vocab)),
      params_(std::move(params)) {
  hyper_.Validate();
  if (params_.word_emb.rows() != vocab_.word_count() ||
      params_.char_emb.rows() != vocab_.char_count() ||
      params_.word_emb.cols() != hyper_.word_dim ||
      params_.char_emb.cols() != hyper_.char_dim ||
      params_.hidden() != hyper_.hidden || params_.num_tags() != scheme_.size()) {
    throw DataError("model parameters do not match hyperparameters, vocabulary or labels");
  }
}

Model Model::Create(const HyperConfig& hyper, const LabelScheme& scheme,
                    const Vocabulary& vocab) {
  hyper.Validate();
  Rng rng(DeriveSeed(hyper.seed, 0));
  return Model(hyper, scheme, vocab,
               ModelParams::Random(vocab.word_count(), vocab.char_count(),
                                   hyper.word_dim, hyper.char_dim, hyper.hidden,
                                   scheme.size(), rng));
}

EmbedTrace Model::Embed(std::span<const std::string> tokens, Mode mode,
                        Rng* rng) const {
  Matrix scale;
  if (mode == Mode::kTrain && hyper_.dropout > 0.0) {
    if (!rng) throw std::invalid_argument("train-mode embedding needs a random source");
    scale = SampleDropoutScale(static_cast<int>(tokens.size()), hyper_.input_dim(),
                               hyper_.dropout, *rng);
  }
  return EmbedTokens(tokens, vocab_, params_, scale);
}

ForwardTrace Model::Run(EmbedTrace embed, Matrix feature_keep,
                        Matrix feature_shift) const {
  ForwardTrace trace;
  trace.embed = std::move(embed);
  trace.feature_keep = std::move(feature_keep);
  trace.feature_shift = std::move(feature_shift);
  Matrix input = trace.embed.output;
  if (trace.feature_keep.size() > 0) input.array() *= trace.feature_keep.array();
  if (trace.feature_shift.size() > 0) input += trace.feature_shift;
  trace.encode = Encode(input, params_);
  trace.logits = Project(trace.encode.hidden, params_);
  trace.params_version = params_.version;
  return trace;
}

ForwardTrace Model::Forward(std::span<const std::string> tokens, Mode mode,
                            Rng* rng) const {
  return Run(Embed(tokens, mode, rng));
}

double Model::Loss(const Matrix& logits, std::span<const int> tags) const {
  if (hyper_.objective == Objective::kCrf) return CrfNll(logits, params_.trans, tags);
  return TokenCrossEntropy(logits, tags);
}

double Model::LossBackward(const Matrix& logits, std::span<const int> tags,
                           double scale, Matrix& d_logits,
                           ModelParams& grads) const {
  if (hyper_.objective == Objective::kCrf) {
    return CrfNllBackward(logits, params_.trans, tags, scale, d_logits, grads.trans);
  }
  return TokenCrossEntropyBackward(logits, tags, scale, d_logits);
}

std::vector<int> Model::Decode(const Matrix& logits) const {
  if (hyper_.objective == Objective::kCrf) return Viterbi(logits, params_.trans);
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index arg = 0;
    for (Eigen::Index k = 1; k < logits.cols(); ++k) {
      if (logits(i, k) > logits(i, arg)) arg = k;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return out;
}

std::vector<std::string> Model::Predict(std::span<const std::string> tokens) const {
  auto trace = Forward(tokens, Mode::kEval, nullptr);
  auto path = Decode(trace.logits);
  return scheme_.Decode(path);
}

std::vector<std::vector<std::string>> PredictDataset(const Model& model,
                                                     const Dataset& dataset) {
  std::vector<std::vector<std::string>> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.sentences) out.push_back(model.Predict(s.tokens));
  return out;
}

}  // namespace robustsf
