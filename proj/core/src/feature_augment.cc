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

#include "robustsf/feature_augment.h"

#include <string>

namespace robustsf {

std::string_view ToString(FeatureAugmentMethod method) {
  switch (method) {
    case FeatureAugmentMethod::kAdv: return "adv";
    case FeatureAugmentMethod::kTokenCut: return "token_cut";
    case FeatureAugmentMethod::kFeatureCut: return "feature_cut";
    case FeatureAugmentMethod::kDropout: return "dropout";
  }
  return "unknown";
}

std::optional<FeatureAugmentMethod> ParseFeatureAugmentMethod(std::string_view name) {
  for (auto m : {FeatureAugmentMethod::kAdv, FeatureAugmentMethod::kTokenCut,
                 FeatureAugmentMethod::kFeatureCut, FeatureAugmentMethod::kDropout}) {
    if (name == ToString(m)) return m;
  }
  return std::nullopt;
}

FeatureAugmentConfig FeatureAugmentConfig::Defaults(FeatureAugmentMethod method) {
  FeatureAugmentConfig config;
  config.method = method;
  return config;
}

void FeatureAugmentConfig::Validate() const {
  if (method == FeatureAugmentMethod::kAdv) {
    if (!(epsilon > 0.0)) throw ConfigError("adversarial epsilon must be positive");
    return;
  }
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("feature augmentation rate must lie in [0, 1]");
  if (method == FeatureAugmentMethod::kDropout && rate >= 1.0) {
    throw ConfigError("dropout augmentation rate must be below 1");
  }
}

Matrix AdvShift(const Matrix& gradient, double epsilon) {
  const double norm = gradient.norm();
  if (norm == 0.0) return Matrix::Zero(gradient.rows(), gradient.cols());
  return (epsilon / norm) * gradient;
}

Matrix AdvPerturb(const Matrix& embeddings, const Matrix& gradient, double epsilon) {
  if (embeddings.rows() != gradient.rows() || embeddings.cols() != gradient.cols()) {
    throw std::invalid_argument("adversarial gradient shape does not match embeddings");
  }
  return embeddings + AdvShift(gradient, epsilon);
}

Matrix TokenCutMask(int rows, int cols, double rate, Rng& rng) {
  Matrix mask = Matrix::Ones(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (rng.Bernoulli(rate)) mask.row(i).setZero();
  }
  return mask;
}

Matrix FeatureCutMask(int rows, int cols, double rate, Rng& rng) {
  Matrix mask = Matrix::Ones(rows, cols);
  for (int j = 0; j < cols; ++j) {
    if (rng.Bernoulli(rate)) mask.col(j).setZero();
  }
  return mask;
}

Matrix DropoutMask(int rows, int cols, double rate, Rng& rng) {
  Matrix mask(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) mask(i, j) = rng.Bernoulli(rate) ? 0.0 : 1.0;
  }
  return mask;
}

Matrix TokenCut(const Matrix& embeddings, double rate, Rng& rng) {
  return embeddings.cwiseProduct(TokenCutMask(static_cast<int>(embeddings.rows()),
                                              static_cast<int>(embeddings.cols()), rate, rng));
}

Matrix FeatureCut(const Matrix& embeddings, double rate, Rng& rng) {
  return embeddings.cwiseProduct(FeatureCutMask(static_cast<int>(embeddings.rows()),
                                                static_cast<int>(embeddings.cols()), rate, rng));
}

Matrix DropoutAugment(const Matrix& embeddings, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout rate must lie in [0, 1)");
  return embeddings.cwiseProduct(DropoutMask(static_cast<int>(embeddings.rows()),
                                             static_cast<int>(embeddings.cols()), rate, rng));
}

}  // namespace robustsf
