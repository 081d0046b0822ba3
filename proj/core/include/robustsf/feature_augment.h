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

#ifndef ROBUSTSF_FEATURE_AUGMENT_H_
#define ROBUSTSF_FEATURE_AUGMENT_H_

#include <optional>
#include <string_view>

#include "robustsf/common.h"

namespace robustsf {

// Perturbations of the L x d embedding matrix. All preserve its shape, which
// keeps token-wise consistency losses well defined.

enum class FeatureAugmentMethod { kAdv, kTokenCut, kFeatureCut, kDropout };

std::string_view ToString(FeatureAugmentMethod method);
std::optional<FeatureAugmentMethod> ParseFeatureAugmentMethod(std::string_view name);

struct FeatureAugmentConfig {
  FeatureAugmentMethod method = FeatureAugmentMethod::kTokenCut;
  double rate = 0.3;     // cut/drop methods
  double epsilon = 1.0;  // adversarial step size
  std::uint64_t seed = 1;

  static FeatureAugmentConfig Defaults(FeatureAugmentMethod method);
  void Validate() const;  // throws ConfigError
};

// E + epsilon * G / ||G||_F, or E unchanged when G is zero.
Matrix AdvPerturb(const Matrix& embeddings, const Matrix& gradient, double epsilon);
// The additive term of AdvPerturb alone.
Matrix AdvShift(const Matrix& gradient, double epsilon);

// 0/1 multiplier masks. Rows (TokenCut), columns (FeatureCut) or single
// entries (Dropout) are zeroed independently with probability `rate`. No
// rescaling of the survivors.
Matrix TokenCutMask(int rows, int cols, double rate, Rng& rng);
Matrix FeatureCutMask(int rows, int cols, double rate, Rng& rng);
Matrix DropoutMask(int rows, int cols, double rate, Rng& rng);

Matrix TokenCut(const Matrix& embeddings, double rate, Rng& rng);
Matrix FeatureCut(const Matrix& embeddings, double rate, Rng& rng);
// rate must be < 1.
Matrix DropoutAugment(const Matrix& embeddings, double rate, Rng& rng);

}  // namespace robustsf

#endif  // ROBUSTSF_FEATURE_AUGMENT_H_
