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

#ifndef ROBUSTSF_CRF_H_
#define ROBUSTSF_CRF_H_

#include <span>
#include <vector>

#include "robustsf/common.h"

namespace robustsf {

// Linear-chain CRF over emission scores P (L x K) and a (K+2) x (K+2)
// transition matrix whose row/column K is the virtual START state and K+1 the
// virtual END state; trans(from, to).
//
// score(y) = trans(START, y_0) + sum_i P(i, y_i) + sum_i trans(y_i, y_{i+1})
//            + trans(y_{L-1}, END)

inline int CrfStart(int num_tags) { return num_tags; }
inline int CrfEnd(int num_tags) { return num_tags + 1; }

double CrfPathScore(const Matrix& emissions, const Matrix& trans,
                    std::span<const int> tags);

// log sum over all K^L paths of exp(score), via the forward algorithm in log
// space.
double CrfLogPartition(const Matrix& emissions, const Matrix& trans);

// log Z - score(tags). Throws DataError on a length or tag range mismatch.
double CrfNll(const Matrix& emissions, const Matrix& trans,
              std::span<const int> tags);

// Posterior marginals from forward-backward.
struct CrfMarginals {
  double log_partition = 0.0;
  Matrix node;                 // L x K, P(y_i = k)
  Matrix transition_counts;    // (K+2) x (K+2), expected transition usage
};
CrfMarginals CrfPosteriors(const Matrix& emissions, const Matrix& trans);

// Value and gradients of CrfNll scaled by `scale`; gradients are added into
// d_emissions (L x K) and d_trans ((K+2) x (K+2)).
double CrfNllBackward(const Matrix& emissions, const Matrix& trans,
                      std::span<const int> tags, double scale,
                      Matrix& d_emissions, Matrix& d_trans);

// Highest-scoring path. Ties resolve to the lowest tag index at every
// back-pointer and at the final state.
std::vector<int> Viterbi(const Matrix& emissions, const Matrix& trans);

}  // namespace robustsf

#endif  // ROBUSTSF_CRF_H_
