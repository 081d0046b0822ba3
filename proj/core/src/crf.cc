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

#include "robustsf/crf.h"

#include <cmath>
#include <limits>

namespace robustsf {

namespace {

void CheckShapes(const Matrix& emissions, const Matrix& trans) {
  const auto k = emissions.cols();
  if (emissions.rows() == 0 || k == 0) throw DataError("empty emission matrix");
  if (trans.rows() != k + 2 || trans.cols() != k + 2) {
    throw DataError("transition matrix must be (K+2) x (K+2)");
  }
}

void CheckTags(const Matrix& emissions, std::span<const int> tags) {
  if (static_cast<Eigen::Index>(tags.size()) != emissions.rows()) {
    throw DataError("tag sequence length " + std::to_string(tags.size()) +
                    " does not match sentence length " +
                    std::to_string(emissions.rows()));
  }
  for (int t : tags) {
    if (t < 0 || t >= emissions.cols()) throw DataError("tag index out of range");
  }
}

double LogSumExp(const Vector& v) {
  double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

// alpha(i, k): log-sum of scores of prefixes ending in tag k at position i.
Matrix ForwardScores(const Matrix& emissions, const Matrix& trans) {
  const int n = static_cast<int>(emissions.rows());
  const int k = static_cast<int>(emissions.cols());
  Matrix alpha(n, k);
  alpha.row(0) = trans.row(CrfStart(k)).head(k) + emissions.row(0);
  Vector scratch(k);
  for (int i = 1; i < n; ++i) {
    for (int to = 0; to < k; ++to) {
      for (int from = 0; from < k; ++from) scratch(from) = alpha(i - 1, from) + trans(from, to);
      alpha(i, to) = LogSumExp(scratch) + emissions(i, to);
    }
  }
  return alpha;
}

// beta(i, k): log-sum of scores of suffixes after position i given tag k.
Matrix BackwardScores(const Matrix& emissions, const Matrix& trans) {
  const int n = static_cast<int>(emissions.rows());
  const int k = static_cast<int>(emissions.cols());
  Matrix beta(n, k);
  for (int from = 0; from < k; ++from) beta(n - 1, from) = trans(from, CrfEnd(k));
  Vector scratch(k);
  for (int i = n - 2; i >= 0; --i) {
    for (int from = 0; from < k; ++from) {
      for (int to = 0; to < k; ++to) {
        scratch(to) = trans(from, to) + emissions(i + 1, to) + beta(i + 1, to);
      }
      beta(i, from) = LogSumExp(scratch);
    }
  }
  return beta;
}

double FinalLogPartition(const Matrix& alpha, const Matrix& trans) {
  const int k = static_cast<int>(alpha.cols());
  Vector last = alpha.row(alpha.rows() - 1).transpose() +
                trans.col(CrfEnd(k)).head(k);
  return LogSumExp(last);
}

}  // namespace

double CrfPathScore(const Matrix& emissions, const Matrix& trans,
                    std::span<const int> tags) {
  CheckShapes(emissions, trans);
  CheckTags(emissions, tags);
  const int k = static_cast<int>(emissions.cols());
  double score = trans(CrfStart(k), tags[0]);
  for (std::size_t i = 0; i < tags.size(); ++i) {
    score += emissions(static_cast<Eigen::Index>(i), tags[i]);
    if (i + 1 < tags.size()) score += trans(tags[i], tags[i + 1]);
  }
  return score + trans(tags.back(), CrfEnd(k));
}

double CrfLogPartition(const Matrix& emissions, const Matrix& trans) {
  CheckShapes(emissions, trans);
  return FinalLogPartition(ForwardScores(emissions, trans), trans);
}

double CrfNll(const Matrix& emissions, const Matrix& trans,
              std::span<const int> tags) {
  CheckShapes(emissions, trans);
  CheckTags(emissions, tags);
  return CrfLogPartition(emissions, trans) - CrfPathScore(emissions, trans, tags);
}

CrfMarginals CrfPosteriors(const Matrix& emissions, const Matrix& trans) {
  CheckShapes(emissions, trans);
  const int n = static_cast<int>(emissions.rows());
  const int k = static_cast<int>(emissions.cols());
  Matrix alpha = ForwardScores(emissions, trans);
  Matrix beta = BackwardScores(emissions, trans);

  CrfMarginals m;
  m.log_partition = FinalLogPartition(alpha, trans);
  m.node = (alpha + beta).array() - m.log_partition;
  m.node = m.node.array().exp();
  m.transition_counts = Matrix::Zero(k + 2, k + 2);
  for (int t = 0; t < k; ++t) {
    m.transition_counts(CrfStart(k), t) = m.node(0, t);
    m.transition_counts(t, CrfEnd(k)) = m.node(n - 1, t);
  }
  for (int i = 0; i + 1 < n; ++i) {
    for (int from = 0; from < k; ++from) {
      for (int to = 0; to < k; ++to) {
        m.transition_counts(from, to) +=
            std::exp(alpha(i, from) + trans(from, to) + emissions(i + 1, to) +
                     beta(i + 1, to) - m.log_partition);
      }
    }
  }
  return m;
}

double CrfNllBackward(const Matrix& emissions, const Matrix& trans,
                      std::span<const int> tags, double scale,
                      Matrix& d_emissions, Matrix& d_trans) {
  CheckShapes(emissions, trans);
  CheckTags(emissions, tags);
  const int n = static_cast<int>(emissions.rows());
  const int k = static_cast<int>(emissions.cols());
  CrfMarginals m = CrfPosteriors(emissions, trans);
  double nll = m.log_partition - CrfPathScore(emissions, trans, tags);
  if (scale == 0.0) return nll;

  d_emissions += scale * m.node;
  d_trans += scale * m.transition_counts;
  d_trans(CrfStart(k), tags[0]) -= scale;
  d_trans(tags[n - 1], CrfEnd(k)) -= scale;
  for (int i = 0; i < n; ++i) {
    d_emissions(i, tags[i]) -= scale;
    if (i + 1 < n) d_trans(tags[i], tags[i + 1]) -= scale;
  }
  return nll;
}

std::vector<int> Viterbi(const Matrix& emissions, const Matrix& trans) {
  CheckShapes(emissions, trans);
  const int n = static_cast<int>(emissions.rows());
  const int k = static_cast<int>(emissions.cols());
  Matrix best(n, k);
  Eigen::MatrixXi back(n, k);
  best.row(0) = trans.row(CrfStart(k)).head(k) + emissions.row(0);
  back.row(0).setZero();
  for (int i = 1; i < n; ++i) {
    for (int to = 0; to < k; ++to) {
      int arg = 0;
      double top = best(i - 1, 0) + trans(0, to);
      for (int from = 1; from < k; ++from) {
        double cand = best(i - 1, from) + trans(from, to);
        if (cand > top) {  // strict: earlier (lower) index wins ties
          top = cand;
          arg = from;
        }
      }
      best(i, to) = top + emissions(i, to);
      back(i, to) = arg;
    }
  }
  int last = 0;
  double top = best(n - 1, 0) + trans(0, CrfEnd(k));
  for (int t = 1; t < k; ++t) {
    double cand = best(n - 1, t) + trans(t, CrfEnd(k));
    if (cand > top) {
      top = cand;
      last = t;
    }
  }
  std::vector<int> path(n);
  path[n - 1] = last;
  for (int i = n - 1; i > 0; --i) path[i - 1] = back(i, path[i]);
  return path;
}

}  // namespace robustsf
