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

#ifndef ROBUSTSF_COMMON_H_
#define ROBUSTSF_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace robustsf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Malformed input data (files, sentences, tag sequences).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or contradictory configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seeded pseudo-random source. The mapping from engine output to values is
// fixed here rather than delegated to <random> distributions, whose outputs
// are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Always false for p <= 0, always true for p >= 1.
  bool Bernoulli(double p) { return Uniform() < p; }
  // Uniform in [0, n); n must be positive.
  std::size_t Index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Independent child seed for stream `stream` of `seed` (splitmix64 finalizer).
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

// Splits a UTF-8 string into code point substrings. Invalid lead bytes are
// kept as single-byte units.
std::vector<std::string> Utf8Chars(std::string_view text);

std::string Join(const std::vector<std::string>& parts, std::string_view sep);
std::vector<std::string> SplitWhitespace(std::string_view text);
std::vector<std::string> Split(std::string_view text, char sep);

// Shortest round-trip decimal representation of a double.
std::string FormatDouble(double value);
double ParseDouble(std::string_view text);
// Fixed one-decimal formatting, e.g. 38.095 -> "38.1".
std::string FormatFixed1(double value);

// Reads a whole file; throws DataError when it cannot be opened.
std::string ReadFile(const std::string& path);
// Writes through a temporary sibling and renames on success, so a failed
// write never leaves a partial file behind.
void WriteFileAtomic(const std::string& path, std::string_view contents);

}  // namespace robustsf

#endif  // ROBUSTSF_COMMON_H_
