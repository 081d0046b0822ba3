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

#ifndef ROBUSTSF_NOISE_EVAL_H_
#define ROBUSTSF_NOISE_EVAL_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robustsf/corpus.h"
#include "robustsf/text_augment.h"

namespace robustsf {

// ---------------------------------------------------------------------------
// Rule-based noise processes mapping a clean (tokens, tags) pair to a noisy
// pair.

enum class NoiseKind {
  kTypos,          // character edits on slot-entity tokens
  kKeyboard,       // QWERTY-neighbour substitutions on any token
  kSpellingError,  // character edits on any token
  kHomophone,      // homophone substitution (needs a homophone lexicon)
  kSynonymSwap,    // synonym substitution (needs a synonym lexicon)
  kAppendIrr,      // appends an irrelevant O-tagged clause
  kConcatSent,     // appends another sentence of the set with its tags
  kSimplify,       // deletes O-tagged tokens
  kMixed,          // sequential composition of `parts`
};

std::string_view ToString(NoiseKind kind);
std::optional<NoiseKind> ParseNoiseKind(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kTypos;
  // Per-token (or per-gap) probability. AppendIrr and ConcatSent modify every
  // sentence and ignore it.
  double intensity = 0.3;
  std::uint64_t seed = 1;
  std::vector<NoiseSpec> parts;  // kMixed only, applied in order

  // "typos@0.3", or a '+'-joined list for a mixed suite such as
  // "typos@0.3+synonym_swap@0.3+append_irr". Intensity defaults to 0.3.
  static NoiseSpec Parse(std::string_view text, std::uint64_t seed);
  std::string ToString() const;
  void Validate() const;  // throws ConfigError
};

// Seed used for part `index` of a mixed suite seeded with `seed`.
inline std::uint64_t MixedPartSeed(std::uint64_t seed, std::size_t index) {
  return DeriveSeed(seed, 1000 + index);
}

struct NoisePair {
  int original_index = 0;
  Sentence noisy;
  std::vector<int> alignment;  // per noisy token: clean index or kInserted

  bool operator==(const NoisePair&) const = default;
};

struct NoiseResources {
  std::shared_ptr<const Lexicon> homophones;
  std::shared_ptr<const Lexicon> synonyms;
};

// One pair per clean sentence, in order. Throws ConfigError when a
// lexicon-backed kind has no lexicon.
std::vector<NoisePair> ApplyNoise(const Dataset& clean, const NoiseSpec& spec,
                                  const NoiseResources& resources);

// Replaces one letter of the token by a QWERTY neighbour; tokens without
// ASCII letters are returned unchanged.
std::string KeyboardTypo(std::string_view token, Rng& rng);
const std::vector<std::string>& IrrelevantClauses();

Dataset NoisyDataset(const std::vector<NoisePair>& pairs, std::string name = "");

// Sidecar alignment file: one line per sentence, space-separated clean token
// indices with "-" for inserted tokens.
std::string WriteAlignment(const std::vector<NoisePair>& pairs);
std::vector<std::vector<int>> ParseAlignment(std::string_view text);
// Pairs a noisy set with its clean source, line by line. Without alignments,
// tokens are aligned by longest common subsequence.
std::vector<NoisePair> PairNoisySet(const Dataset& clean, const Dataset& noisy,
                                    const std::vector<std::vector<int>>* alignments);

// Longest-common-subsequence alignment over token strings: matched noisy
// tokens map to their clean index, the rest are kInserted.
std::vector<int> AlignByLcs(const std::vector<std::string>& clean,
                            const std::vector<std::string>& noisy);

// ---------------------------------------------------------------------------
// Metrics.

struct SpanScores {
  std::int64_t correct = 0;
  std::int64_t predicted = 0;
  std::int64_t gold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Micro-averaged exact-match span scores. An empty prediction and gold set
// scores 1.0 (nothing to find, nothing wrongly found).
SpanScores SpanF1(const std::vector<std::vector<std::string>>& predicted,
                  const std::vector<std::vector<std::string>>& gold);
SpanScores SpanF1(const std::vector<std::vector<std::string>>& predicted,
                  const Dataset& gold);

double DeltaF1(double f1_clean, double f1_noise);
// Noisy-F1 gain over the baseline as a fraction of the baseline's F1 drop:
// (f1_method_noise - f1_baseline_noise) / delta_f1_baseline. nullopt when the
// baseline drop is zero.
std::optional<double> Rho(double f1_method_noise, double f1_baseline_noise,
                          double delta_f1_baseline);
// (delta_f1_method - delta_f1_baseline) / delta_f1_baseline, the composition
// of the robustness gap R with the baseline drop.
std::optional<double> RhoFromDeltas(double delta_f1_method, double delta_f1_baseline);

struct DamageRates {
  std::optional<double> d_cs;   // share of context (O) tokens changed
  std::optional<double> d_sem;  // share of slot-entity tokens changed
};

// A clean token is unchanged when some noisy token aligned to it has the same
// surface form.
DamageRates ComputeDamageRates(const Dataset& clean, const std::vector<NoisePair>& pairs);

// One row of a robustness report. F1 values are percentages rounded to one
// decimal; derived columns are computed from the rounded values.
struct MetricsReport {
  std::string suite;
  double f1_clean = 0.0;
  double f1_noise = 0.0;
  double delta_f1 = 0.0;
  std::optional<double> r;            // f1_noise - baseline f1_noise
  std::optional<double> rho;          // fraction, see Rho()
  std::optional<double> rho_from_deltas;
  std::optional<double> d_cs;
  std::optional<double> d_sem;
};

struct MethodReport {
  std::string method;
  std::vector<MetricsReport> rows;  // suites in input order, then "Overall"
};

inline constexpr std::string_view kCleanSuite = "clean";
inline constexpr std::string_view kOverallSuite = "Overall";

struct F1Record {
  std::string method;
  std::string suite;  // kCleanSuite for the clean test set
  double f1 = 0.0;    // percentage
};

// "method,suite,f1" CSV with a header line.
std::vector<F1Record> ParseF1Records(std::string_view csv);
std::string WriteF1Records(const std::vector<F1Record>& records);

double RoundToTenth(double value);

// Builds per-method reports. With a baseline method, R and rho are filled
// for every suite; throws ConfigError if the named baseline is absent. The
// Overall row averages f1_noise, R and rho over the noise suites.
std::vector<MethodReport> BuildReports(
    const std::vector<F1Record>& records, const std::optional<std::string>& baseline,
    const std::map<std::string, DamageRates>& damage = {});

// "suite,f1_clean,f1_noise,delta_f1,r,rho,d_cs,d_sem"; percentages with one
// decimal, absent values empty.
std::string MetricsCsv(const MethodReport& report);
// All methods, with a leading method column and a trailing rho_from_deltas
// column.
std::string SummaryCsv(const std::vector<MethodReport>& reports);
// Method rows by suite columns with each cell "f1 (rho%)"; the clean cell
// shows the change over the baseline.
std::string MarkdownTable(const std::vector<MethodReport>& reports,
                          const std::optional<std::string>& baseline);
// "suite,d_cs,d_sem" with percentages to one decimal.
std::string DamageCsv(const std::vector<std::pair<std::string, DamageRates>>& rows);

}  // namespace robustsf

#endif  // ROBUSTSF_NOISE_EVAL_H_
