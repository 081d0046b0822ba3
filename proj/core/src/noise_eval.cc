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

#include "robustsf/noise_eval.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <string>

namespace robustsf {

namespace {

constexpr std::array<std::pair<NoiseKind, std::string_view>, 9> kKindNames = {{
    {NoiseKind::kTypos, "typos"},
    {NoiseKind::kKeyboard, "keyboard"},
    {NoiseKind::kSpellingError, "spelling_error"},
    {NoiseKind::kHomophone, "homophone"},
    {NoiseKind::kSynonymSwap, "synonym_swap"},
    {NoiseKind::kAppendIrr, "append_irr"},
    {NoiseKind::kConcatSent, "concat_sent"},
    {NoiseKind::kSimplify, "simplify"},
    {NoiseKind::kMixed, "mixed"},
}};

constexpr std::array<std::string_view, 3> kKeyboardRows = {"qwertyuiop", "asdfghjkl", "zxcvbnm"};

// Letters physically adjacent on a QWERTY keyboard: same-row neighbours plus
// the two keys touching from the rows above and below (rows are staggered by
// half a key to the right going down).
const std::vector<std::string>& KeyboardNeighbours() {
  static const std::vector<std::string> table = [] {
    std::vector<std::string> t(26);
    auto add = [&](char a, char b) { t[a - 'a'].push_back(b); };
    for (std::size_t r = 0; r < kKeyboardRows.size(); ++r) {
      const auto row = kKeyboardRows[r];
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) add(row[i], row[i - 1]);
        if (i + 1 < row.size()) add(row[i], row[i + 1]);
        if (r + 1 < kKeyboardRows.size()) {
          const auto below = kKeyboardRows[r + 1];
          for (std::size_t j : {i, i + 1}) {
            if (j >= 1 && j - 1 < below.size()) add(row[i], below[j - 1]);
          }
        }
        if (r > 0) {
          const auto above = kKeyboardRows[r - 1];
          for (std::size_t j : {i, i + 1}) {
            if (j < above.size()) add(row[i], above[j]);
          }
        }
      }
    }
    for (auto& n : t) {
      std::sort(n.begin(), n.end());
      n.erase(std::unique(n.begin(), n.end()), n.end());
    }
    return t;
  }();
  return table;
}

bool IsLowerAscii(char c) { return c >= 'a' && c <= 'z'; }
bool IsUpperAscii(char c) { return c >= 'A' && c <= 'Z'; }

AlignedSentence ApplyOne(const Dataset& clean, std::size_t index, const NoiseSpec& spec,
                         const NoiseResources& resources, Rng& rng) {
  const Sentence& s = clean.sentences[index];
  const double p = spec.intensity;
  switch (spec.kind) {
    case NoiseKind::kTypos:
      return CharAugIf(s, p, rng, [](const Sentence& x, std::size_t i) { return !IsOutside(x.tags[i]); });
    case NoiseKind::kKeyboard: {
      auto out = AlignedSentence::Identity(s);
      for (auto& token : out.sentence.tokens) {
        if (rng.Bernoulli(p)) token = KeyboardTypo(token, rng);
      }
      return out;
    }
    case NoiseKind::kSpellingError:
      return CharAug(s, p, rng);
    case NoiseKind::kHomophone:
      return SpeechAug(s, p, rng, *resources.homophones);
    case NoiseKind::kSynonymSwap:
      return SubWord(s, p, rng, *resources.synonyms);
    case NoiseKind::kAppendIrr: {
      auto out = AlignedSentence::Identity(s);
      const auto& pool = IrrelevantClauses();
      for (const auto& token : SplitWhitespace(pool[rng.Index(pool.size())])) {
        out.sentence.tokens.push_back(token);
        out.sentence.tags.emplace_back("O");
        out.alignment.push_back(kInserted);
      }
      return out;
    }
    case NoiseKind::kConcatSent: {
      auto out = AlignedSentence::Identity(s);
      const std::size_t n = clean.sentences.size();
      std::size_t partner = index;
      if (n > 1) {
        partner = rng.Index(n - 1);
        if (partner >= index) ++partner;
      }
      const Sentence& other = clean.sentences[partner];
      for (std::size_t i = 0; i < other.tokens.size(); ++i) {
        out.sentence.tokens.push_back(other.tokens[i]);
        out.sentence.tags.push_back(other.tags[i]);
        out.alignment.push_back(kInserted);
      }
      return out;
    }
    case NoiseKind::kSimplify:
      return DeleteWordIf(s, p, rng, [](const Sentence& x, std::size_t i) { return IsOutside(x.tags[i]); });
    case NoiseKind::kMixed:
      break;
  }
  throw std::logic_error("ApplyOne called with a mixed spec");
}

}  // namespace

std::string_view ToString(NoiseKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<NoiseKind> ParseNoiseKind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

NoiseSpec NoiseSpec::Parse(std::string_view text, std::uint64_t seed) {
  auto parse_part = [&](std::string_view part) {
    NoiseSpec spec;
    spec.seed = seed;
    auto at = part.find('@');
    auto name = part.substr(0, at);
    auto kind = ParseNoiseKind(name);
    if (!kind || *kind == NoiseKind::kMixed) {
      throw ConfigError("unknown noise kind '" + std::string(name) + "'");
    }
    spec.kind = *kind;
    if (at != std::string_view::npos) {
      try {
        spec.intensity = ParseDouble(part.substr(at + 1));
      } catch (const std::exception&) {
        throw ConfigError("bad noise intensity in '" + std::string(part) + "'");
      }
    }
    return spec;
  };
  auto parts = Split(text, '+');
  if (parts.empty() || (parts.size() == 1 && parts[0].empty())) throw ConfigError("empty noise spec");
  NoiseSpec spec;
  if (parts.size() == 1) {
    spec = parse_part(parts[0]);
  } else {
    spec.kind = NoiseKind::kMixed;
    spec.seed = seed;
    for (const auto& part : parts) spec.parts.push_back(parse_part(part));
  }
  spec.Validate();
  return spec;
}

std::string NoiseSpec::ToString() const {
  if (kind == NoiseKind::kAppendIrr || kind == NoiseKind::kConcatSent) {
    return std::string(robustsf::ToString(kind));
  }
  if (kind != NoiseKind::kMixed) {
    return std::string(robustsf::ToString(kind)) + "@" + FormatDouble(intensity);
  }
  std::vector<std::string> names;
  for (const auto& part : parts) names.push_back(part.ToString());
  return Join(names, "+");
}

void NoiseSpec::Validate() const {
  if (kind == NoiseKind::kMixed) {
    if (parts.empty()) throw ConfigError("mixed noise needs at least one component");
    for (const auto& part : parts) {
      if (part.kind == NoiseKind::kMixed) throw ConfigError("mixed noise components cannot be mixed");
      part.Validate();
    }
    return;
  }
  if (!(intensity >= 0.0 && intensity <= 1.0)) {
    throw ConfigError("noise intensity must lie in [0, 1]");
  }
}

std::string KeyboardTypo(std::string_view token, Rng& rng) {
  std::vector<std::size_t> letters;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (IsLowerAscii(token[i]) || IsUpperAscii(token[i])) letters.push_back(i);
  }
  std::string out(token);
  if (letters.empty()) return out;
  const std::size_t pos = letters[rng.Index(letters.size())];
  const bool upper = IsUpperAscii(out[pos]);
  const char lower = upper ? static_cast<char>(out[pos] - 'A' + 'a') : out[pos];
  const auto& options = KeyboardNeighbours()[lower - 'a'];
  char replacement = options[rng.Index(options.size())];
  out[pos] = upper ? static_cast<char>(replacement - 'a' + 'A') : replacement;
  return out;
}

const std::vector<std::string>& IrrelevantClauses() {
  static const std::vector<std::string> pool = {
      "by the way the weather is lovely today",
      "and i have been thinking about it all week",
      "my friend told me this would be easy",
      "sorry i am typing on my phone",
      "i hope that makes sense",
      "it has been a long day at work",
      "thanks so much in advance",
      "my sister says hello",
      "i just got back from holiday",
      "hopefully it will not rain",
  };
  return pool;
}

std::vector<NoisePair> ApplyNoise(const Dataset& clean, const NoiseSpec& spec,
                                  const NoiseResources& resources) {
  spec.Validate();
  auto needs = [&](NoiseKind kind) {
    if (spec.kind == kind) return true;
    return std::any_of(spec.parts.begin(), spec.parts.end(),
                       [&](const NoiseSpec& p) { return p.kind == kind; });
  };
  if (needs(NoiseKind::kHomophone) && !resources.homophones) {
    throw ConfigError("homophone noise needs a homophone lexicon");
  }
  if (needs(NoiseKind::kSynonymSwap) && !resources.synonyms) {
    throw ConfigError("synonym_swap noise needs a synonym lexicon");
  }

  if (spec.kind == NoiseKind::kMixed) {
    std::vector<NoisePair> pairs;
    Dataset current = clean;
    for (std::size_t i = 0; i < spec.parts.size(); ++i) {
      NoiseSpec part = spec.parts[i];
      part.seed = MixedPartSeed(spec.seed, i);
      auto stage = ApplyNoise(current, part, resources);
      if (pairs.empty()) {
        pairs = std::move(stage);
      } else {
        for (std::size_t j = 0; j < pairs.size(); ++j) {
          pairs[j].alignment = ComposeAlignment(pairs[j].alignment, stage[j].alignment);
          pairs[j].noisy = std::move(stage[j].noisy);
        }
      }
      current = NoisyDataset(pairs, clean.name);
      current.split = clean.split;
    }
    return pairs;
  }

  Rng rng(spec.seed);
  std::vector<NoisePair> pairs;
  pairs.reserve(clean.sentences.size());
  for (std::size_t i = 0; i < clean.sentences.size(); ++i) {
    auto aligned = ApplyOne(clean, i, spec, resources, rng);
    pairs.push_back({static_cast<int>(i), std::move(aligned.sentence), std::move(aligned.alignment)});
  }
  return pairs;
}

Dataset NoisyDataset(const std::vector<NoisePair>& pairs, std::string name) {
  Dataset out;
  out.name = std::move(name);
  out.split = SplitKind::kTest;
  out.sentences.reserve(pairs.size());
  for (const auto& pair : pairs) out.sentences.push_back(pair.noisy);
  return out;
}

std::string WriteAlignment(const std::vector<NoisePair>& pairs) {
  std::string out;
  for (const auto& pair : pairs) {
    for (std::size_t i = 0; i < pair.alignment.size(); ++i) {
      if (i) out += ' ';
      out += pair.alignment[i] == kInserted ? "-" : std::to_string(pair.alignment[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::vector<int>> ParseAlignment(std::string_view text) {
  std::vector<std::vector<int>> out;
  auto lines = Split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::vector<int> row;
    for (const auto& field : SplitWhitespace(lines[n])) {
      if (field == "-") {
        row.push_back(kInserted);
        continue;
      }
      int value = -1;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size() || value < 0) {
        throw DataError("alignment line " + std::to_string(n + 1) + ": bad index '" + field + "'");
      }
      row.push_back(value);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<int> AlignByLcs(const std::vector<std::string>& clean,
                            const std::vector<std::string>& noisy) {
  const std::size_t n = clean.size();
  const std::size_t m = noisy.size();
  // table[i][j]: LCS length of clean[i..] and noisy[j..].
  std::vector<std::vector<int>> table(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      table[i][j] = clean[i] == noisy[j] ? table[i + 1][j + 1] + 1
                                         : std::max(table[i + 1][j], table[i][j + 1]);
    }
  }
  std::vector<int> alignment(m, kInserted);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n && j < m) {
    if (clean[i] == noisy[j]) {
      alignment[j] = static_cast<int>(i);
      ++i;
      ++j;
    } else if (table[i + 1][j] >= table[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  return alignment;
}

std::vector<NoisePair> PairNoisySet(const Dataset& clean, const Dataset& noisy,
                                    const std::vector<std::vector<int>>* alignments) {
  if (clean.sentences.size() != noisy.sentences.size()) {
    throw DataError("noisy set has " + std::to_string(noisy.sentences.size()) +
                    " sentences, clean set has " + std::to_string(clean.sentences.size()));
  }
  if (alignments && alignments->size() != noisy.sentences.size()) {
    throw DataError("alignment file has " + std::to_string(alignments->size()) +
                    " lines, expected " + std::to_string(noisy.sentences.size()));
  }
  std::vector<NoisePair> pairs;
  for (std::size_t i = 0; i < noisy.sentences.size(); ++i) {
    NoisePair pair{static_cast<int>(i), noisy.sentences[i], {}};
    if (alignments) {
      pair.alignment = (*alignments)[i];
      if (pair.alignment.size() != pair.noisy.tokens.size()) {
        throw DataError("alignment line " + std::to_string(i + 1) + " does not match its sentence length");
      }
      for (int origin : pair.alignment) {
        if (origin != kInserted && origin >= static_cast<int>(clean.sentences[i].tokens.size())) {
          throw DataError("alignment line " + std::to_string(i + 1) + " points past the clean sentence");
        }
      }
    } else {
      pair.alignment = AlignByLcs(clean.sentences[i].tokens, pair.noisy.tokens);
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

DamageRates ComputeDamageRates(const Dataset& clean, const std::vector<NoisePair>& pairs) {
  std::int64_t context_total = 0, context_kept = 0, slot_total = 0, slot_kept = 0;
  for (const auto& pair : pairs) {
    if (pair.original_index < 0 || pair.original_index >= static_cast<int>(clean.sentences.size())) {
      throw DataError("noise pair refers to a missing clean sentence");
    }
    const Sentence& s = clean.sentences[pair.original_index];
    std::vector<bool> kept(s.tokens.size(), false);
    for (std::size_t k = 0; k < pair.alignment.size(); ++k) {
      int origin = pair.alignment[k];
      if (origin == kInserted) continue;
      if (origin >= static_cast<int>(s.tokens.size())) throw DataError("alignment points past the clean sentence");
      if (pair.noisy.tokens[k] == s.tokens[origin]) kept[origin] = true;
    }
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (IsOutside(s.tags[i])) {
        ++context_total;
        context_kept += kept[i];
      } else {
        ++slot_total;
        slot_kept += kept[i];
      }
    }
  }
  DamageRates rates;
  if (context_total > 0) {
    rates.d_cs = static_cast<double>(context_total - context_kept) / static_cast<double>(context_total);
  }
  if (slot_total > 0) {
    rates.d_sem = static_cast<double>(slot_total - slot_kept) / static_cast<double>(slot_total);
  }
  return rates;
}

}  // namespace robustsf
