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

#include "robustsf/text_augment.h"

#include <algorithm>

namespace robustsf {

AlignedSentence AlignedSentence::Identity(const Sentence& s) {
  AlignedSentence out{s, {}};
  out.alignment.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out.alignment[i] = static_cast<int>(i);
  return out;
}

std::vector<int> ComposeAlignment(const std::vector<int>& first,
                                  const std::vector<int>& second) {
  std::vector<int> out;
  out.reserve(second.size());
  for (int idx : second) {
    if (idx == kInserted) {
      out.push_back(kInserted);
    } else {
      out.push_back(first.at(static_cast<std::size_t>(idx)));
    }
  }
  return out;
}

std::string ApplyCharOp(std::string_view token, CharOp op, std::size_t pos,
                        std::string_view ch) {
  auto chars = Utf8Chars(token);
  switch (op) {
    case CharOp::kAdd:
      if (pos > chars.size()) throw std::out_of_range("char add position");
      chars.insert(chars.begin() + static_cast<std::ptrdiff_t>(pos), std::string(ch));
      break;
    case CharOp::kDelete:
      if (pos >= chars.size()) throw std::out_of_range("char delete position");
      chars.erase(chars.begin() + static_cast<std::ptrdiff_t>(pos));
      break;
    case CharOp::kReplace:
      if (pos >= chars.size()) throw std::out_of_range("char replace position");
      chars[pos] = std::string(ch);
      break;
  }
  return Join(chars, "");
}

namespace {

std::string RandomLetter(Rng& rng) {
  return std::string(1, static_cast<char>('a' + rng.Index(26)));
}

std::string RandomOtherLetter(std::string_view current, Rng& rng) {
  // 25 letters if the current character is a lowercase letter, 26 otherwise.
  bool is_letter = current.size() == 1 && current[0] >= 'a' && current[0] <= 'z';
  if (!is_letter) return RandomLetter(rng);
  auto k = static_cast<char>('a' + rng.Index(25));
  if (k >= current[0]) ++k;
  return std::string(1, k);
}

}  // namespace

std::string RandomCharEdit(std::string_view token, Rng& rng) {
  auto chars = Utf8Chars(token);
  auto op = static_cast<CharOp>(rng.Index(3));
  if (op == CharOp::kDelete && chars.size() <= 1) op = CharOp::kReplace;
  switch (op) {
    case CharOp::kAdd: {
      std::size_t pos = rng.Index(chars.size() + 1);
      return ApplyCharOp(token, op, pos, RandomLetter(rng));
    }
    case CharOp::kDelete:
      return ApplyCharOp(token, op, rng.Index(chars.size()));
    case CharOp::kReplace: {
      std::size_t pos = rng.Index(chars.size());
      return ApplyCharOp(token, op, pos, RandomOtherLetter(chars[pos], rng));
    }
  }
  return std::string(token);
}

AlignedSentence CharAugIf(const Sentence& s, double p, Rng& rng,
                          const TokenFilter& eligible) {
  auto out = AlignedSentence::Identity(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (eligible && !eligible(s, i)) continue;
    if (rng.Bernoulli(p)) out.sentence.tokens[i] = RandomCharEdit(s.tokens[i], rng);
  }
  return out;
}

AlignedSentence CharAug(const Sentence& s, double p, Rng& rng) {
  return CharAugIf(s, p, rng, nullptr);
}

AlignedSentence DeleteWordIf(const Sentence& s, double p, Rng& rng,
                             const TokenFilter& eligible) {
  const std::size_t n = s.size();
  std::vector<bool> drop(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (eligible && !eligible(s, i)) continue;
    drop[i] = rng.Bernoulli(p);
  }
  if (n > 0 && std::all_of(drop.begin(), drop.end(), [](bool d) { return d; })) {
    drop[n - 1] = false;
  }

  // Chunk id per token (-1 outside any chunk), conlleval semantics.
  std::vector<int> chunk(n, -1);
  auto spans = ExtractSpans(s.tags);
  for (std::size_t c = 0; c < spans.size(); ++c) {
    for (int i = spans[c].start; i < spans[c].end; ++i) chunk[i] = static_cast<int>(c);
  }

  AlignedSentence out;
  int last_kept = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (drop[i]) continue;
    std::string tag = s.tags[i];
    auto parts = ParseTag(tag);
    // An I- token whose chunk predecessor was deleted opens the chunk.
    if (parts && parts->prefix == 'I' && i > 0 && drop[i - 1] &&
        (last_kept < 0 || chunk[last_kept] != chunk[i])) {
      tag = "B-" + std::string(parts->type);
    }
    out.sentence.tokens.push_back(s.tokens[i]);
    out.sentence.tags.push_back(std::move(tag));
    out.alignment.push_back(static_cast<int>(i));
    last_kept = static_cast<int>(i);
  }
  return out;
}

AlignedSentence DeleteWord(const Sentence& s, double p, Rng& rng) {
  return DeleteWordIf(s, p, rng, nullptr);
}

UnigramSampler::UnigramSampler(const Dataset& corpus) {
  std::map<std::string, double> counts;
  for (const auto& s : corpus.sentences) {
    for (const auto& token : s.tokens) counts[token] += 1.0;
  }
  if (counts.empty()) throw DataError("unigram sampler needs a non-empty corpus");
  double total = 0.0;
  for (const auto& [word, count] : counts) {
    words_.push_back(word);
    total += count;
    cumulative_.push_back(total);
  }
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

const std::string& UnigramSampler::Sample(Rng& rng) const {
  double u = rng.Uniform();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  return words_[std::min(idx, words_.size() - 1)];
}

std::vector<std::size_t> InsertionGaps(const Sentence& s) {
  std::vector<std::size_t> gaps;
  const std::size_t n = s.size();
  for (std::size_t g = 0; g <= n; ++g) {
    bool left_ok = g == 0 || IsOutside(s.tags[g - 1]);
    bool right_ok = g == n || IsOutside(s.tags[g]);
    if (left_ok && right_ok) gaps.push_back(g);
  }
  return gaps;
}

AlignedSentence InsertWord(const Sentence& s, double p, Rng& rng,
                           const UnigramSampler& sampler) {
  auto gaps = InsertionGaps(s);
  std::vector<const std::string*> inserted(s.size() + 1, nullptr);
  for (std::size_t g : gaps) {
    if (rng.Bernoulli(p)) inserted[g] = &sampler.Sample(rng);
  }
  AlignedSentence out;
  for (std::size_t g = 0; g <= s.size(); ++g) {
    if (inserted[g]) {
      out.sentence.tokens.push_back(*inserted[g]);
      out.sentence.tags.push_back("O");
      out.alignment.push_back(kInserted);
    }
    if (g < s.size()) {
      out.sentence.tokens.push_back(s.tokens[g]);
      out.sentence.tags.push_back(s.tags[g]);
      out.alignment.push_back(static_cast<int>(g));
    }
  }
  return out;
}

namespace {

AlignedSentence Substitute(const Sentence& s, double p, Rng& rng,
                           const Lexicon& lexicon) {
  auto out = AlignedSentence::Identity(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto* alts = lexicon.Find(s.tokens[i]);
    if (!alts || alts->empty()) continue;
    if (rng.Bernoulli(p)) out.sentence.tokens[i] = (*alts)[rng.Index(alts->size())];
  }
  return out;
}

}  // namespace

AlignedSentence SpeechAug(const Sentence& s, double p, Rng& rng,
                          const Lexicon& homophones) {
  return Substitute(s, p, rng, homophones);
}

AlignedSentence SubWord(const Sentence& s, double p, Rng& rng,
                        const Lexicon& synonyms) {
  return Substitute(s, p, rng, synonyms);
}

std::string_view ToString(TextAugmentMethod method) {
  switch (method) {
    case TextAugmentMethod::kCharAug: return "char_aug";
    case TextAugmentMethod::kDeleteWord: return "delete_word";
    case TextAugmentMethod::kInsertWord: return "insert_word";
    case TextAugmentMethod::kSpeechAug: return "speech_aug";
    case TextAugmentMethod::kSubWord: return "sub_word";
  }
  return "unknown";
}

std::optional<TextAugmentMethod> ParseTextAugmentMethod(std::string_view name) {
  for (auto m : {TextAugmentMethod::kCharAug, TextAugmentMethod::kDeleteWord,
                 TextAugmentMethod::kInsertWord, TextAugmentMethod::kSpeechAug,
                 TextAugmentMethod::kSubWord}) {
    if (name == ToString(m)) return m;
  }
  return std::nullopt;
}

double DefaultProbability(TextAugmentMethod method) {
  return method == TextAugmentMethod::kCharAug ? 0.15 : 0.3;
}

bool AllowsTokenConsistency(TextAugmentMethod method) {
  return method == TextAugmentMethod::kCharAug ||
         method == TextAugmentMethod::kSpeechAug;
}

TextAugmentConfig TextAugmentConfig::Defaults(TextAugmentMethod method) {
  TextAugmentConfig config;
  config.method = method;
  config.p = DefaultProbability(method);
  return config;
}

void TextAugmentConfig::Validate() const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError("text augmentation probability must lie in [0, 1]");
  }
  if (method == TextAugmentMethod::kSpeechAug && !homophone_lexicon) {
    throw ConfigError("speech_aug requires a homophone lexicon");
  }
  if (method == TextAugmentMethod::kSubWord && !synonym_lexicon) {
    throw ConfigError("sub_word requires a synonym lexicon");
  }
  if (method == TextAugmentMethod::kInsertWord && !sampler) {
    throw ConfigError("insert_word requires a unigram sampler");
  }
}

AlignedSentence ApplyTextAugment(const TextAugmentConfig& config,
                                 const Sentence& s, Rng& rng) {
  switch (config.method) {
    case TextAugmentMethod::kCharAug:
      return CharAug(s, config.p, rng);
    case TextAugmentMethod::kDeleteWord:
      return DeleteWord(s, config.p, rng);
    case TextAugmentMethod::kInsertWord:
      if (!config.sampler) throw ConfigError("insert_word requires a unigram sampler");
      return InsertWord(s, config.p, rng, *config.sampler);
    case TextAugmentMethod::kSpeechAug:
      if (!config.homophone_lexicon) throw ConfigError("speech_aug requires a homophone lexicon");
      return SpeechAug(s, config.p, rng, *config.homophone_lexicon);
    case TextAugmentMethod::kSubWord:
      if (!config.synonym_lexicon) throw ConfigError("sub_word requires a synonym lexicon");
      return SubWord(s, config.p, rng, *config.synonym_lexicon);
  }
  throw ConfigError("unknown text augmentation");
}

}  // namespace robustsf
