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

#ifndef ROBUSTSF_TEXT_AUGMENT_H_
#define ROBUSTSF_TEXT_AUGMENT_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robustsf/common.h"
#include "robustsf/corpus.h"

namespace robustsf {

// Marks a token with no originating clean token.
inline constexpr int kInserted = -1;

// An augmented sentence plus, per augmented token, the index of the clean
// token it came from (or kInserted). Origins are strictly increasing over
// non-inserted tokens.
struct AlignedSentence {
  Sentence sentence;
  std::vector<int> alignment;

  static AlignedSentence Identity(const Sentence& s);
  bool operator==(const AlignedSentence&) const = default;
};

// Composes two alignment steps: `second` maps into the tokens described by
// `first`, which maps into the clean sentence.
std::vector<int> ComposeAlignment(const std::vector<int>& first,
                                  const std::vector<int>& second);

// Word -> single-token alternatives. No alternative equals its key.
class Lexicon {
 public:
  // Ignores self-mappings and duplicates; rejects multi-token entries.
  void Add(const std::string& word, const std::string& alternative);
  void Merge(const Lexicon& other);
  const std::vector<std::string>* Find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::vector<std::string>, std::less<>>& entries()
      const {
    return entries_;
  }

  // "word<TAB>alt1<TAB>alt2..." per line.
  static Lexicon Parse(std::string_view text);
  static Lexicon Load(const std::string& path);
  std::string Serialize() const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

// Four-character American Soundex code ("robert" -> "R163"). Non-letters are
// skipped; an input without letters yields "".
std::string Soundex(std::string_view word);

Lexicon BuiltinHomophones();
// Groups vocabulary words sharing a Soundex code, maps each word to the other
// members of its group, and merges the built-in homophone pairs that apply.
Lexicon BuildHomophoneLexicon(const Vocabulary& vocab);
// Synonym table covering the built-in synthetic grammar. Alternatives are
// chosen outside the grammar's own word list.
Lexicon BuiltinSynonyms();

enum class CharOp { kAdd, kDelete, kReplace };

// Applies one edit at code point index `pos` (for kAdd, pos may equal the
// token length to append). `ch` is the inserted or replacement character.
std::string ApplyCharOp(std::string_view token, CharOp op, std::size_t pos,
                        std::string_view ch = {});
// Random single edit: op uniform over {add, delete, replace}, position
// uniform, inserted letters uniform over a-z, replacement letters uniform
// over a-z minus the current character. Deleting from a one-character token
// becomes a replace, so the output always differs from the input.
std::string RandomCharEdit(std::string_view token, Rng& rng);

using TokenFilter = std::function<bool(const Sentence&, std::size_t)>;

AlignedSentence CharAug(const Sentence& s, double p, Rng& rng);
// CharAug restricted to tokens accepted by `eligible`.
AlignedSentence CharAugIf(const Sentence& s, double p, Rng& rng,
                          const TokenFilter& eligible);

// Deletes each token with probability p, keeping the last token when every
// token was drawn. An I-t left without its chunk predecessor becomes B-t.
AlignedSentence DeleteWord(const Sentence& s, double p, Rng& rng);
AlignedSentence DeleteWordIf(const Sentence& s, double p, Rng& rng,
                             const TokenFilter& eligible);

// Unigram distribution over corpus tokens.
class UnigramSampler {
 public:
  explicit UnigramSampler(const Dataset& corpus);
  const std::string& Sample(Rng& rng) const;
  std::size_t vocabulary_size() const { return words_.size(); }

 private:
  std::vector<std::string> words_;
  std::vector<double> cumulative_;
};

// Gap g (0..L) sits before token g. A gap is a candidate when each existing
// neighbour is tagged O.
std::vector<std::size_t> InsertionGaps(const Sentence& s);
AlignedSentence InsertWord(const Sentence& s, double p, Rng& rng,
                           const UnigramSampler& sampler);

// Replaces each token that has a lexicon entry, with probability p, by a
// uniformly chosen alternative.
AlignedSentence SpeechAug(const Sentence& s, double p, Rng& rng,
                          const Lexicon& homophones);
AlignedSentence SubWord(const Sentence& s, double p, Rng& rng,
                        const Lexicon& synonyms);

enum class TextAugmentMethod { kCharAug, kDeleteWord, kInsertWord, kSpeechAug, kSubWord };

std::string_view ToString(TextAugmentMethod method);
std::optional<TextAugmentMethod> ParseTextAugmentMethod(std::string_view name);
double DefaultProbability(TextAugmentMethod method);
// Methods whose outputs align token-for-token with the input for the purpose
// of logits/representation consistency.
bool AllowsTokenConsistency(TextAugmentMethod method);

struct TextAugmentConfig {
  TextAugmentMethod method = TextAugmentMethod::kCharAug;
  double p = 0.15;
  std::uint64_t seed = 1;
  std::shared_ptr<const Lexicon> homophone_lexicon;
  std::shared_ptr<const Lexicon> synonym_lexicon;
  std::shared_ptr<const UnigramSampler> sampler;

  static TextAugmentConfig Defaults(TextAugmentMethod method);
  void Validate() const;  // throws ConfigError
};

AlignedSentence ApplyTextAugment(const TextAugmentConfig& config,
                                 const Sentence& s, Rng& rng);

}  // namespace robustsf

#endif  // ROBUSTSF_TEXT_AUGMENT_H_
