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

#ifndef ROBUSTSF_CORPUS_H_
#define ROBUSTSF_CORPUS_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace robustsf {

// A tokenized utterance with one BIO tag per token.
struct Sentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

// Parsed view of a tag string: prefix is 'O', 'B' or 'I'.
struct TagParts {
  char prefix = 'O';
  std::string_view type;
};

// Returns nullopt unless the tag is "O", "B-<type>" or "I-<type>" with a
// non-empty type.
std::optional<TagParts> ParseTag(std::string_view tag);
bool IsValidTag(std::string_view tag);
inline bool IsOutside(std::string_view tag) { return tag == "O"; }

// Throws DataError when the sentence is empty, lengths disagree, a token is
// empty or a tag is not of BIO shape.
void ValidateSentence(const Sentence& sentence);

// Tag inventory: "O" at index 0 followed by B-t, I-t for each slot type in
// lexicographic order.
class LabelScheme {
 public:
  LabelScheme() : LabelScheme(std::set<std::string>{}) {}
  explicit LabelScheme(const std::set<std::string>& slot_types);

  int size() const { return static_cast<int>(tags_.size()); }
  const std::set<std::string>& slot_types() const { return slot_types_; }
  const std::vector<std::string>& tags() const { return tags_; }
  const std::string& Tag(int index) const { return tags_.at(index); }
  // -1 when the tag is not part of the scheme.
  int IndexOf(std::string_view tag) const;
  bool Contains(std::string_view tag) const { return IndexOf(tag) >= 0; }

  // Tag indices for a sentence; throws DataError on tags outside the scheme.
  std::vector<int> Encode(const std::vector<std::string>& tags) const;
  std::vector<std::string> Decode(std::span<const int> indices) const;

  bool operator==(const LabelScheme& other) const {
    return tags_ == other.tags_;
  }

 private:
  std::set<std::string> slot_types_;
  std::vector<std::string> tags_;
  std::unordered_map<std::string, int> index_;
};

enum class SplitKind { kTrain, kDev, kTest };

struct Dataset {
  std::string name;
  SplitKind split = SplitKind::kTrain;
  std::vector<Sentence> sentences;

  std::size_t size() const { return sentences.size(); }
  bool operator==(const Dataset&) const = default;
};

// Smallest scheme covering every tag in the datasets.
LabelScheme SchemeFromDatasets(std::span<const Dataset* const> datasets);
LabelScheme SchemeFromDataset(const Dataset& dataset);

struct ConllParseResult {
  Dataset dataset;
  // Line-numbered notes about I- tags that do not continue a chunk.
  std::vector<std::string> warnings;
};

// Parses "token<TAB>tag" lines with blank lines between sentences. Throws
// DataError with a line number on malformed input.
ConllParseResult ParseConll(std::string_view text, std::string name = "",
                            SplitKind split = SplitKind::kTrain);
std::string WriteConll(std::span<const Sentence> sentences);
inline std::string WriteConll(const Dataset& dataset) {
  return WriteConll(dataset.sentences);
}

// Chunk [start, end) of one slot type.
struct Span {
  int start = 0;
  int end = 0;
  std::string slot_type;

  auto operator<=>(const Span&) const = default;
};

// Maximal chunks in conlleval style: an I-t that does not continue a chunk of
// type t opens a new chunk. Output is sorted by start and non-overlapping.
std::vector<Span> ExtractSpans(std::span<const std::string> tags);
// Canonical BIO encoding of spans over a sentence of `length` tokens.
std::vector<std::string> SpansToBio(std::span<const Span> spans,
                                    std::size_t length);

inline constexpr int kPadIndex = 0;
inline constexpr int kUnkIndex = 1;

// Word and character indices with PAD=0 and UNK=1 reserved.
class Vocabulary {
 public:
  Vocabulary();

  int min_count() const { return min_count_; }
  int word_count() const { return static_cast<int>(words_.size()); }
  int char_count() const { return static_cast<int>(chars_.size()); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::string>& chars() const { return chars_; }

  int WordIndex(std::string_view word) const;  // UNK when unknown
  int CharIndex(std::string_view ch) const;    // UNK when unknown
  bool HasWord(std::string_view word) const;
  std::vector<int> CharIndices(std::string_view token) const;

  // Rebuilds a vocabulary from index-ordered lists (entries 0 and 1 must be
  // the reserved PAD and UNK placeholders).
  static Vocabulary FromLists(std::vector<std::string> words,
                              std::vector<std::string> chars, int min_count);

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && chars_ == other.chars_ &&
           min_count_ == other.min_count_;
  }

 private:
  int min_count_ = 1;
  std::vector<std::string> words_;
  std::vector<std::string> chars_;
  std::unordered_map<std::string, int> word_index_;
  std::unordered_map<std::string, int> char_index_;
};

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";

// Indices are assigned by descending frequency, ties broken
// lexicographically. Words seen fewer than min_count times map to UNK;
// every character seen in the corpus gets an index.
Vocabulary BuildVocab(std::span<const Dataset* const> datasets, int min_count);
Vocabulary BuildVocab(const Dataset& dataset, int min_count);

// Template grammar for the synthetic corpus. Templates contain "{type}"
// placeholders; each slot type has a gazetteer of (possibly multi-word)
// values.
struct Grammar {
  std::vector<std::string> templates;
  std::map<std::string, std::vector<std::string>> gazetteer;

  static Grammar Builtin();
  // Text format, one entry per line:
  //   # comment
  //   @<type> value one | value two | ...
  //   any other non-blank line is a template
  static Grammar Parse(std::string_view text);
  void Validate() const;
};

struct CorpusSplits {
  Dataset train;
  Dataset dev;
  Dataset test;
};

// Deterministic given seed. Dev and test utterances avoid surface forms
// already emitted in earlier splits when the grammar permits.
CorpusSplits GenerateSyntheticCorpus(std::uint64_t seed, int n_train,
                                     int n_dev, int n_test,
                                     const Grammar& grammar = Grammar::Builtin());

}  // namespace robustsf

#endif  // ROBUSTSF_CORPUS_H_
