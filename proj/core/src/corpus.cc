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

#include "robustsf/corpus.h"

#include <algorithm>
#include <map>

#include "robustsf/common.h"

namespace robustsf {

std::optional<TagParts> ParseTag(std::string_view tag) {
  if (tag == "O") return TagParts{'O', {}};
  if (tag.size() < 3 || tag[1] != '-') return std::nullopt;
  if (tag[0] != 'B' && tag[0] != 'I') return std::nullopt;
  return TagParts{tag[0], tag.substr(2)};
}

bool IsValidTag(std::string_view tag) { return ParseTag(tag).has_value(); }

void ValidateSentence(const Sentence& sentence) {
  if (sentence.tokens.empty()) throw DataError("sentence has no tokens");
  if (sentence.tokens.size() != sentence.tags.size()) {
    throw DataError("sentence has " + std::to_string(sentence.tokens.size()) +
                    " tokens but " + std::to_string(sentence.tags.size()) +
                    " tags");
  }
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (sentence.tokens[i].empty()) {
      throw DataError("empty token at position " + std::to_string(i));
    }
    if (!IsValidTag(sentence.tags[i])) {
      throw DataError("unknown tag shape '" + sentence.tags[i] + "'");
    }
  }
}

LabelScheme::LabelScheme(const std::set<std::string>& slot_types)
    : slot_types_(slot_types) {
  tags_.push_back("O");
  for (const auto& type : slot_types_) {
    tags_.push_back("B-" + type);
    tags_.push_back("I-" + type);
  }
  for (int i = 0; i < static_cast<int>(tags_.size()); ++i) index_[tags_[i]] = i;
}

int LabelScheme::IndexOf(std::string_view tag) const {
  auto it = index_.find(std::string(tag));
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> LabelScheme::Encode(const std::vector<std::string>& tags) const {
  std::vector<int> out;
  out.reserve(tags.size());
  for (const auto& tag : tags) {
    int idx = IndexOf(tag);
    if (idx < 0) throw DataError("tag '" + tag + "' is not in the label scheme");
    out.push_back(idx);
  }
  return out;
}

std::vector<std::string> LabelScheme::Decode(std::span<const int> indices) const {
  std::vector<std::string> out;
  out.reserve(indices.size());
  for (int idx : indices) out.push_back(Tag(idx));
  return out;
}

LabelScheme SchemeFromDatasets(std::span<const Dataset* const> datasets) {
  std::set<std::string> types;
  for (const Dataset* ds : datasets) {
    for (const auto& s : ds->sentences) {
      for (const auto& tag : s.tags) {
        auto parts = ParseTag(tag);
        if (!parts) throw DataError("unknown tag shape '" + tag + "'");
        if (parts->prefix != 'O') types.emplace(parts->type);
      }
    }
  }
  return LabelScheme(types);
}

LabelScheme SchemeFromDataset(const Dataset& dataset) {
  const Dataset* one[] = {&dataset};
  return SchemeFromDatasets(one);
}

namespace {

std::string_view StripCr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

ConllParseResult ParseConll(std::string_view text, std::string name,
                            SplitKind split) {
  ConllParseResult result;
  result.dataset.name = std::move(name);
  result.dataset.split = split;

  Sentence current;
  std::size_t line_no = 0;
  // Line of a blank that delimits no tokens (leading or doubled separator).
  // Only an error if more content follows; trailing blank lines are fine.
  std::size_t empty_block_line = 0;

  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = StripCr(
        text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;

    if (line.empty()) {
      if (!current.tokens.empty()) {
        result.dataset.sentences.push_back(std::move(current));
        current = Sentence{};
      } else if (empty_block_line == 0) {
        empty_block_line = line_no;
      }
      continue;
    }
    if (empty_block_line != 0) {
      throw DataError("line " + std::to_string(empty_block_line) +
                      ": empty sentence block");
    }

    auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != line.npos) {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected exactly one tab separator");
    }
    std::string_view token = line.substr(0, tab);
    std::string_view tag = line.substr(tab + 1);
    if (token.empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty token");
    }
    auto parts = ParseTag(tag);
    if (!parts) {
      throw DataError("line " + std::to_string(line_no) +
                      ": unknown tag shape '" + std::string(tag) + "'");
    }
    if (parts->prefix == 'I') {
      bool continues = false;
      if (!current.tags.empty()) {
        auto prev = ParseTag(current.tags.back());
        continues = prev->prefix != 'O' && prev->type == parts->type;
      }
      if (!continues) {
        result.warnings.push_back("line " + std::to_string(line_no) + ": '" +
                                  std::string(tag) +
                                  "' does not continue a chunk of its type");
      }
    }
    current.tokens.emplace_back(token);
    current.tags.emplace_back(tag);
  }
  if (!current.tokens.empty()) result.dataset.sentences.push_back(std::move(current));
  return result;
}

std::string WriteConll(std::span<const Sentence> sentences) {
  std::string out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto& sentence = sentences[s];
    ValidateSentence(sentence);
    if (s) out += '\n';
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      out += sentence.tokens[i];
      out += '\t';
      out += sentence.tags[i];
      out += '\n';
    }
  }
  return out;
}

std::vector<Span> ExtractSpans(std::span<const std::string> tags) {
  std::vector<Span> spans;
  std::optional<Span> open;
  for (int i = 0; i < static_cast<int>(tags.size()); ++i) {
    auto parts = ParseTag(tags[i]);
    char prefix = parts ? parts->prefix : 'O';
    std::string_view type = parts ? parts->type : std::string_view{};
    bool continues = open && prefix == 'I' && open->slot_type == type;
    if (continues) {
      open->end = i + 1;
      continue;
    }
    if (open) {
      spans.push_back(*open);
      open.reset();
    }
    if (prefix != 'O') open = Span{i, i + 1, std::string(type)};
  }
  if (open) spans.push_back(*open);
  return spans;
}

std::vector<std::string> SpansToBio(std::span<const Span> spans,
                                    std::size_t length) {
  std::vector<std::string> tags(length, "O");
  for (const auto& span : spans) {
    if (span.start < 0 || span.end > static_cast<int>(length) ||
        span.start >= span.end) {
      throw DataError("span out of range");
    }
    tags[span.start] = "B-" + span.slot_type;
    for (int i = span.start + 1; i < span.end; ++i) {
      tags[i] = "I-" + span.slot_type;
    }
  }
  return tags;
}

Vocabulary::Vocabulary()
    : words_{std::string(kPadToken), std::string(kUnkToken)},
      chars_{std::string(kPadToken), std::string(kUnkToken)} {
  word_index_[words_[0]] = 0;
  word_index_[words_[1]] = 1;
  char_index_[chars_[0]] = 0;
  char_index_[chars_[1]] = 1;
}

int Vocabulary::WordIndex(std::string_view word) const {
  auto it = word_index_.find(std::string(word));
  return it == word_index_.end() || it->second == kPadIndex ? kUnkIndex
                                                            : it->second;
}

int Vocabulary::CharIndex(std::string_view ch) const {
  auto it = char_index_.find(std::string(ch));
  return it == char_index_.end() || it->second == kPadIndex ? kUnkIndex
                                                            : it->second;
}

bool Vocabulary::HasWord(std::string_view word) const {
  auto it = word_index_.find(std::string(word));
  return it != word_index_.end() && it->second > kUnkIndex;
}

std::vector<int> Vocabulary::CharIndices(std::string_view token) const {
  std::vector<int> out;
  for (const auto& ch : Utf8Chars(token)) out.push_back(CharIndex(ch));
  return out;
}

Vocabulary Vocabulary::FromLists(std::vector<std::string> words,
                                 std::vector<std::string> chars,
                                 int min_count) {
  if (words.size() < 2 || chars.size() < 2) {
    throw DataError("vocabulary lists must include PAD and UNK entries");
  }
  Vocabulary v;
  v.min_count_ = min_count;
  v.words_ = std::move(words);
  v.chars_ = std::move(chars);
  v.word_index_.clear();
  v.char_index_.clear();
  for (int i = 0; i < static_cast<int>(v.words_.size()); ++i) {
    if (!v.word_index_.emplace(v.words_[i], i).second) {
      throw DataError("duplicate vocabulary word '" + v.words_[i] + "'");
    }
  }
  for (int i = 0; i < static_cast<int>(v.chars_.size()); ++i) {
    if (!v.char_index_.emplace(v.chars_[i], i).second) {
      throw DataError("duplicate vocabulary character '" + v.chars_[i] + "'");
    }
  }
  return v;
}

namespace {

// Frequency-descending, then lexicographic.
std::vector<std::string> RankByCount(const std::map<std::string, int>& counts,
                                     int min_count) {
  std::vector<std::pair<std::string, int>> items;
  for (const auto& [key, count] : counts) {
    if (count >= min_count) items.emplace_back(key, count);
  }
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  std::vector<std::string> out;
  out.reserve(items.size());
  for (auto& item : items) out.push_back(std::move(item.first));
  return out;
}

}  // namespace

Vocabulary BuildVocab(std::span<const Dataset* const> datasets, int min_count) {
  if (min_count < 1) throw ConfigError("min_count must be at least 1");
  std::map<std::string, int> word_counts;
  std::map<std::string, int> char_counts;
  for (const Dataset* ds : datasets) {
    for (const auto& s : ds->sentences) {
      for (const auto& token : s.tokens) {
        ++word_counts[token];
        for (const auto& ch : Utf8Chars(token)) ++char_counts[ch];
      }
    }
  }
  if (word_counts.empty()) throw DataError("cannot build a vocabulary from an empty corpus");

  std::vector<std::string> words{std::string(kPadToken), std::string(kUnkToken)};
  std::vector<std::string> chars{std::string(kPadToken), std::string(kUnkToken)};
  for (auto& w : RankByCount(word_counts, min_count)) {
    if (w != kPadToken && w != kUnkToken) words.push_back(std::move(w));
  }
  for (auto& c : RankByCount(char_counts, 1)) {
    if (c != kPadToken && c != kUnkToken) chars.push_back(std::move(c));
  }
  return Vocabulary::FromLists(std::move(words), std::move(chars), min_count);
}

Vocabulary BuildVocab(const Dataset& dataset, int min_count) {
  const Dataset* one[] = {&dataset};
  return BuildVocab(one, min_count);
}

}  // namespace robustsf
