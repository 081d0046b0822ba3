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

#include <algorithm>
#include <cctype>
#include <map>

#include "robustsf/text_augment.h"

namespace robustsf {

void Lexicon::Add(const std::string& word, const std::string& alternative) {
  if (word.empty() || alternative.empty()) {
    throw DataError("lexicon entries must be non-empty");
  }
  if (SplitWhitespace(word).size() != 1 || SplitWhitespace(alternative).size() != 1) {
    throw DataError("lexicon entries must be single tokens: '" + word + "' -> '" +
                    alternative + "'");
  }
  if (word == alternative) return;
  auto& alts = entries_[word];
  if (std::find(alts.begin(), alts.end(), alternative) == alts.end()) {
    alts.push_back(alternative);
  }
}

void Lexicon::Merge(const Lexicon& other) {
  for (const auto& [word, alts] : other.entries_) {
    for (const auto& alt : alts) Add(word, alt);
  }
}

const std::vector<std::string>* Lexicon::Find(std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon Lexicon::Parse(std::string_view text) {
  Lexicon lex;
  std::size_t line_no = 0;
  for (auto& raw : Split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = Split(line, '\t');
    if (fields.size() < 2) {
      throw DataError("lexicon line " + std::to_string(line_no) +
                      ": expected word<TAB>alternative");
    }
    try {
      for (std::size_t i = 1; i < fields.size(); ++i) lex.Add(fields[0], fields[i]);
    } catch (const DataError& e) {
      throw DataError("lexicon line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lex;
}

Lexicon Lexicon::Load(const std::string& path) { return Parse(ReadFile(path)); }

std::string Lexicon::Serialize() const {
  std::string out;
  for (const auto& [word, alts] : entries_) {
    out += word;
    for (const auto& alt : alts) {
      out += '\t';
      out += alt;
    }
    out += '\n';
  }
  return out;
}

std::string Soundex(std::string_view word) {
  auto code_of = [](char c) -> char {
    switch (c) {
      case 'b': case 'f': case 'p': case 'v':
        return '1';
      case 'c': case 'g': case 'j': case 'k': case 'q': case 's': case 'x': case 'z':
        return '2';
      case 'd': case 't':
        return '3';
      case 'l':
        return '4';
      case 'm': case 'n':
        return '5';
      case 'r':
        return '6';
      case 'h': case 'w':
        return 'h';  // transparent: does not separate equal codes
      default:
        return '0';  // vowels and y separate equal codes
    }
  };
  std::string letters;
  for (char c : word) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc) && uc < 0x80) letters += static_cast<char>(std::tolower(uc));
  }
  if (letters.empty()) return "";
  std::string out(1, static_cast<char>(std::toupper(letters[0])));
  char last = code_of(letters[0]);
  for (std::size_t i = 1; i < letters.size() && out.size() < 4; ++i) {
    char code = code_of(letters[i]);
    if (code == 'h') continue;
    if (code != '0' && code != last) out += code;
    last = code;
  }
  out.resize(4, '0');
  return out;
}

namespace {

const std::vector<std::vector<std::string>>& HomophoneGroups() {
  static const std::vector<std::vector<std::string>> groups = {
      {"for", "four", "fore"}, {"to", "two", "too"}, {"there", "their"},
      {"one", "won"},          {"eight", "ate"},     {"right", "write"},
      {"see", "sea"},          {"by", "buy", "bye"}, {"know", "no"},
      {"hear", "here"},        {"new", "knew"},      {"our", "hour"},
      {"week", "weak"},        {"meet", "meat"},     {"sun", "son"},
      {"be", "bee"},           {"way", "weigh"},     {"fare", "fair"},
      {"road", "rode"},        {"plane", "plain"},   {"wood", "would"},
      {"pair", "pear"},        {"peace", "piece"},   {"wait", "weight"},
      {"cheap", "cheep"},      {"thai", "tie"},      {"i", "eye"},
      {"centre", "center"},    {"seen", "scene"},    {"great", "grate"},
      {"some", "sum"},         {"where", "wear"},    {"in", "inn"},
      {"not", "knot"},         {"mail", "male"},     {"sale", "sail"},
  };
  return groups;
}

}  // namespace

Lexicon BuiltinHomophones() {
  Lexicon lex;
  for (const auto& group : HomophoneGroups()) {
    for (const auto& a : group) {
      for (const auto& b : group) lex.Add(a, b);
    }
  }
  return lex;
}

Lexicon BuildHomophoneLexicon(const Vocabulary& vocab) {
  if (vocab.word_count() <= 2) throw DataError("homophone lexicon needs a non-empty vocabulary");
  std::map<std::string, std::vector<std::string>> groups;
  for (int i = 2; i < vocab.word_count(); ++i) {
    const auto& word = vocab.words()[i];
    if (SplitWhitespace(word).size() != 1) continue;
    auto key = Soundex(word);
    if (!key.empty()) groups[key].push_back(word);
  }
  Lexicon lex;
  for (const auto& [key, members] : groups) {
    if (members.size() < 2) continue;
    for (const auto& a : members) {
      for (const auto& b : members) lex.Add(a, b);
    }
  }
  Lexicon builtin = BuiltinHomophones();
  for (const auto& [word, alts] : builtin.entries()) {
    if (!vocab.HasWord(word)) continue;
    for (const auto& alt : alts) lex.Add(word, alt);
  }
  return lex;
}

Lexicon BuiltinSynonyms() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> table = {
      {"cheap", {"affordable", "budget", "economical"}},
      {"expensive", {"pricey", "costly", "luxurious"}},
      {"moderate", {"reasonable", "average"}},
      {"moderately", {"reasonably", "fairly"}},
      {"priced", {"costed"}},
      {"north", {"northern"}},
      {"south", {"southern"}},
      {"east", {"eastern"}},
      {"west", {"western"}},
      {"centre", {"center", "downtown"}},
      {"riverside", {"waterfront"}},
      {"old", {"historic", "ancient"}},
      {"vegetarian", {"veggie", "meatless"}},
      {"seafood", {"shellfish"}},
      {"museum", {"exhibition"}},
      {"park", {"garden"}},
      {"theatre", {"theater", "playhouse"}},
      {"college", {"university"}},
      {"cinema", {"movies", "pictures"}},
      {"hotel", {"motel"}},
      {"guesthouse", {"lodge"}},
      {"nightclub", {"club", "disco"}},
      {"boat", {"ship", "vessel"}},
      {"looking", {"searching", "hunting"}},
      {"want", {"desire", "wish"}},
      {"find", {"locate", "discover"}},
      {"book", {"schedule", "arrange"}},
      {"restaurant", {"eatery", "diner"}},
      {"food", {"cuisine", "dishes"}},
      {"place", {"spot", "venue"}},
      {"please", {"kindly"}},
      {"table", {"booth"}},
      {"people", {"persons", "guests"}},
      {"visit", {"tour"}},
      {"recommend", {"suggest"}},
      {"ticket", {"pass"}},
      {"room", {"suite"}},
      {"fine", {"okay", "alright"}},
      {"need", {"require"}},
      {"eat", {"dine"}},
      {"like", {"fancy"}},
  };
  Lexicon lex;
  for (const auto& [word, alts] : table) {
    for (const auto& alt : alts) lex.Add(word, alt);
  }
  return lex;
}

}  // namespace robustsf
