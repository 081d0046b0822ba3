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

#include <set>
#include <unordered_set>

#include "robustsf/common.h"
#include "robustsf/corpus.h"

namespace robustsf {

namespace {

constexpr const char* kBuiltinGrammar = R"(# Built-in task-oriented dialogue grammar.
@price cheap | expensive | moderate | moderately priced | low cost | high end | mid range
@area north | south | east | west | centre | city centre | riverside | old town | north east | south west
@food indian | italian | chinese | thai | french | british | mexican | japanese | korean | turkish | spanish | greek | vietnamese | lebanese | seafood | vegetarian | modern european | fish and chips
@stars 1 | 2 | 3 | 4 | 5 | one | two | three | four | five
@people 1 | 2 | 3 | 4 | 5 | 6 | 7 | 8 | one | two | three | four | five | six | seven | eight
@day monday | tuesday | wednesday | thursday | friday | saturday | sunday | today | tomorrow | this weekend
@type museum | park | theatre | college | cinema | gallery | guesthouse | hotel | nightclub | swimming pool | concert hall | boat
i am looking for a {price} restaurant in the {area}
is there a restaurant that serves {food} food in the {area} part of town
i want a {price} {food} restaurant
book a table for {people} people on {day}
find me a {stars} star hotel in the {area}
i need a {type} in the {area}
i am looking for a {type} to visit
what about {price} {stars} star lodging of any hotel type
we will be {people} people staying from {day}
i would like {food} food please
{food} please
something {price} in the {area} please
any {type} in the {area} would be fine
is there a {type} near the {area}
reserve a room for {people} people starting {day}
the {area} please
i prefer {price}
how about a {food} place
i would like to go on {day}
it should be in the {area} and {price}
yes a {stars} star one please
can we go ahead and get the {price} one please
i need a train for {people} people leaving on {day}
a {food} restaurant in the {area} with a {price} price range
show me {type} attractions in the {area}
any {food} restaurants that are {price}
i am looking for a place to stay in the {area} with {stars} stars
do you have anything {price} for {people} people
i want to book for {day} for {people} people
a {type} please
no preference on the area just {price}
please find a {type} in the {area} of town
i would like a table for {people} on {day} at a {food} place
yes i would like a ticket for {people}
could you recommend a {price} hotel with {stars} stars
i want {food}
book it for {day} please
what is there to do in the {area}
i need somewhere {price} to eat {food} food
are there any {stars} star guesthouses in the {area}
)";

struct TemplatePiece {
  bool is_slot = false;
  std::string text;  // word, or slot type name
};

std::vector<TemplatePiece> ParseTemplate(const std::string& line) {
  std::vector<TemplatePiece> pieces;
  for (auto& word : SplitWhitespace(line)) {
    if (word.size() > 2 && word.front() == '{' && word.back() == '}') {
      pieces.push_back({true, word.substr(1, word.size() - 2)});
    } else {
      pieces.push_back({false, word});
    }
  }
  return pieces;
}

}  // namespace

Grammar Grammar::Builtin() { return Parse(kBuiltinGrammar); }

Grammar Grammar::Parse(std::string_view text) {
  Grammar grammar;
  for (auto& raw : Split(text, '\n')) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto words = SplitWhitespace(line);
    if (words.empty() || words.front().front() == '#') continue;
    if (words.front().front() == '@') {
      std::string type = words.front().substr(1);
      if (type.empty()) throw DataError("grammar: gazetteer line without a type");
      std::string rest = line.substr(line.find(words.front()) + words.front().size());
      auto& values = grammar.gazetteer[type];
      for (auto& alt : Split(rest, '|')) {
        auto tokens = SplitWhitespace(alt);
        if (!tokens.empty()) values.push_back(Join(tokens, " "));
      }
      continue;
    }
    grammar.templates.push_back(Join(words, " "));
  }
  grammar.Validate();
  return grammar;
}

void Grammar::Validate() const {
  if (templates.empty()) throw DataError("grammar has no templates");
  for (const auto& [type, values] : gazetteer) {
    if (values.empty()) throw DataError("grammar: slot '" + type + "' has no values");
    if (type.find_first_of(" \t") != std::string::npos) {
      throw DataError("grammar: invalid slot type '" + type + "'");
    }
  }
  for (const auto& line : templates) {
    for (const auto& piece : ParseTemplate(line)) {
      if (piece.is_slot && !gazetteer.contains(piece.text)) {
        throw DataError("grammar: template uses unknown slot '{" + piece.text +
                        "}'");
      }
    }
  }
}

CorpusSplits GenerateSyntheticCorpus(std::uint64_t seed, int n_train,
                                     int n_dev, int n_test,
                                     const Grammar& grammar) {
  if (n_train < 1 || n_dev < 1 || n_test < 1) {
    throw ConfigError("corpus split sizes must be at least 1");
  }
  grammar.Validate();
  std::vector<std::vector<TemplatePiece>> templates;
  for (const auto& line : grammar.templates) templates.push_back(ParseTemplate(line));
  std::map<std::string, std::vector<std::vector<std::string>>> values;
  for (const auto& [type, alts] : grammar.gazetteer) {
    for (const auto& alt : alts) values[type].push_back(SplitWhitespace(alt));
  }

  Rng rng(seed);
  auto sample = [&]() {
    Sentence s;
    const auto& pieces = templates[rng.Index(templates.size())];
    for (const auto& piece : pieces) {
      if (!piece.is_slot) {
        s.tokens.push_back(piece.text);
        s.tags.push_back("O");
        continue;
      }
      const auto& options = values.at(piece.text);
      const auto& value = options[rng.Index(options.size())];
      for (std::size_t k = 0; k < value.size(); ++k) {
        s.tokens.push_back(value[k]);
        s.tags.push_back((k == 0 ? "B-" : "I-") + piece.text);
      }
    }
    return s;
  };

  constexpr int kMaxAttempts = 100;
  std::unordered_set<std::string> earlier_splits;
  auto fill = [&](Dataset& ds, int n, bool avoid_earlier) {
    std::vector<std::string> surfaces;
    for (int i = 0; i < n; ++i) {
      Sentence s = sample();
      for (int attempt = 1;
           avoid_earlier && attempt < kMaxAttempts &&
           earlier_splits.contains(Join(s.tokens, " "));
           ++attempt) {
        s = sample();
      }
      surfaces.push_back(Join(s.tokens, " "));
      ds.sentences.push_back(std::move(s));
    }
    earlier_splits.insert(surfaces.begin(), surfaces.end());
  };

  CorpusSplits splits;
  splits.train = Dataset{"synthetic", SplitKind::kTrain, {}};
  splits.dev = Dataset{"synthetic", SplitKind::kDev, {}};
  splits.test = Dataset{"synthetic", SplitKind::kTest, {}};
  fill(splits.train, n_train, false);
  fill(splits.dev, n_dev, true);
  fill(splits.test, n_test, true);
  return splits;
}

}  // namespace robustsf
