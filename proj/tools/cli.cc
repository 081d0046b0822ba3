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

#include "cli.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "robustsf/common.h"
#include "robustsf/consistency.h"
#include "robustsf/corpus.h"
#include "robustsf/feature_augment.h"
#include "robustsf/noise_eval.h"
#include "robustsf/tagger.h"
#include "robustsf/text_augment.h"

namespace robustsf::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Files of one command, written only after every one of them was produced.
class OutputSet {
 public:
  void Add(fs::path path, std::string contents) {
    files_.emplace_back(std::move(path), std::move(contents));
  }

  void Commit() const {
    for (const auto& [path, contents] : files_) {
      if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw DataError("cannot create directory '" + path.parent_path().string() + "'");
      }
    }
    for (const auto& [path, contents] : files_) WriteFileAtomic(path.string(), contents);
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

fs::path OutputDir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
  throw UsageError(std::string("--out is required (or set ") + kOutputEnv + ")");
}

std::string ReadInput(const std::string& path, std::istream& in) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return ReadFile(path);
}

Dataset LoadConll(const std::string& path, SplitKind split, std::istream& in, std::ostream& err) {
  auto parsed = ParseConll(ReadInput(path, in), fs::path(path).stem().string(), split);
  for (const auto& warning : parsed.warnings) err << "robustsf: warning: " << path << ": " << warning << "\n";
  return std::move(parsed.dataset);
}

// "name=value" pairs.
std::pair<std::string, std::string> SplitAssignment(const std::string& text, std::string_view what) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw UsageError(std::string(what) + " must look like NAME=VALUE, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

void CheckName(const std::string& name, std::string_view what) {
  const bool ok = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '+';
  });
  if (!ok || name == kCleanSuite || name == kOverallSuite) {
    throw ConfigError(std::string(what) + " name '" + name + "' is reserved or has characters outside [A-Za-z0-9_.+-]");
  }
}

std::shared_ptr<const Lexicon> LoadLexicon(const std::string& path) {
  if (path.empty()) return nullptr;
  return std::make_shared<Lexicon>(Lexicon::Load(path));
}

// Noisy suites listed in `dir`: the suites.tsv manifest when present,
// otherwise every *.conll file in name order.
std::vector<std::pair<std::string, fs::path>> SuitesInDir(const fs::path& dir) {
  std::vector<std::pair<std::string, fs::path>> suites;
  if (fs::exists(dir / "suites.tsv")) {
    for (const auto& line : Split(ReadFile((dir / "suites.tsv").string()), '\n')) {
      if (line.empty()) continue;
      auto fields = Split(line, '\t');
      suites.emplace_back(fields[0], dir / (fields[0] + ".conll"));
    }
    return suites;
  }
  if (!fs::is_directory(dir)) throw DataError("'" + dir.string() + "' is not a directory");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".conll") suites.emplace_back(entry.path().stem().string(), entry.path());
  }
  std::sort(suites.begin(), suites.end());
  return suites;
}

std::vector<std::pair<std::string, fs::path>> CollectSuites(const std::string& noisy_dir,
                                                            const std::vector<std::string>& assigned) {
  std::vector<std::pair<std::string, fs::path>> suites;
  if (!noisy_dir.empty()) suites = SuitesInDir(noisy_dir);
  for (const auto& s : assigned) {
    auto [name, path] = SplitAssignment(s, "--suite");
    suites.emplace_back(name, path);
  }
  std::set<std::string> seen;
  for (const auto& [name, path] : suites) {
    CheckName(name, "suite");
    if (!seen.insert(name).second) throw ConfigError("suite '" + name + "' given twice");
  }
  if (suites.empty()) throw UsageError("no noisy suites given (use --noisy-dir or --suite)");
  return suites;
}

// Pairs a noisy suite with the clean set, using the .align sidecar when it
// exists and LCS alignment otherwise (unless disabled).
std::vector<NoisePair> LoadPairs(const Dataset& clean, const Dataset& noisy, const fs::path& conll,
                                 bool allow_lcs) {
  fs::path align = conll;
  align.replace_extension(".align");
  if (fs::exists(align)) {
    auto alignments = ParseAlignment(ReadFile(align.string()));
    return PairNoisySet(clean, noisy, &alignments);
  }
  if (!allow_lcs) throw DataError("missing alignment file '" + align.string() + "'");
  return PairNoisySet(clean, noisy, nullptr);
}

std::map<std::string, DamageRates> ParseDamageCsv(const std::string& text) {
  auto lines = Split(text, '\n');
  if (lines.empty() || lines[0] != "suite,d_cs,d_sem") throw DataError("damage file must start with 'suite,d_cs,d_sem'");
  std::map<std::string, DamageRates> out;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    auto fields = Split(lines[n], ',');
    if (fields.size() != 3) throw DataError("damage line " + std::to_string(n + 1) + ": expected 3 fields");
    auto value = [&](const std::string& f) -> std::optional<double> {
      if (f.empty()) return std::nullopt;
      return ParseDouble(f) / 100.0;
    };
    out[fields[0]] = {value(fields[1]), value(fields[2])};
  }
  return out;
}

void AddReports(OutputSet& files, const fs::path& dir, const std::vector<MethodReport>& reports,
                const std::optional<std::string>& baseline, std::ostream& out) {
  for (const auto& report : reports) {
    files.Add(dir / ("metrics_" + report.method + ".csv"), MetricsCsv(report));
  }
  files.Add(dir / "summary.csv", SummaryCsv(reports));
  std::string markdown = MarkdownTable(reports, baseline);
  files.Add(dir / "report.md", markdown);
  out << markdown;
}

// ---------------------------------------------------------------------------

struct GenCorpusArgs {
  std::uint64_t seed = 1;
  int n_train = 2000;
  int n_dev = 300;
  int n_test = 300;
  std::string out;
  std::string grammar;
};

void GenCorpus(const GenCorpusArgs& a, std::ostream& out) {
  if (a.n_train < 1 || a.n_dev < 1 || a.n_test < 1) throw ConfigError("split sizes must be at least 1");
  const fs::path dir = OutputDir(a.out);
  Grammar grammar = a.grammar.empty() ? Grammar::Builtin() : Grammar::Parse(ReadFile(a.grammar));
  auto splits = GenerateSyntheticCorpus(a.seed, a.n_train, a.n_dev, a.n_test, grammar);
  OutputSet files;
  files.Add(dir / "train.conll", WriteConll(splits.train));
  files.Add(dir / "dev.conll", WriteConll(splits.dev));
  files.Add(dir / "test.conll", WriteConll(splits.test));
  files.Add(dir / "synonyms.tsv", BuiltinSynonyms().Serialize());
  files.Add(dir / "homophones.tsv", BuildHomophoneLexicon(BuildVocab(splits.train, 1)).Serialize());
  files.Commit();
  out << "wrote " << a.n_train << "/" << a.n_dev << "/" << a.n_test << " sentences to " << dir.string() << "\n";
}

struct AugmentArgs {
  std::string method;
  std::optional<double> p;
  std::uint64_t seed = 1;
  std::string input = "-";
  std::string output;
  std::string alignment;
  std::string homophones;
  std::string synonyms;
  std::string corpus;
};

void Augment(const AugmentArgs& a, std::ostream& out, std::ostream& err, std::istream& in) {
  auto method = ParseTextAugmentMethod(a.method);
  if (!method) throw ConfigError("unknown text augmentation '" + a.method + "'");
  Dataset data = LoadConll(a.input, SplitKind::kTrain, in, err);
  if (data.sentences.empty()) throw DataError("input has no sentences");
  TextAugmentConfig config = TextAugmentConfig::Defaults(*method);
  if (a.p) config.p = *a.p;
  config.seed = a.seed;
  config.synonym_lexicon = a.synonyms.empty() ? std::make_shared<Lexicon>(BuiltinSynonyms()) : LoadLexicon(a.synonyms);
  config.homophone_lexicon = a.homophones.empty()
                                 ? std::make_shared<Lexicon>(BuildHomophoneLexicon(BuildVocab(data, 1)))
                                 : LoadLexicon(a.homophones);
  config.sampler = std::make_shared<UnigramSampler>(
      a.corpus.empty() ? data : LoadConll(a.corpus, SplitKind::kTrain, in, err));
  config.Validate();

  Rng rng(config.seed);
  std::vector<Sentence> sentences;
  std::vector<NoisePair> pairs;
  for (std::size_t i = 0; i < data.sentences.size(); ++i) {
    auto aligned = ApplyTextAugment(config, data.sentences[i], rng);
    sentences.push_back(aligned.sentence);
    pairs.push_back({static_cast<int>(i), std::move(aligned.sentence), std::move(aligned.alignment)});
  }
  std::string conll = WriteConll(sentences);
  OutputSet files;
  if (!a.output.empty()) files.Add(a.output, conll);
  if (!a.alignment.empty()) files.Add(a.alignment, WriteAlignment(pairs));
  files.Commit();
  if (a.output.empty()) out << conll;
}

struct NoisifyArgs {
  std::string test;
  std::vector<std::string> suites;
  std::uint64_t seed = 1;
  std::string homophones;
  std::string synonyms;
  std::string out;
};

const std::vector<std::string>& DefaultSuites() {
  static const std::vector<std::string> suites = {
      "typos@0.3",      "keyboard@0.3",   "spelling_error@0.3",
      "homophone@0.3",  "synonym_swap@0.3", "append_irr",
      "concat_sent",    "simplify@0.3",   "typos@0.3+synonym_swap@0.3+append_irr",
  };
  return suites;
}

std::string DefaultSuiteName(const NoiseSpec& spec) {
  if (spec.kind != NoiseKind::kMixed) return std::string(ToString(spec.kind));
  std::vector<std::string> names;
  for (const auto& part : spec.parts) names.emplace_back(ToString(part.kind));
  return Join(names, "+");
}

void Noisify(const NoisifyArgs& a, std::ostream& out, std::ostream& err, std::istream& in) {
  const fs::path dir = OutputDir(a.out);
  Dataset clean = LoadConll(a.test, SplitKind::kTest, in, err);
  NoiseResources resources{LoadLexicon(a.homophones), LoadLexicon(a.synonyms)};
  const auto& requested = a.suites.empty() ? DefaultSuites() : a.suites;
  std::vector<std::pair<std::string, NoiseSpec>> suites;
  std::set<std::string> names;
  for (const auto& text : requested) {
    std::string name;
    std::string spec_text = text;
    if (auto eq = text.find('='); eq != std::string::npos) {
      name = text.substr(0, eq);
      spec_text = text.substr(eq + 1);
    }
    NoiseSpec spec = NoiseSpec::Parse(spec_text, a.seed);
    if (name.empty()) name = DefaultSuiteName(spec);
    CheckName(name, "suite");
    if (!names.insert(name).second) throw ConfigError("suite '" + name + "' given twice");
    suites.emplace_back(name, spec);
  }
  OutputSet files;
  std::string manifest;
  for (const auto& [name, spec] : suites) {
    auto pairs = ApplyNoise(clean, spec, resources);
    files.Add(dir / (name + ".conll"), WriteConll(NoisyDataset(pairs)));
    files.Add(dir / (name + ".align"), WriteAlignment(pairs));
    manifest += name + "\t" + spec.ToString() + "\n";
  }
  files.Add(dir / "suites.tsv", manifest);
  files.Commit();
  out << "wrote " << suites.size() << " noisy suites to " << dir.string() << "\n";
}

struct TrainArgs {
  std::string train;
  std::string dev;
  std::string out;
  std::string embeddings;
  std::string homophones;
  std::string synonyms;
  HyperConfig hyper;
  std::string objective = "crf";
  int min_count = 1;
  int epochs = 12;
  double alpha = 1.0;
  std::string loss_type = "none";
  std::string text_aug;
  std::optional<double> text_p;
  std::string feature_aug;
  double feature_rate = 0.3;
  double epsilon = 1.0;
  std::string optimizer = "adam";
  double lr = 1e-3;
  double momentum = 0.0;
  double weight_decay = 0.0;
  bool no_shuffle = false;
  bool verbose = false;
};

void TrainCommand(const TrainArgs& a, std::ostream& out, std::ostream& err, std::istream& in) {
  const fs::path dir = OutputDir(a.out);
  HyperConfig hyper = a.hyper;
  hyper.objective = ParseObjective(a.objective);
  hyper.Validate();

  TrainConfig config;
  config.epochs = a.epochs;
  config.alpha = a.alpha;
  config.loss_type = ParseConsistencyLoss(a.loss_type);
  config.seed = hyper.seed;
  config.shuffle = !a.no_shuffle;
  config.optimizer.kind = ParseOptimizerKind(a.optimizer);
  config.optimizer.learning_rate = a.lr;
  config.optimizer.momentum = a.momentum;
  config.optimizer.weight_decay = a.weight_decay;
  if (!a.text_aug.empty()) {
    auto method = ParseTextAugmentMethod(a.text_aug);
    if (!method) throw ConfigError("unknown text augmentation '" + a.text_aug + "'");
    config.text_augment = TextAugmentConfig::Defaults(*method);
    if (a.text_p) config.text_augment->p = *a.text_p;
    config.text_augment->seed = hyper.seed;
  }
  if (!a.feature_aug.empty()) {
    auto method = ParseFeatureAugmentMethod(a.feature_aug);
    if (!method) throw ConfigError("unknown feature augmentation '" + a.feature_aug + "'");
    config.feature_augment = FeatureAugmentConfig::Defaults(*method);
    config.feature_augment->rate = a.feature_rate;
    config.feature_augment->epsilon = a.epsilon;
    config.feature_augment->seed = hyper.seed;
  }
  Dataset train = LoadConll(a.train, SplitKind::kTrain, in, err);
  Dataset dev = LoadConll(a.dev, SplitKind::kDev, in, err);
  if (train.sentences.empty()) throw DataError("training file has no sentences");
  Vocabulary vocab = BuildVocab(train, a.min_count);
  if (config.text_augment) {
    config.text_augment->homophone_lexicon =
        a.homophones.empty() ? std::make_shared<Lexicon>(BuildHomophoneLexicon(vocab)) : LoadLexicon(a.homophones);
    config.text_augment->synonym_lexicon =
        a.synonyms.empty() ? std::make_shared<Lexicon>(BuiltinSynonyms()) : LoadLexicon(a.synonyms);
  }
  if (config.text_augment && config.text_augment->method == TextAugmentMethod::kInsertWord) {
    config.text_augment->sampler = std::make_shared<UnigramSampler>(train);
  }
  config.Validate();

  const Dataset* sets[] = {&train, &dev};
  Model model = Model::Create(hyper, SchemeFromDatasets(sets), vocab);
  if (!a.embeddings.empty()) {
    int replaced = LoadPretrainedEmbeddings(model, ReadFile(a.embeddings));
    if (a.verbose) out << "loaded " << replaced << " pretrained word vectors\n";
  }
  auto result = Train(config, std::move(model), train, dev, [&](const EpochRecord& r) {
    if (a.verbose) {
      out << "epoch " << r.epoch << " l_normal " << FormatDouble(r.l_normal) << " l_consis "
          << FormatDouble(r.l_consis) << " dev_f1 " << FormatFixed1(100.0 * r.dev_f1) << "\n";
    }
  });
  OutputSet files;
  files.Add(dir / "model.txt", SerializeModel(result.model));
  files.Add(dir / "train_log.csv", result.log.ToCsv());
  files.Commit();
  const auto& best = result.log.epochs[static_cast<std::size_t>(result.log.best_epoch - 1)];
  out << "best epoch " << result.log.best_epoch << " dev F1 " << FormatFixed1(100.0 * best.dev_f1)
      << "; wrote " << (dir / "model.txt").string() << "\n";
}

struct EvalArgs {
  std::vector<std::string> models;
  std::string test;
  std::string noisy_dir;
  std::vector<std::string> suites;
  std::string baseline;
  std::string out;
};

void Eval(const EvalArgs& a, std::ostream& out, std::ostream& err, std::istream& in) {
  const fs::path dir = OutputDir(a.out);
  std::vector<std::pair<std::string, std::string>> models;
  std::set<std::string> names;
  for (const auto& m : a.models) {
    auto [name, path] = SplitAssignment(m, "--model");
    CheckName(name, "method");
    if (!names.insert(name).second) throw ConfigError("method '" + name + "' given twice");
    models.emplace_back(name, path);
  }
  std::optional<std::string> baseline;
  if (!a.baseline.empty()) {
    if (!names.count(a.baseline)) throw ConfigError("baseline method '" + a.baseline + "' is not among --model");
    baseline = a.baseline;
  }
  Dataset clean = LoadConll(a.test, SplitKind::kTest, in, err);
  std::vector<std::pair<std::string, Dataset>> suites;
  std::map<std::string, DamageRates> damage;
  for (const auto& [name, path] : CollectSuites(a.noisy_dir, a.suites)) {
    Dataset noisy = LoadConll(path.string(), SplitKind::kTest, in, err);
    damage[name] = ComputeDamageRates(clean, LoadPairs(clean, noisy, path, true));
    suites.emplace_back(name, std::move(noisy));
  }

  std::vector<F1Record> records;
  for (const auto& [name, path] : models) {
    Model model = LoadModel(path);
    records.push_back({name, std::string(kCleanSuite), 100.0 * EvaluateF1(model, clean)});
    for (const auto& [suite, data] : suites) {
      records.push_back({name, suite, 100.0 * EvaluateF1(model, data)});
    }
  }
  OutputSet files;
  files.Add(dir / "f1.csv", WriteF1Records(records));
  AddReports(files, dir, BuildReports(records, baseline, damage), baseline, out);
  files.Commit();
}

struct DamageArgs {
  std::string clean;
  std::string noisy_dir;
  std::vector<std::string> suites;
  bool no_lcs = false;
  std::string out;
};

void DamageStats(const DamageArgs& a, std::ostream& out, std::ostream& err, std::istream& in) {
  const fs::path dir = OutputDir(a.out);
  Dataset clean = LoadConll(a.clean, SplitKind::kTest, in, err);
  std::vector<std::pair<std::string, DamageRates>> rows;
  for (const auto& [name, path] : CollectSuites(a.noisy_dir, a.suites)) {
    Dataset noisy = LoadConll(path.string(), SplitKind::kTest, in, err);
    rows.emplace_back(name, ComputeDamageRates(clean, LoadPairs(clean, noisy, path, !a.no_lcs)));
  }
  std::string csv = DamageCsv(rows);
  OutputSet files;
  files.Add(dir / "damage.csv", csv);
  files.Commit();
  out << csv;
}

struct ReportArgs {
  std::string f1;
  std::string baseline;
  std::string damage;
  std::string out;
};

void Report(const ReportArgs& a, std::ostream& out, std::istream& in) {
  const fs::path dir = OutputDir(a.out);
  auto records = ParseF1Records(ReadInput(a.f1, in));
  std::map<std::string, DamageRates> damage;
  if (!a.damage.empty()) damage = ParseDamageCsv(ReadFile(a.damage));
  std::optional<std::string> baseline;
  if (!a.baseline.empty()) baseline = a.baseline;
  auto reports = BuildReports(records, baseline, damage);
  for (const auto& r : reports) CheckName(r.method, "method");
  OutputSet files;
  AddReports(files, dir, reports, baseline, out);
  files.Commit();
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  CLI::App app{"Noise-robust slot filling: corpora, augmentation, training and robustness reports", "robustsf"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file of option values, one [section] per command; flags win");

  GenCorpusArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-corpus", "Write a synthetic train/dev/test corpus and its lexicons");
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--train", gen.n_train, "Training sentences")->capture_default_str();
  gen_cmd->add_option("--dev", gen.n_dev, "Development sentences")->capture_default_str();
  gen_cmd->add_option("--test", gen.n_test, "Test sentences")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output directory");
  gen_cmd->add_option("--grammar", gen.grammar, "Grammar file replacing the built-in one")->check(CLI::ExistingFile);

  AugmentArgs aug;
  auto* aug_cmd = app.add_subcommand("augment", "Preview a text-level augmentation on a CoNLL file");
  aug_cmd->add_option("--method", aug.method, "char_aug, delete_word, insert_word, speech_aug or sub_word")->required();
  aug_cmd->add_option("--p", aug.p, "Transform probability (0.15 for char_aug, 0.3 otherwise)");
  aug_cmd->add_option("--seed", aug.seed, "Random seed")->capture_default_str();
  aug_cmd->add_option("--input", aug.input, "CoNLL input, - for stdin")->capture_default_str();
  aug_cmd->add_option("--output", aug.output, "CoNLL output file (default stdout)");
  aug_cmd->add_option("--alignment", aug.alignment, "Alignment sidecar output file");
  aug_cmd->add_option("--homophones", aug.homophones, "Homophone lexicon (default: built from the input)");
  aug_cmd->add_option("--synonyms", aug.synonyms, "Synonym lexicon (default: built-in)");
  aug_cmd->add_option("--corpus", aug.corpus, "Corpus for insert_word sampling (default: the input)");

  NoisifyArgs noise;
  auto* noise_cmd = app.add_subcommand("noisify", "Build noisy test suites with alignment sidecars");
  noise_cmd->add_option("--test", noise.test, "Clean CoNLL test file")->required();
  noise_cmd->add_option("--suite", noise.suites, "[NAME=]KIND[@P][+KIND[@P]...], repeatable");
  noise_cmd->add_option("--seed", noise.seed, "Random seed")->capture_default_str();
  noise_cmd->add_option("--homophones", noise.homophones, "Homophone lexicon")->check(CLI::ExistingFile);
  noise_cmd->add_option("--synonyms", noise.synonyms, "Synonym lexicon")->check(CLI::ExistingFile);
  noise_cmd->add_option("--out", noise.out, "Output directory");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a tagger, optionally with consistency training");
  train_cmd->add_option("--train", tr.train, "Training CoNLL file")->required();
  train_cmd->add_option("--dev", tr.dev, "Development CoNLL file")->required();
  train_cmd->add_option("--out", tr.out, "Output directory for model.txt and train_log.csv");
  train_cmd->add_option("--word-dim", tr.hyper.word_dim, "Word embedding size")->capture_default_str();
  train_cmd->add_option("--char-dim", tr.hyper.char_dim, "Character embedding size")->capture_default_str();
  train_cmd->add_option("--hidden", tr.hyper.hidden, "LSTM hidden size per direction")->capture_default_str();
  train_cmd->add_option("--dropout", tr.hyper.dropout, "Embedding dropout rate")->capture_default_str();
  train_cmd->add_option("--seed", tr.hyper.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--objective", tr.objective, "crf or token_xent")->capture_default_str();
  train_cmd->add_option("--min-count", tr.min_count, "Minimum word frequency for the vocabulary")->capture_default_str();
  train_cmd->add_option("--epochs", tr.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--alpha", tr.alpha, "Consistency loss weight")->capture_default_str();
  train_cmd->add_option("--loss-type", tr.loss_type, "none, aug, logits or repre")->capture_default_str();
  train_cmd->add_option("--text-aug", tr.text_aug, "Text-level augmentation method");
  train_cmd->add_option("--text-p", tr.text_p, "Text augmentation probability");
  train_cmd->add_option("--feature-aug", tr.feature_aug, "adv, token_cut, feature_cut or dropout");
  train_cmd->add_option("--feature-rate", tr.feature_rate, "Cut/drop rate")->capture_default_str();
  train_cmd->add_option("--epsilon", tr.epsilon, "Adversarial step size")->capture_default_str();
  train_cmd->add_option("--optimizer", tr.optimizer, "adam or sgd")->capture_default_str();
  train_cmd->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  train_cmd->add_option("--momentum", tr.momentum, "SGD momentum")->capture_default_str();
  train_cmd->add_option("--weight-decay", tr.weight_decay, "L2 weight decay")->capture_default_str();
  train_cmd->add_flag("--no-shuffle", tr.no_shuffle, "Keep the file order in every epoch");
  train_cmd->add_option("--homophones", tr.homophones, "Homophone lexicon for speech_aug")->check(CLI::ExistingFile);
  train_cmd->add_option("--synonyms", tr.synonyms, "Synonym lexicon for sub_word")->check(CLI::ExistingFile);
  train_cmd->add_option("--embeddings", tr.embeddings, "Pretrained word vectors, 'word v1 ... vd' per line")
      ->check(CLI::ExistingFile);
  train_cmd->add_flag("--verbose", tr.verbose, "Print one line per epoch");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score trained models on clean and noisy test sets");
  eval_cmd->add_option("--model", ev.models, "NAME=CHECKPOINT, repeatable")->required();
  eval_cmd->add_option("--test", ev.test, "Clean CoNLL test file")->required();
  eval_cmd->add_option("--noisy-dir", ev.noisy_dir, "Directory written by noisify");
  eval_cmd->add_option("--suite", ev.suites, "NAME=NOISY_CONLL, repeatable");
  eval_cmd->add_option("--baseline", ev.baseline, "Method used for R and rho");
  eval_cmd->add_option("--out", ev.out, "Output directory");

  DamageArgs dmg;
  auto* dmg_cmd = app.add_subcommand("damage-stats", "Context and slot damage rates of noisy suites");
  dmg_cmd->add_option("--clean", dmg.clean, "Clean CoNLL file")->required();
  dmg_cmd->add_option("--noisy-dir", dmg.noisy_dir, "Directory written by noisify");
  dmg_cmd->add_option("--suite", dmg.suites, "NAME=NOISY_CONLL, repeatable");
  dmg_cmd->add_flag("--no-lcs", dmg.no_lcs, "Require alignment sidecars instead of aligning by LCS");
  dmg_cmd->add_option("--out", dmg.out, "Output directory");

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Robustness tables from recorded F1 scores");
  rep_cmd->add_option("--f1", rep.f1, "CSV with header method,suite,f1 (- for stdin)")->required();
  rep_cmd->add_option("--baseline", rep.baseline, "Method used for R and rho");
  rep_cmd->add_option("--damage", rep.damage, "CSV with header suite,d_cs,d_sem")->check(CLI::ExistingFile);
  rep_cmd->add_option("--out", rep.out, "Output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "robustsf: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*gen_cmd) GenCorpus(gen, out);
    if (*aug_cmd) Augment(aug, out, err, in);
    if (*noise_cmd) Noisify(noise, out, err, in);
    if (*train_cmd) TrainCommand(tr, out, err, in);
    if (*eval_cmd) Eval(ev, out, err, in);
    if (*dmg_cmd) DamageStats(dmg, out, err, in);
    if (*rep_cmd) Report(rep, out, in);
  } catch (const UsageError& e) {
    err << "robustsf: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "robustsf: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "robustsf: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "robustsf: error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace robustsf::cli
