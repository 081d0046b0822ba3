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

#include <sstream>

#include "robustsf/tagger.h"

namespace robustsf {

namespace {

constexpr std::string_view kMagic = "robustsf-model 1";

void WriteTensor(std::string& out, std::string_view name, const Matrix& m) {
  out += "tensor " + std::string(name) + " " + std::to_string(m.rows()) + " " +
         std::to_string(m.cols()) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += FormatDouble(m(i, j));
    }
    out += '\n';
  }
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::string_view Next() {
    if (pos_ >= text_.size()) throw DataError("checkpoint truncated at line " + std::to_string(line_ + 1));
    auto nl = text_.find('\n', pos_);
    std::string_view line = text_.substr(pos_, nl == text_.npos ? text_.npos : nl - pos_);
    pos_ = nl == text_.npos ? text_.size() : nl + 1;
    ++line_;
    return line;
  }

  std::vector<std::string> Fields(std::string_view expected_head, std::size_t count) {
    auto fields = Split(Next(), ' ');
    if (fields.size() != count || fields[0] != expected_head) {
      throw DataError("checkpoint line " + std::to_string(line_) + ": expected '" +
                      std::string(expected_head) + "' record");
    }
    return fields;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

int ParseInt(const std::string& s) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw DataError("");
    return v;
  } catch (const std::exception&) {
    throw DataError("checkpoint: expected an integer, got '" + s + "'");
  }
}

Matrix ReadTensor(LineReader& in, std::string_view name) {
  auto head = in.Fields("tensor", 4);
  if (head[1] != name) {
    throw DataError("checkpoint: expected tensor '" + std::string(name) + "', found '" + head[1] + "'");
  }
  int rows = ParseInt(head[2]);
  int cols = ParseInt(head[3]);
  if (rows < 0 || cols < 0) throw DataError("checkpoint: negative tensor shape");
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    auto values = Split(in.Next(), ' ');
    if (static_cast<int>(values.size()) != cols) {
      throw DataError("checkpoint: tensor '" + std::string(name) + "' row has wrong width");
    }
    for (int j = 0; j < cols; ++j) m(i, j) = ParseDouble(values[j]);
  }
  return m;
}

std::vector<std::string> ReadList(LineReader& in, std::string_view head) {
  auto fields = in.Fields(head, 2);
  int n = ParseInt(fields[1]);
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.emplace_back(in.Next());
  return out;
}

}  // namespace

std::string SerializeModel(const Model& model) {
  const auto& h = model.hyper();
  const auto& p = model.params();
  std::string out(kMagic);
  out += "\nhyper " + std::to_string(h.word_dim) + " " + std::to_string(h.char_dim) +
         " " + std::to_string(h.hidden) + " " + FormatDouble(h.dropout) + " " +
         std::to_string(h.seed) + " " + std::string(ToString(h.objective)) + "\n";
  out += "min_count " + std::to_string(model.vocab().min_count()) + "\n";
  auto list = [&](std::string_view head, const std::vector<std::string>& items) {
    out += std::string(head) + " " + std::to_string(items.size()) + "\n";
    for (const auto& item : items) out += item + "\n";
  };
  list("labels", model.scheme().tags());
  list("words", model.vocab().words());
  list("chars", model.vocab().chars());
  WriteTensor(out, "word_emb", p.word_emb);
  WriteTensor(out, "char_emb", p.char_emb);
  WriteTensor(out, "fwd.w_x", p.fwd.w_x);
  WriteTensor(out, "fwd.w_h", p.fwd.w_h);
  WriteTensor(out, "fwd.b", p.fwd.b);
  WriteTensor(out, "bwd.w_x", p.bwd.w_x);
  WriteTensor(out, "bwd.w_h", p.bwd.w_h);
  WriteTensor(out, "bwd.b", p.bwd.b);
  WriteTensor(out, "proj_w", p.proj_w);
  WriteTensor(out, "proj_b", p.proj_b);
  WriteTensor(out, "trans", p.trans);
  out += "end\n";
  return out;
}

Model DeserializeModel(std::string_view text) {
  LineReader in(text);
  if (in.Next() != kMagic) throw DataError("not a robustsf model checkpoint");
  auto hyper_fields = in.Fields("hyper", 7);
  HyperConfig hyper;
  hyper.word_dim = ParseInt(hyper_fields[1]);
  hyper.char_dim = ParseInt(hyper_fields[2]);
  hyper.hidden = ParseInt(hyper_fields[3]);
  hyper.dropout = ParseDouble(hyper_fields[4]);
  try {
    hyper.seed = std::stoull(hyper_fields[5]);
  } catch (const std::exception&) {
    throw DataError("checkpoint: bad seed");
  }
  try {
    hyper.objective = ParseObjective(hyper_fields[6]);
  } catch (const ConfigError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  int min_count = ParseInt(in.Fields("min_count", 2)[1]);

  auto tags = ReadList(in, "labels");
  std::set<std::string> types;
  for (const auto& tag : tags) {
    auto parts = ParseTag(tag);
    if (!parts) throw DataError("checkpoint: bad label '" + tag + "'");
    if (parts->prefix != 'O') types.emplace(parts->type);
  }
  LabelScheme scheme(types);
  if (scheme.tags() != tags) throw DataError("checkpoint: label list is not canonical");
  auto words = ReadList(in, "words");
  auto chars = ReadList(in, "chars");
  Vocabulary vocab = Vocabulary::FromLists(std::move(words), std::move(chars), min_count);

  ModelParams p;
  p.word_emb = ReadTensor(in, "word_emb");
  p.char_emb = ReadTensor(in, "char_emb");
  p.fwd.w_x = ReadTensor(in, "fwd.w_x");
  p.fwd.w_h = ReadTensor(in, "fwd.w_h");
  p.fwd.b = ReadTensor(in, "fwd.b");
  p.bwd.w_x = ReadTensor(in, "bwd.w_x");
  p.bwd.w_h = ReadTensor(in, "bwd.w_h");
  p.bwd.b = ReadTensor(in, "bwd.b");
  p.proj_w = ReadTensor(in, "proj_w");
  p.proj_b = ReadTensor(in, "proj_b");
  p.trans = ReadTensor(in, "trans");
  if (in.Next() != "end") throw DataError("checkpoint: missing end marker");

  const int h = hyper.hidden;
  const int d = hyper.input_dim();
  const int k = scheme.size();
  auto expect = [](const Matrix& m, Eigen::Index r, Eigen::Index c, const char* name) {
    if (m.rows() != r || m.cols() != c) {
      throw DataError(std::string("checkpoint: tensor '") + name + "' has the wrong shape");
    }
  };
  expect(p.fwd.w_x, 4 * h, d, "fwd.w_x");
  expect(p.fwd.w_h, 4 * h, h, "fwd.w_h");
  expect(p.fwd.b, 4 * h, 1, "fwd.b");
  expect(p.bwd.w_x, 4 * h, d, "bwd.w_x");
  expect(p.bwd.w_h, 4 * h, h, "bwd.w_h");
  expect(p.bwd.b, 4 * h, 1, "bwd.b");
  expect(p.proj_w, 2 * h, k, "proj_w");
  expect(p.proj_b, k, 1, "proj_b");
  expect(p.trans, k + 2, k + 2, "trans");
  return Model(hyper, std::move(scheme), std::move(vocab), std::move(p));
}

void SaveModel(const Model& model, const std::string& path) {
  WriteFileAtomic(path, SerializeModel(model));
}

Model LoadModel(const std::string& path) { return DeserializeModel(ReadFile(path)); }

int LoadPretrainedEmbeddings(Model& model, std::string_view text) {
  int replaced = 0;
  std::size_t line_no = 0;
  auto& emb = model.mutable_params().word_emb;
  for (const auto& line : Split(text, '\n')) {
    ++line_no;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (static_cast<Eigen::Index>(fields.size()) - 1 != emb.cols()) {
      throw DataError("embedding line " + std::to_string(line_no) + ": expected " +
                      std::to_string(emb.cols()) + " values");
    }
    if (!model.vocab().HasWord(fields[0])) continue;
    int row = model.vocab().WordIndex(fields[0]);
    for (Eigen::Index j = 0; j < emb.cols(); ++j) {
      emb(row, j) = ParseDouble(fields[static_cast<std::size_t>(j) + 1]);
    }
    ++replaced;
  }
  return replaced;
}

}  // namespace robustsf
