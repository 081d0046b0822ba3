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
#include <cmath>
#include <set>
#include <string>

#include "robustsf/noise_eval.h"

namespace robustsf {

namespace {

std::string Percent(const std::optional<double>& fraction) {
  return fraction ? FormatFixed1(100.0 * *fraction) : std::string();
}

std::string Cell(const std::optional<double>& value) {
  return value ? FormatFixed1(*value) : std::string();
}

// Difference of two one-decimal values computed in integer tenths, so
// 95.8 - 64.3 is exactly 31.5.
double TenthsDifference(double a, double b) {
  return (std::round(a * 10.0) - std::round(b * 10.0)) / 10.0;
}

// "+0.2", "-31.5".
std::string Signed(double value) {
  std::string text = FormatFixed1(value);
  return text.front() == '-' ? text : "+" + text;
}

std::optional<double> Mean(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

SpanScores SpanF1(const std::vector<std::vector<std::string>>& predicted,
                  const std::vector<std::vector<std::string>>& gold) {
  if (predicted.size() != gold.size()) {
    throw DataError("prediction count " + std::to_string(predicted.size()) +
                    " does not match gold count " + std::to_string(gold.size()));
  }
  SpanScores scores;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predicted[i].size() != gold[i].size()) {
      throw DataError("sentence " + std::to_string(i) + ": prediction length does not match gold");
    }
    auto p = ExtractSpans(predicted[i]);
    auto g = ExtractSpans(gold[i]);
    std::set<Span> gold_set(g.begin(), g.end());
    for (const auto& span : p) scores.correct += gold_set.count(span);
    scores.predicted += static_cast<std::int64_t>(p.size());
    scores.gold += static_cast<std::int64_t>(g.size());
  }
  auto ratio = [](std::int64_t num, std::int64_t den, std::int64_t other) {
    if (den == 0) return other == 0 ? 1.0 : 0.0;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  scores.precision = ratio(scores.correct, scores.predicted, scores.gold);
  scores.recall = ratio(scores.correct, scores.gold, scores.predicted);
  const double sum = scores.precision + scores.recall;
  scores.f1 = sum > 0.0 ? 2.0 * scores.precision * scores.recall / sum : 0.0;
  return scores;
}

SpanScores SpanF1(const std::vector<std::vector<std::string>>& predicted, const Dataset& gold) {
  std::vector<std::vector<std::string>> tags;
  tags.reserve(gold.sentences.size());
  for (const auto& s : gold.sentences) tags.push_back(s.tags);
  return SpanF1(predicted, tags);
}

double DeltaF1(double f1_clean, double f1_noise) { return f1_clean - f1_noise; }

std::optional<double> Rho(double f1_method_noise, double f1_baseline_noise,
                          double delta_f1_baseline) {
  if (delta_f1_baseline == 0.0) return std::nullopt;
  return (f1_method_noise - f1_baseline_noise) / delta_f1_baseline;
}

std::optional<double> RhoFromDeltas(double delta_f1_method, double delta_f1_baseline) {
  if (delta_f1_baseline == 0.0) return std::nullopt;
  return (delta_f1_method - delta_f1_baseline) / delta_f1_baseline;
}

double RoundToTenth(double value) { return std::round(value * 10.0) / 10.0; }

std::vector<F1Record> ParseF1Records(std::string_view csv) {
  auto lines = Split(csv, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != "method,suite,f1") {
    throw DataError("F1 record file must start with the header 'method,suite,f1'");
  }
  std::vector<F1Record> records;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    auto fields = Split(lines[n], ',');
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw DataError("F1 record line " + std::to_string(n + 1) + ": expected method,suite,f1");
    }
    double f1 = 0.0;
    try {
      f1 = ParseDouble(fields[2]);
    } catch (const std::exception&) {
      throw DataError("F1 record line " + std::to_string(n + 1) + ": bad F1 value");
    }
    if (!(f1 >= 0.0 && f1 <= 100.0)) {
      throw DataError("F1 record line " + std::to_string(n + 1) + ": F1 must lie in [0, 100]");
    }
    records.push_back({fields[0], fields[1], f1});
  }
  return records;
}

std::string WriteF1Records(const std::vector<F1Record>& records) {
  std::string out = "method,suite,f1\n";
  for (const auto& r : records) out += r.method + "," + r.suite + "," + FormatDouble(r.f1) + "\n";
  return out;
}

std::vector<MethodReport> BuildReports(const std::vector<F1Record>& records,
                                       const std::optional<std::string>& baseline,
                                       const std::map<std::string, DamageRates>& damage) {
  std::vector<std::string> methods;
  std::vector<std::string> suites;
  std::map<std::pair<std::string, std::string>, double> f1;
  for (const auto& r : records) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    if (r.suite != kCleanSuite && std::find(suites.begin(), suites.end(), r.suite) == suites.end()) {
      suites.push_back(r.suite);
    }
    if (!f1.emplace(std::pair(r.method, r.suite), RoundToTenth(r.f1)).second) {
      throw DataError("duplicate F1 record for " + r.method + "/" + r.suite);
    }
  }
  auto lookup = [&](const std::string& method, std::string_view suite) -> std::optional<double> {
    auto it = f1.find({method, std::string(suite)});
    if (it == f1.end()) return std::nullopt;
    return it->second;
  };
  for (const auto& method : methods) {
    if (!lookup(method, kCleanSuite)) throw DataError("method '" + method + "' has no clean F1");
  }
  if (baseline && std::find(methods.begin(), methods.end(), *baseline) == methods.end()) {
    throw ConfigError("baseline method '" + *baseline + "' has no results");
  }

  std::vector<MethodReport> reports;
  for (const auto& method : methods) {
    MethodReport report{method, {}};
    const double clean = *lookup(method, kCleanSuite);
    std::vector<double> noise_values, r_values, rho_values, rho_delta_values;
    for (const auto& suite : suites) {
      auto noise = lookup(method, suite);
      if (!noise) continue;
      MetricsReport row;
      row.suite = suite;
      row.f1_clean = clean;
      row.f1_noise = *noise;
      row.delta_f1 = TenthsDifference(clean, *noise);
      if (baseline) {
        auto base_clean = lookup(*baseline, kCleanSuite);
        auto base_noise = lookup(*baseline, suite);
        if (base_noise) {
          const double base_delta = TenthsDifference(*base_clean, *base_noise);
          row.r = TenthsDifference(*noise, *base_noise);
          row.rho = Rho(*noise, *base_noise, base_delta);
          row.rho_from_deltas = RhoFromDeltas(row.delta_f1, base_delta);
        }
      }
      if (auto it = damage.find(suite); it != damage.end()) {
        row.d_cs = it->second.d_cs;
        row.d_sem = it->second.d_sem;
      }
      noise_values.push_back(row.f1_noise);
      if (row.r) r_values.push_back(*row.r);
      if (row.rho) rho_values.push_back(*row.rho);
      if (row.rho_from_deltas) rho_delta_values.push_back(*row.rho_from_deltas);
      report.rows.push_back(std::move(row));
    }
    if (!noise_values.empty()) {
      MetricsReport overall;
      overall.suite = std::string(kOverallSuite);
      overall.f1_clean = clean;
      overall.f1_noise = *Mean(noise_values);
      overall.delta_f1 = clean - overall.f1_noise;
      overall.r = Mean(r_values);
      overall.rho = Mean(rho_values);
      overall.rho_from_deltas = Mean(rho_delta_values);
      report.rows.push_back(std::move(overall));
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

std::string MetricsCsv(const MethodReport& report) {
  std::string out = "suite,f1_clean,f1_noise,delta_f1,r,rho,d_cs,d_sem\n";
  for (const auto& row : report.rows) {
    out += row.suite + "," + FormatFixed1(row.f1_clean) + "," + FormatFixed1(row.f1_noise) + "," +
           FormatFixed1(row.delta_f1) + "," + Cell(row.r) + "," + Percent(row.rho) + "," +
           Percent(row.d_cs) + "," + Percent(row.d_sem) + "\n";
  }
  return out;
}

std::string SummaryCsv(const std::vector<MethodReport>& reports) {
  std::string out = "method,suite,f1_clean,f1_noise,delta_f1,r,rho,d_cs,d_sem,rho_from_deltas\n";
  for (const auto& report : reports) {
    for (const auto& row : report.rows) {
      out += report.method + "," + row.suite + "," + FormatFixed1(row.f1_clean) + "," +
             FormatFixed1(row.f1_noise) + "," + FormatFixed1(row.delta_f1) + "," + Cell(row.r) + "," +
             Percent(row.rho) + "," + Percent(row.d_cs) + "," + Percent(row.d_sem) + "," +
             Percent(row.rho_from_deltas) + "\n";
    }
  }
  return out;
}

std::string MarkdownTable(const std::vector<MethodReport>& reports,
                          const std::optional<std::string>& baseline) {
  std::vector<std::string> columns;
  for (const auto& report : reports) {
    for (const auto& row : report.rows) {
      if (std::find(columns.begin(), columns.end(), row.suite) == columns.end()) columns.push_back(row.suite);
    }
  }
  // Overall last.
  if (auto it = std::find(columns.begin(), columns.end(), kOverallSuite); it != columns.end()) {
    columns.erase(it);
    columns.emplace_back(kOverallSuite);
  }
  std::optional<double> baseline_clean;
  for (const auto& report : reports) {
    if (baseline && report.method == *baseline && !report.rows.empty()) {
      baseline_clean = report.rows.front().f1_clean;
    }
  }

  std::string out = "| Method | Clean |";
  for (const auto& c : columns) out += " " + c + " |";
  out += "\n|---|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) out += "---|";
  out += "\n";
  for (const auto& report : reports) {
    const bool is_baseline = !baseline || report.method == *baseline;
    out += "| " + report.method + " | ";
    if (!report.rows.empty()) {
      const double clean = report.rows.front().f1_clean;
      out += FormatFixed1(clean);
      if (!is_baseline && baseline_clean) {
        const double diff = TenthsDifference(clean, *baseline_clean);
        out += " (" + Signed(diff) + ")";
      }
    }
    out += " |";
    for (const auto& c : columns) {
      auto it = std::find_if(report.rows.begin(), report.rows.end(),
                             [&](const MetricsReport& r) { return r.suite == c; });
      out += " ";
      if (it != report.rows.end()) {
        out += FormatFixed1(it->f1_noise);
        if (is_baseline || !it->rho) {
          out += " (" + Signed(-it->delta_f1) + ")";
        } else {
          out += " (" + Percent(it->rho) + "%)";
        }
      }
      out += " |";
    }
    out += "\n";
  }
  return out;
}

std::string DamageCsv(const std::vector<std::pair<std::string, DamageRates>>& rows) {
  std::string out = "suite,d_cs,d_sem\n";
  for (const auto& [suite, rates] : rows) {
    out += suite + "," + Percent(rates.d_cs) + "," + Percent(rates.d_sem) + "\n";
  }
  return out;
}

}  // namespace robustsf
