/*
 * Copyright 2026 The PIA Lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pia/report.h"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "binary_io.h"
#include "json.hpp"
#include "pia/error.h"

namespace pia {
namespace {

using Json = nlohmann::ordered_json;

MetricSummary Summarize(const std::vector<double>& values) {
  return {Median(values), PopulationStd(values)};
}

}  // namespace

ModeSummary AggregateGroup(std::span<const AttackResult> results) {
  if (results.empty()) throw UsageError("cannot aggregate zero results");
  const AttackResult& first = results.front();
  std::vector<double> acc, prec, rec;
  ModeSummary s;
  s.architecture = first.architecture;
  s.subset = first.subset;
  s.permuted_labels = first.permuted_labels;
  for (const AttackResult& r : results) {
    if (r.architecture != first.architecture || r.subset != first.subset ||
        r.permuted_labels != first.permuted_labels) {
      throw UsageError("results mix architectures or subset modes; group them "
                       "first");
    }
    acc.push_back(r.metrics.accuracy);
    prec.push_back(r.metrics.precision);
    rec.push_back(r.metrics.recall);
    s.precision_undefined += r.metrics.precision_undefined ? 1 : 0;
    s.recall_undefined += r.metrics.recall_undefined ? 1 : 0;
  }
  s.count = results.size();
  s.accuracy = Summarize(acc);
  s.precision = Summarize(prec);
  s.recall = Summarize(rec);
  return s;
}

std::vector<ModeSummary> Aggregate(std::span<const AttackResult> results) {
  if (results.empty()) throw UsageError("cannot aggregate zero results");
  std::vector<std::vector<AttackResult>> groups;
  for (const AttackResult& r : results) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
      return g[0].architecture == r.architecture && g[0].subset == r.subset &&
             g[0].permuted_labels == r.permuted_labels;
    });
    if (it == groups.end()) {
      groups.push_back({r});
    } else {
      it->push_back(r);
    }
  }
  std::vector<ModeSummary> out;
  for (const auto& g : groups) out.push_back(AggregateGroup(g));
  return out;
}

GateStats ComputeGateStats(const RecordSet& set) {
  GateStats g;
  g.shadows = set.records.size();
  if (g.shadows == 0) return g;
  g.min_accuracy = 1.0;
  double sum = 0.0;
  for (const ShadowRecord& r : set.records) {
    sum += r.accuracy;
    g.min_accuracy = std::min(g.min_accuracy, static_cast<double>(r.accuracy));
    g.total_retrains += r.retrain_count;
    g.max_retrains = std::max<std::size_t>(g.max_retrains, r.retrain_count);
    g.total_resamples += r.resample_count;
  }
  g.mean_accuracy = sum / static_cast<double>(g.shadows);
  return g;
}

const ModeSummary* ArchitectureBlock::Mode(WeightSubset subset) const {
  for (const ModeSummary& m : modes) {
    if (m.subset == subset) return &m;
  }
  return nullptr;
}

CorrelationBlock ComplexityCorrelation(
    std::span<const ArchitectureBlock> blocks, std::size_t permutations,
    std::uint64_t seed) {
  if (blocks.size() < 3) {
    throw UsageError("complexity correlation needs at least 3 architectures, "
                     "got " + std::to_string(blocks.size()));
  }
  CorrelationBlock c;
  std::vector<double> x, y;
  for (const ArchitectureBlock& b : blocks) {
    const ModeSummary* full = b.Mode(WeightSubset::kFull);
    if (full == nullptr) {
      throw UsageError("architecture " + b.architecture +
                       " has no full-mode results");
    }
    c.points.push_back({b.architecture, b.parameter_count,
                        full->accuracy.median});
    x.push_back(static_cast<double>(b.parameter_count));
    y.push_back(full->accuracy.median);
  }
  c.pearson = Pearson(x, y);
  c.spearman = Spearman(x, y);
  c.permutations = permutations;
  c.spearman_p_value = SpearmanPermutationPValue(x, y, permutations, seed);
  return c;
}

namespace {

Json MetricJson(const MetricSummary& m) {
  return Json{{"median", m.median}, {"std", m.std}};
}

MetricSummary MetricFrom(const Json& j) {
  return {j.at("median").get<double>(), j.at("std").get<double>()};
}

Json ModeJson(const ModeSummary& m) {
  Json j;
  j["architecture"] = m.architecture;
  j["subset"] = std::string(ToString(m.subset));
  j["permuted_labels"] = m.permuted_labels;
  j["count"] = m.count;
  j["accuracy"] = MetricJson(m.accuracy);
  j["precision"] = MetricJson(m.precision);
  j["recall"] = MetricJson(m.recall);
  j["precision_undefined"] = m.precision_undefined;
  j["recall_undefined"] = m.recall_undefined;
  return j;
}

ModeSummary ModeFrom(const Json& j) {
  ModeSummary m;
  m.architecture = j.at("architecture").get<std::string>();
  m.subset = ParseWeightSubset(j.at("subset").get<std::string>());
  m.permuted_labels = j.at("permuted_labels").get<bool>();
  m.count = j.at("count").get<std::size_t>();
  m.accuracy = MetricFrom(j.at("accuracy"));
  m.precision = MetricFrom(j.at("precision"));
  m.recall = MetricFrom(j.at("recall"));
  m.precision_undefined = j.at("precision_undefined").get<std::size_t>();
  m.recall_undefined = j.at("recall_undefined").get<std::size_t>();
  return m;
}

Json CorrelationJson(const Correlation& c) {
  return Json{{"coefficient", c.coefficient}, {"degenerate", c.degenerate}};
}

Correlation CorrelationFrom(const Json& j) {
  return {j.at("coefficient").get<double>(), j.at("degenerate").get<bool>()};
}

}  // namespace

std::string ReportToJson(const ExperimentReport& report) {
  Json j;
  j["schema"] = ExperimentReport::kSchema;
  j["preset"] = report.preset;
  j["master_seed"] = report.master_seed;
  j["version"] = report.version;
  j["provenance"] = Json::parse(report.provenance_json);
  Json blocks = Json::array();
  for (const ArchitectureBlock& b : report.architectures) {
    Json jb;
    jb["architecture"] = b.architecture;
    jb["parameter_count"] = b.parameter_count;
    Json modes = Json::array();
    for (const ModeSummary& m : b.modes) modes.push_back(ModeJson(m));
    jb["modes"] = modes;
    jb["chance"] = b.chance ? ModeJson(*b.chance) : Json(nullptr);
    jb["gate"] = {{"shadows", b.gate.shadows},
                  {"mean_accuracy", b.gate.mean_accuracy},
                  {"min_accuracy", b.gate.min_accuracy},
                  {"total_retrains", b.gate.total_retrains},
                  {"max_retrains", b.gate.max_retrains},
                  {"total_resamples", b.gate.total_resamples}};
    blocks.push_back(jb);
  }
  j["architectures"] = blocks;
  if (report.correlation) {
    const CorrelationBlock& c = *report.correlation;
    Json points = Json::array();
    for (const ComplexityPoint& p : c.points) {
      points.push_back({{"architecture", p.architecture},
                        {"parameter_count", p.parameter_count},
                        {"median_accuracy", p.median_accuracy}});
    }
    j["correlation"] = {{"points", points},
                        {"pearson", CorrelationJson(c.pearson)},
                        {"spearman", CorrelationJson(c.spearman)},
                        {"spearman_p_value", c.spearman_p_value},
                        {"permutations", c.permutations}};
  } else {
    j["correlation"] = nullptr;
  }
  return j.dump(2) + "\n";
}

ExperimentReport ReportFromJson(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    if (j.at("schema").get<int>() != ExperimentReport::kSchema) {
      throw DataError("unsupported report schema " + j.at("schema").dump());
    }
    ExperimentReport r;
    r.preset = j.at("preset").get<std::string>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.version = j.at("version").get<std::string>();
    r.provenance_json = j.at("provenance").dump();
    for (const Json& jb : j.at("architectures")) {
      ArchitectureBlock b;
      b.architecture = jb.at("architecture").get<std::string>();
      b.parameter_count = jb.at("parameter_count").get<std::size_t>();
      for (const Json& m : jb.at("modes")) b.modes.push_back(ModeFrom(m));
      if (!jb.at("chance").is_null()) b.chance = ModeFrom(jb.at("chance"));
      const Json& g = jb.at("gate");
      b.gate.shadows = g.at("shadows").get<std::size_t>();
      b.gate.mean_accuracy = g.at("mean_accuracy").get<double>();
      b.gate.min_accuracy = g.at("min_accuracy").get<double>();
      b.gate.total_retrains = g.at("total_retrains").get<std::size_t>();
      b.gate.max_retrains = g.at("max_retrains").get<std::size_t>();
      b.gate.total_resamples = g.at("total_resamples").get<std::size_t>();
      r.architectures.push_back(std::move(b));
    }
    if (!j.at("correlation").is_null()) {
      const Json& jc = j.at("correlation");
      CorrelationBlock c;
      for (const Json& p : jc.at("points")) {
        c.points.push_back({p.at("architecture").get<std::string>(),
                            p.at("parameter_count").get<std::size_t>(),
                            p.at("median_accuracy").get<double>()});
      }
      c.pearson = CorrelationFrom(jc.at("pearson"));
      c.spearman = CorrelationFrom(jc.at("spearman"));
      c.spearman_p_value = jc.at("spearman_p_value").get<double>();
      c.permutations = jc.at("permutations").get<std::size_t>();
      r.correlation = c;
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

namespace {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string Csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      os << (i ? "," : "") << columns[i];
    }
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << '\n';
    }
    return os.str();
  }

  std::string Dat() const {
    std::ostringstream os;
    os << "#";
    for (std::size_t i = 0; i < columns.size(); ++i) {
      os << ' ' << (i + 1) << ':' << columns[i];
    }
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << row[i];
      os << '\n';
    }
    return os.str();
  }
};

std::string Num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Table Fig2aTable(const ExperimentReport& report) {
  Table t{{"architecture", "parameter_count", "accuracy_median", "accuracy_std",
           "precision_median", "precision_std", "recall_median", "recall_std"},
          {}};
  for (const ArchitectureBlock& b : report.architectures) {
    const ModeSummary* m = b.Mode(WeightSubset::kFull);
    if (m == nullptr) continue;
    t.rows.push_back({b.architecture, std::to_string(b.parameter_count),
                      Num(m->accuracy.median), Num(m->accuracy.std),
                      Num(m->precision.median), Num(m->precision.std),
                      Num(m->recall.median), Num(m->recall.std)});
  }
  return t;
}

Table Fig2bTable(const ExperimentReport& report) {
  Table t{{"architecture", "mode", "accuracy_median", "accuracy_std"}, {}};
  for (const ArchitectureBlock& b : report.architectures) {
    for (const ModeSummary& m : b.modes) {
      t.rows.push_back({b.architecture, std::string(ToString(m.subset)),
                        Num(m.accuracy.median), Num(m.accuracy.std)});
    }
  }
  return t;
}

Table Fig4Table(const ExperimentReport& report) {
  Table t{{"architecture", "parameter_count", "accuracy_median"}, {}};
  for (const ArchitectureBlock& b : report.architectures) {
    const ModeSummary* m = b.Mode(WeightSubset::kFull);
    if (m == nullptr) continue;
    t.rows.push_back({b.architecture, std::to_string(b.parameter_count),
                      Num(m->accuracy.median)});
  }
  return t;
}

}  // namespace

std::string Fig2aCsv(const ExperimentReport& report) {
  return Fig2aTable(report).Csv();
}
std::string Fig2bCsv(const ExperimentReport& report) {
  return Fig2bTable(report).Csv();
}
std::string Fig4Csv(const ExperimentReport& report) {
  return Fig4Table(report).Csv();
}

void EmitReport(const ExperimentReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  internal::WriteTextFile((base / "report.json").string(), ReportToJson(report));
  const std::pair<const char*, Table> tables[] = {
      {"fig2a", Fig2aTable(report)},
      {"fig2b", Fig2bTable(report)},
      {"fig4", Fig4Table(report)}};
  for (const auto& [name, table] : tables) {
    internal::WriteTextFile((base / (std::string(name) + ".csv")).string(), table.Csv());
    internal::WriteTextFile((base / (std::string(name) + ".dat")).string(), table.Dat());
  }
}

}  // namespace pia
