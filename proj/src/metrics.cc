// Copyright 2026 The kconflict Authors
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

#include "kconflict/metrics.h"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "kconflict/error.h"
#include "kconflict/text.h"

namespace kconflict {

bool ExactMatch(std::string_view prediction, const std::vector<std::string>& answers) {
  const std::string p = NormalizeAnswer(prediction);
  for (const std::string& a : answers) {
    if (NormalizeAnswer(a) == p) return true;
  }
  return false;
}

bool ContainsAnswer(std::string_view text, const std::vector<std::string>& answers) {
  const std::string haystack = NormalizeAnswer(text);
  for (const std::string& a : NormalizeAliases(answers)) {
    if (haystack.find(a) != std::string::npos) return true;
  }
  return false;
}

RecallResult AnswerRecall(const EvidenceSet& evidence, const std::vector<std::string>& answers) {
  RecallResult r;
  for (const Passage& p : evidence.passages) {
    if (ContainsAnswer(p.text, answers)) ++r.containing;
  }
  r.found = r.containing > 0;
  return r;
}

std::string_view AnswerSourceName(AnswerSource source) {
  return source == AnswerSource::kExtractive ? "extractive" : "abstractive";
}

AnswerSource ClassifyPrediction(std::string_view prediction, const EvidenceSet& evidence) {
  if (NormalizeAnswer(prediction).empty()) return AnswerSource::kAbstractive;
  return AnswerRecall(evidence, {std::string(prediction)}).found ? AnswerSource::kExtractive
                                                                  : AnswerSource::kAbstractive;
}

double MemorizationRatio(double p_original, double p_substitute) {
  if (p_original < 0 || p_substitute < 0) {
    throw Error("memorization ratio needs non-negative fractions");
  }
  if (p_original + p_substitute == 0) {
    throw UndefinedMetricError("memorization ratio undefined: p_o + p_s = 0");
  }
  return p_original / (p_original + p_substitute);
}

std::string_view OverlapSplitName(OverlapSplit split) {
  return split == OverlapSplit::kAnswerOverlap ? "answer_overlap" : "no_answer_overlap";
}

OverlapSplit AnswerOverlap(const QuestionRecord& question,
                           const std::set<std::string>& train_answers) {
  for (const std::string& a : NormalizeAliases(question.answers)) {
    if (train_answers.count(a)) return OverlapSplit::kAnswerOverlap;
  }
  return OverlapSplit::kNoAnswerOverlap;
}

OverlapPartition AnswerOverlapSplit(const std::vector<QuestionRecord>& test_questions,
                                    const EntityPool& train_pool) {
  const std::vector<std::string> entries = train_pool.NormalizedEntries();
  const std::set<std::string> seen(entries.begin(), entries.end());
  OverlapPartition out;
  for (const QuestionRecord& q : test_questions) {
    if (AnswerOverlap(q, seen) == OverlapSplit::kAnswerOverlap) {
      out.answer_overlap.push_back(q.qid);
    } else {
      out.no_answer_overlap.push_back(q.qid);
    }
  }
  return out;
}

size_t LogRatioBin(double log_ratio) {
  if (std::isnan(log_ratio)) throw Error("log ratio is NaN");
  if (log_ratio <= kLogRatioMin) return 0;
  if (log_ratio >= kLogRatioMax) return kLogRatioBins - 1;
  const auto bin = static_cast<size_t>(std::floor((log_ratio - kLogRatioMin) / kLogRatioStep));
  return std::min(bin, kLogRatioBins - 1);
}

ConfidenceDropStats ComputeConfidenceDrop(const std::vector<ConfidencePair>& pairs) {
  if (pairs.empty()) throw Error("confidence drop needs at least one pair");
  ConfidenceDropStats s;
  s.histogram.assign(kLogRatioBins, 0);
  for (size_t i = 0; i <= kLogRatioBins; ++i) {
    s.bin_edges.push_back(kLogRatioMin + kLogRatioStep * static_cast<double>(i));
  }
  for (const ConfidencePair& p : pairs) {
    if (std::isnan(p.before) || std::isnan(p.after) || p.after < 0 || p.before < 0) {
      throw Error("confidence pair " + p.qid + " has an invalid score");
    }
    if (p.before == 0) {
      ++s.excluded_zero_before;
      continue;
    }
    ++s.pairs;
    if (p.after < p.before) ++s.dropped;
    const double ratio =
        p.after == 0 ? -std::numeric_limits<double>::infinity() : std::log(p.after / p.before);
    ++s.histogram[LogRatioBin(ratio)];
  }
  if (s.pairs == 0) {
    throw UndefinedMetricError("confidence drop undefined: every pair has a zero before score");
  }
  s.fraction_dropped = static_cast<double>(s.dropped) / static_cast<double>(s.pairs);
  return s;
}

Json ToJson(const ConfidenceDropStats& stats) {
  return Json{{"pairs", stats.pairs},
              {"excluded_zero_before", stats.excluded_zero_before},
              {"dropped", stats.dropped},
              {"fraction_dropped", RoundPercent(stats.fraction_dropped)},
              {"bin_edges", stats.bin_edges},
              {"histogram", stats.histogram}};
}

EvalOutcome MakeOutcome(const QuestionRecord& question, const EvidenceSet& evidence,
                        const PredictionRecord& prediction,
                        const std::optional<std::string>& substitute,
                        const std::optional<PredictionRecord>& cbqa) {
  EvalOutcome o;
  o.qid = question.qid;
  o.em_original = ExactMatch(prediction.prediction, question.answers);
  if (substitute) o.em_substitute = ExactMatch(prediction.prediction, {*substitute});
  o.extractive =
      ClassifyPrediction(prediction.prediction, evidence) == AnswerSource::kExtractive;
  o.retrieval_success = AnswerRecall(evidence, question.answers).found;
  if (cbqa) {
    o.cbqa_differs = NormalizeAnswer(cbqa->prediction) != NormalizeAnswer(prediction.prediction);
  }
  return o;
}

double RoundPercent(double fraction) { return std::round(fraction * 10000.0) / 100.0; }

void OutcomeCounts::Add(const EvalOutcome& o) {
  ++n;
  if (o.em_original) ++correct;
  if (o.extractive) ++extractive;
  if (o.em_original && o.extractive) ++correct_extractive;
  if (o.cbqa_differs) {
    ++cbqa_known;
    if (*o.cbqa_differs) ++cbqa_differs;
  }
  if (o.retrieval_success) ++retrieval_success;
  if (o.em_substitute) {
    ++perturbed;
    if (o.em_original) ++perturbed_original;
    if (*o.em_substitute) ++perturbed_substitute;
  }
}

void OutcomeCounts::Merge(const OutcomeCounts& other) {
  n += other.n;
  correct += other.correct;
  extractive += other.extractive;
  correct_extractive += other.correct_extractive;
  cbqa_known += other.cbqa_known;
  cbqa_differs += other.cbqa_differs;
  retrieval_success += other.retrieval_success;
  perturbed += other.perturbed;
  perturbed_original += other.perturbed_original;
  perturbed_substitute += other.perturbed_substitute;
}

ReportRow OutcomeCounts::ToRow(std::string split, bool extractive_impossible) const {
  auto pct = [](size_t num, size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return RoundPercent(static_cast<double>(num) / static_cast<double>(den));
  };
  ReportRow r;
  r.split = std::move(split);
  r.n = n;
  r.exact_match = pct(correct, n);
  r.extractive = pct(extractive, n);
  r.abstractive = pct(n - extractive, n);
  if (!extractive_impossible) r.correct_extractive = pct(correct_extractive, n);
  r.correct_abstractive = pct(correct - correct_extractive, n);
  r.incorrect_extractive = pct(extractive - correct_extractive, n);
  r.incorrect_abstractive = pct(n - correct - extractive + correct_extractive, n);
  r.cbqa_differs = pct(cbqa_differs, cbqa_known);
  r.answer_recall = pct(retrieval_success, n);
  r.original = pct(perturbed_original, perturbed);
  r.substitute = pct(perturbed_substitute, perturbed);
  if (perturbed > 0 && perturbed_original + perturbed_substitute > 0) {
    r.memorization_ratio = RoundPercent(MemorizationRatio(
        static_cast<double>(perturbed_original), static_cast<double>(perturbed_substitute)));
  }
  return r;
}

MetricsReport Report(const std::vector<EvalOutcome>& outcomes) {
  OutcomeCounts all, success, failure, overlap, no_overlap;
  for (const EvalOutcome& o : outcomes) {
    all.Add(o);
    (o.retrieval_success ? success : failure).Add(o);
    if (o.answer_overlap) (*o.answer_overlap ? overlap : no_overlap).Add(o);
  }
  MetricsReport report;
  report.rows.push_back(all.ToRow("all", false));
  report.rows.push_back(success.ToRow("retrieval_success", false));
  report.rows.push_back(failure.ToRow("retrieval_failure", true));
  report.rows.push_back(overlap.ToRow("answer_overlap", false));
  report.rows.push_back(no_overlap.ToRow("no_answer_overlap", false));
  return report;
}

namespace {

struct Column {
  const char* name;
  std::optional<double> ReportRow::*field;
};

constexpr Column kColumns[] = {
    {"exact_match", &ReportRow::exact_match},
    {"extractive", &ReportRow::extractive},
    {"abstractive", &ReportRow::abstractive},
    {"correct_extractive", &ReportRow::correct_extractive},
    {"correct_abstractive", &ReportRow::correct_abstractive},
    {"incorrect_extractive", &ReportRow::incorrect_extractive},
    {"incorrect_abstractive", &ReportRow::incorrect_abstractive},
    {"cbqa_differs", &ReportRow::cbqa_differs},
    {"answer_recall", &ReportRow::answer_recall},
    {"original", &ReportRow::original},
    {"substitute", &ReportRow::substitute},
    {"memorization_ratio", &ReportRow::memorization_ratio},
};

std::string FormatPercent(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << v;
  return out.str();
}

}  // namespace

Json ToJson(const MetricsReport& report) {
  Json rows = Json::array();
  for (const ReportRow& r : report.rows) {
    Json row = {{"split", r.split}, {"n", r.n}};
    for (const Column& c : kColumns) {
      const std::optional<double>& v = r.*c.field;
      row[c.name] = v ? Json(*v) : Json(nullptr);
    }
    rows.push_back(std::move(row));
  }
  return Json{{"rows", rows}};
}

MetricsReport MetricsReportFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array()) {
    throw DatasetError("metrics report: missing \"rows\" array");
  }
  MetricsReport report;
  for (const Json& row : j["rows"]) {
    ReportRow r;
    r.split = row.at("split").get<std::string>();
    r.n = row.at("n").get<size_t>();
    for (const Column& c : kColumns) {
      const Json& v = row.at(c.name);
      if (!v.is_null()) r.*c.field = v.get<double>();
    }
    report.rows.push_back(std::move(r));
  }
  return report;
}

std::string ToCsv(const MetricsReport& report) {
  std::string out = "split,n";
  for (const Column& c : kColumns) {
    out += ',';
    out += c.name;
  }
  out += '\n';
  for (const ReportRow& r : report.rows) {
    out += r.split + "," + std::to_string(r.n);
    for (const Column& c : kColumns) {
      out += ',';
      const std::optional<double>& v = r.*c.field;
      if (v) out += FormatPercent(*v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace kconflict
