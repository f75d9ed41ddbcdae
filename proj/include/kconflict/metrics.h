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

#ifndef KCONFLICT_METRICS_H_
#define KCONFLICT_METRICS_H_

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kconflict/corpus.h"

namespace kconflict {

// Normalized prediction equals a normalized alias.
bool ExactMatch(std::string_view prediction, const std::vector<std::string>& answers);

// Whether a normalized alias occurs as a substring of the normalized text.
bool ContainsAnswer(std::string_view text, const std::vector<std::string>& answers);

struct RecallResult {
  bool found = false;
  size_t containing = 0;
};

RecallResult AnswerRecall(const EvidenceSet& evidence, const std::vector<std::string>& answers);

enum class AnswerSource { kExtractive, kAbstractive };

std::string_view AnswerSourceName(AnswerSource source);

AnswerSource ClassifyPrediction(std::string_view prediction, const EvidenceSet& evidence);

// p_o / (p_o + p_s). Throws UndefinedMetricError when both are zero.
double MemorizationRatio(double p_original, double p_substitute);

enum class OverlapSplit { kAnswerOverlap, kNoAnswerOverlap };

std::string_view OverlapSplitName(OverlapSplit split);

// `train_answers` holds normalized training answers.
OverlapSplit AnswerOverlap(const QuestionRecord& question,
                           const std::set<std::string>& train_answers);

struct OverlapPartition {
  std::vector<std::string> answer_overlap;
  std::vector<std::string> no_answer_overlap;
};

OverlapPartition AnswerOverlapSplit(const std::vector<QuestionRecord>& test_questions,
                                    const EntityPool& train_pool);

// ---------------------------------------------------------------------------
// Confidence drop.

enum class ConfidenceKind { kGenProb, kCalibrator };

struct ConfidencePair {
  std::string qid;
  double before = 0.0;
  double after = 0.0;
  ConfidenceKind kind = ConfidenceKind::kGenProb;
};

inline constexpr double kLogRatioMin = -3.0;
inline constexpr double kLogRatioMax = 3.0;
inline constexpr double kLogRatioStep = 0.25;
inline constexpr size_t kLogRatioBins = 24;

// Bin of log(after / before). Values outside [-3, 3], including -inf, land
// in the edge bins.
size_t LogRatioBin(double log_ratio);

struct ConfidenceDropStats {
  size_t pairs = 0;              // pairs with before > 0
  size_t excluded_zero_before = 0;
  size_t dropped = 0;            // after < before
  double fraction_dropped = 0.0;
  std::vector<double> bin_edges;  // kLogRatioBins + 1 values
  std::vector<size_t> histogram;  // kLogRatioBins counts
};

// Throws Error on empty input and UndefinedMetricError when every pair has a
// zero `before`.
ConfidenceDropStats ComputeConfidenceDrop(const std::vector<ConfidencePair>& pairs);

Json ToJson(const ConfidenceDropStats& stats);

// ---------------------------------------------------------------------------
// Reports.

// For a perturbed run `em_original` compares the prediction with the gold
// answers and `em_substitute` with the substitute.
struct EvalOutcome {
  std::string qid;
  bool em_original = false;
  std::optional<bool> em_substitute;
  bool extractive = false;
  bool retrieval_success = false;
  std::optional<bool> cbqa_differs;
  std::optional<bool> answer_overlap;
};

EvalOutcome MakeOutcome(const QuestionRecord& question, const EvidenceSet& evidence,
                        const PredictionRecord& prediction,
                        const std::optional<std::string>& substitute = std::nullopt,
                        const std::optional<PredictionRecord>& cbqa = std::nullopt);

// Percentages rounded to two decimals; nullopt when the denominator is empty
// or the cell is zero by definition.
struct ReportRow {
  std::string split;
  size_t n = 0;
  std::optional<double> exact_match;
  std::optional<double> extractive;
  std::optional<double> abstractive;
  std::optional<double> correct_extractive;
  std::optional<double> correct_abstractive;
  std::optional<double> incorrect_extractive;
  std::optional<double> incorrect_abstractive;
  std::optional<double> cbqa_differs;
  std::optional<double> answer_recall;
  std::optional<double> original;
  std::optional<double> substitute;
  std::optional<double> memorization_ratio;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct MetricsReport {
  std::vector<ReportRow> rows;  // all, retrieval_success, retrieval_failure,
                                // answer_overlap, no_answer_overlap

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Order-insensitive counts behind one report row.
struct OutcomeCounts {
  size_t n = 0;
  size_t correct = 0;
  size_t extractive = 0;
  size_t correct_extractive = 0;
  size_t cbqa_known = 0;
  size_t cbqa_differs = 0;
  size_t retrieval_success = 0;
  size_t perturbed = 0;
  size_t perturbed_original = 0;
  size_t perturbed_substitute = 0;

  void Add(const EvalOutcome& outcome);
  void Merge(const OutcomeCounts& other);
  ReportRow ToRow(std::string split, bool extractive_impossible) const;
};

double RoundPercent(double fraction);

MetricsReport Report(const std::vector<EvalOutcome>& outcomes);

Json ToJson(const MetricsReport& report);
MetricsReport MetricsReportFromJson(const Json& j);
std::string ToCsv(const MetricsReport& report);

}  // namespace kconflict

#endif  // KCONFLICT_METRICS_H_
