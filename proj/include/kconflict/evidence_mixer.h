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

#ifndef KCONFLICT_EVIDENCE_MIXER_H_
#define KCONFLICT_EVIDENCE_MIXER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kconflict/corpus.h"

namespace kconflict {

enum class ConflictSource { kPartialSubstitution, kAmbigQa, kSituatedQa };

std::string_view ConflictSourceName(ConflictSource source);
// Accepts "partial_substitution"/"partial-sub", "ambigqa"/"ambigqa_retrieval",
// "situatedqa"/"situatedqa_two_corpora".
ConflictSource ParseConflictSource(std::string_view name);

struct MixResult {
  EvidenceSet evidence;
  size_t target_a = 0;  // ceil(N/2)
  size_t target_b = 0;  // floor(N/2)
  size_t from_a = 0;
  size_t from_b = 0;
  size_t containing_a = 0;  // A passages taken that contain A's answer
  size_t containing_b = 0;
  size_t duplicates = 0;  // pids already taken from the other side
};

// Takes ceil(N/2) passages from A and floor(N/2) from B, answer-containing
// passages first (by retrieval score), then the remaining passages by
// retrieval score. A pid taken once is not taken again; the shortfall, and
// any shortfall of an exhausted side, is filled from the other side. The
// result is ordered by retrieval score (desc, then pid) with ranks 1..N.
// Throws MixError when a side is empty or fewer than N distinct passages
// exist.
MixResult MixEvidence(const EvidenceSet& a, const std::vector<std::string>& answers_a,
                      const EvidenceSet& b, const std::vector<std::string>& answers_b,
                      size_t n);

struct AlternativeCandidate {
  std::string answer;
  std::optional<std::string> date;  // ISO 8601, compared as text
};

// alternatives.jsonl rows: {"qid", "candidates": [{"answer", "date"}]}.
Json AlternativesToJson(const std::string& qid,
                        const std::vector<AlternativeCandidate>& candidates);
std::map<std::string, std::vector<AlternativeCandidate>> LoadAlternatives(
    const std::filesystem::path& path);

// ambigqa: seeded uniform draw over candidates that do not normalize to an
// original alias. situatedqa: the valid candidate with the latest date (ties
// to the smaller answer). partial_substitution: a pool draw of
// `answer_type`. Throws MixError when nothing valid remains.
std::string SelectAlternativeAnswer(ConflictSource source,
                                    const std::vector<AlternativeCandidate>& candidates,
                                    const QuestionRecord& question, uint64_t seed,
                                    const EntityPool* pool = nullptr);

struct ConflictPair {
  std::string qid;
  EvidenceSet original;
  std::vector<std::string> original_answers;
  EvidenceSet conflict;
  std::vector<std::string> alternative_answers;
  ConflictSource provenance = ConflictSource::kPartialSubstitution;
};

Json ConflictSummaryJson(const ConflictPair& pair);

struct CalibrationRecord {
  std::string qid;
  std::vector<double> features;
  int label = 0;  // 1 = answer, 0 = abstain
  std::string provenance;
};

Json ToJson(const CalibrationRecord& record);
CalibrationRecord CalibrationRecordFromJson(const Json& j);
std::vector<CalibrationRecord> LoadCalibrationRecords(const std::filesystem::path& path);
void WriteCalibrationRecords(const std::filesystem::path& path,
                             const std::vector<CalibrationRecord>& records);

// For each question with both predictions, one record labelled 1 built from
// the original prediction and one labelled 0 from the conflict prediction.
// Questions missing either prediction are dropped with a warning. Throws
// CalibrationError when the feature dimension is not constant.
std::vector<CalibrationRecord> PairPredictions(
    const std::vector<std::string>& qids,
    const std::map<std::string, PredictionRecord>& original,
    const std::map<std::string, PredictionRecord>& conflict, std::string_view provenance);

using ConflictBuilder = std::function<ConflictPair(const QuestionRecord&)>;
using Reader = std::function<PredictionRecord(const QuestionRecord&, const EvidenceSet&)>;

struct ConflictPairs {
  std::vector<ConflictPair> pairs;
  std::vector<CalibrationRecord> records;
  std::vector<std::string> dropped;
};

// `builder` may throw an Error to drop a question.
ConflictPairs BuildConflictPairs(const std::vector<QuestionRecord>& correct,
                                 const ConflictBuilder& builder, const Reader& reader);

}  // namespace kconflict

#endif  // KCONFLICT_EVIDENCE_MIXER_H_
