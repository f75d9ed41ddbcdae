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

#ifndef KCONFLICT_PIPELINE_H_
#define KCONFLICT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kconflict/calibrator.h"
#include "kconflict/corpus.h"
#include "kconflict/entity_perturb.h"
#include "kconflict/reader_sim.h"
#include "kconflict/semantic_perturb.h"

namespace kconflict {

// ---------------------------------------------------------------------------
// Readers.

class ReaderBackend {
 public:
  virtual ~ReaderBackend() = default;
  // One prediction per question, keyed by qid. Throws ExternalToolError when
  // a prediction is missing.
  virtual std::map<std::string, PredictionRecord> Predict(
      const std::vector<QuestionRecord>& questions, const std::vector<EvidenceSet>& evidence) = 0;
  virtual Json Describe() const = 0;
};

class SimReader : public ReaderBackend {
 public:
  explicit SimReader(ReaderSimConfig config);
  std::map<std::string, PredictionRecord> Predict(const std::vector<QuestionRecord>& questions,
                                                  const std::vector<EvidenceSet>& evidence) override;
  Json Describe() const override;

 private:
  ReaderSimConfig config_;
};

// Runs `command` through /bin/sh with the passages JSONL on standard input;
// standard output must be predictions JSONL. The questions file path is
// exported as KCONFLICT_QUESTIONS.
class CommandReader : public ReaderBackend {
 public:
  explicit CommandReader(std::string command);
  std::map<std::string, PredictionRecord> Predict(const std::vector<QuestionRecord>& questions,
                                                  const std::vector<EvidenceSet>& evidence) override;
  Json Describe() const override;

 private:
  std::string command_;
};

// {"type": "sim", ...ReaderSimConfig keys} or {"type": "command", "command": ...}.
std::unique_ptr<ReaderBackend> MakeReader(const Json& config);

// Hex FNV-1a of the canonical (sorted-key) JSON dump.
std::string ConfigHash(const Json& config);

// Questions the baseline reader answers correctly.
std::vector<QuestionRecord> CorrectlyAnswered(const std::vector<QuestionRecord>& questions,
                                              const std::map<std::string, PredictionRecord>& preds);

// ---------------------------------------------------------------------------
// Entity substitution study.

struct EntityStudyConfig {
  std::filesystem::path questions;
  std::filesystem::path passages;
  std::filesystem::path train_questions;
  uint64_t seed = 0;
  std::vector<SelectionStrategy> strategies = {SelectionStrategy::kRandom,
                                               SelectionStrategy::kTopRetrieval,
                                               SelectionStrategy::kTopAttention};
  std::vector<double> fractions = {0.25, 0.5, 0.75, 1.0};
  std::vector<int> all_except_top_k = {1, 3, 5};
  std::vector<int> top_counts;  // extra top-attention cells perturbing exactly k passages
  Json reader = {{"type", "sim"}};
};

Json ToJson(const EntityStudyConfig& config);
EntityStudyConfig EntityStudyConfigFromJson(const Json& j);

struct StudyCell {
  std::string strategy;
  std::string amount;
  size_t n = 0;
  double em_original = 0.0;  // percent
  double em_substitute = 0.0;
  std::optional<double> memorization_ratio;
  double flip_rate = 0.0;
  std::optional<double> confidence_dropped;
  std::map<std::string, PredictionRecord> predictions;  // not serialized
};

struct EntityStudyResult {
  std::string config_hash;
  uint64_t seed = 0;
  size_t questions = 0;
  size_t eligible = 0;
  std::map<std::string, std::string> substitutes;  // qid -> substitute
  std::map<std::string, PredictionRecord> baseline;
  std::vector<StudyCell> cells;
  std::vector<StudyCell> all_except_top_k;
  std::vector<StudyCell> top_counts;
};

// Eligible questions: answered correctly at baseline, answer type other than
// "other", and at least one answer-bearing passage.
EntityStudyResult RunEntityStudy(const EntityStudyConfig& config);
Json ToJson(const EntityStudyResult& result);

// ---------------------------------------------------------------------------
// Semantic perturbation study.

struct SemanticStudyConfig {
  std::filesystem::path questions;
  std::filesystem::path passages;
  std::vector<PerturbKind> kinds = {PerturbKind::kNegation, PerturbKind::kModality,
                                    PerturbKind::kFuture, PerturbKind::kInfilling};
  std::string infiller;  // empty: fallback table only
  int infiller_timeout_ms = 10000;
  Json reader = {{"type", "sim"}};
};

Json ToJson(const SemanticStudyConfig& config);
SemanticStudyConfig SemanticStudyConfigFromJson(const Json& j);

struct SemanticKindResult {
  std::string kind;
  size_t eligible = 0;
  size_t valid = 0;           // at least one answer sentence perturbed
  size_t full = 0;            // every answer sentence perturbed
  size_t sentences = 0;       // answer sentences over valid examples
  size_t sentences_perturbed = 0;
  std::optional<double> em_partial;  // EM on the original answer, valid set
  std::optional<double> em_full;     // EM on the original answer, full set
  std::map<std::string, size_t> skip_reasons;
  std::map<std::string, size_t> producers;
};

struct SemanticStudyResult {
  std::string config_hash;
  size_t questions = 0;
  std::vector<SemanticKindResult> kinds;
};

SemanticStudyResult RunSemanticStudy(const SemanticStudyConfig& config);
Json ToJson(const SemanticStudyResult& result);

// ---------------------------------------------------------------------------
// Conflict calibration study.

struct ConflictCalibrationConfig {
  std::filesystem::path questions;
  std::filesystem::path passages;
  std::filesystem::path train_questions;  // pool for partial substitution
  std::filesystem::path alt_passages;     // second retrieval
  std::filesystem::path alternatives;
  std::vector<std::string> sources = {"partial_substitution", "ambigqa_retrieval",
                                      "situatedqa_two_corpora"};
  size_t mix_n = 10;
  double partial_fraction = 0.5;
  double eval_fraction = 0.5;
  double threshold = 0.5;
  uint64_t seed = 0;
  GbdtHyperparams gbdt;
  Json reader = {{"type", "sim"}};
};

Json ToJson(const ConflictCalibrationConfig& config);
ConflictCalibrationConfig ConflictCalibrationConfigFromJson(const Json& j);

struct CalibrationMatrix {
  std::vector<std::string> rows;     // "model_confidence", then calibrators
  std::vector<std::string> columns;  // eval sets
  std::vector<std::vector<double>> accuracy;  // percent
  std::vector<double> macro_average;
  std::vector<size_t> eval_sizes;
  std::vector<size_t> train_sizes;  // per calibrator row (0 for model_confidence)
};

struct ConflictCalibrationResult {
  std::string config_hash;
  uint64_t seed = 0;
  size_t correct = 0;
  std::map<std::string, size_t> dropped;  // per source
  CalibrationMatrix matrix;
};

ConflictCalibrationResult RunConflictCalibration(const ConflictCalibrationConfig& config);
Json ToJson(const ConflictCalibrationResult& result);

}  // namespace kconflict

#endif  // KCONFLICT_PIPELINE_H_
