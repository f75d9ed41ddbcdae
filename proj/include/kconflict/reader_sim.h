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

#ifndef KCONFLICT_READER_SIM_H_
#define KCONFLICT_READER_SIM_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kconflict/corpus.h"

namespace kconflict {

enum class ScoreSource { kAttention, kRetrieval };

std::string_view ScoreSourceName(ScoreSource source);
ScoreSource ParseScoreSource(std::string_view name);

// A deterministic stand-in reader. It reads the `focus_k` best-scored
// passages, votes for annotated mentions of the expected answer type with
// passage scores, and adds `memory_bias` to the answer it has memorized.
struct ReaderSimConfig {
  std::map<std::string, std::string> memory;  // qid -> memorized answer
  // Memorize the first gold alias of every question not in `memory`.
  bool memorize_gold = false;
  double memory_bias = 0.0;
  int focus_k = 1;
  ScoreSource score_source = ScoreSource::kAttention;
  uint64_t seed = 0;
};

void ValidateReaderSimConfig(const ReaderSimConfig& config);

Json ToJson(const ReaderSimConfig& config);
// Missing keys keep their defaults.
ReaderSimConfig ReaderSimConfigFromJson(const Json& j);

// Feature vector emitted with every prediction: number of candidates, top
// share, runner-up share, memory agreement.
inline constexpr size_t kReaderSimFeatureDim = 4;

// Throws Error for empty evidence, a missing score or a negative score.
PredictionRecord Simulate(const QuestionRecord& question, const EvidenceSet& evidence,
                          const ReaderSimConfig& config);

}  // namespace kconflict

#endif  // KCONFLICT_READER_SIM_H_
