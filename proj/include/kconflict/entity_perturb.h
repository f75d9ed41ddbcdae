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

#ifndef KCONFLICT_ENTITY_PERTURB_H_
#define KCONFLICT_ENTITY_PERTURB_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kconflict/corpus.h"

namespace kconflict {

enum class SelectionStrategy { kRandom, kTopRetrieval, kTopAttention };

std::string_view StrategyName(SelectionStrategy strategy);
// Accepts "random", "top-retrieval", "top-attention" (or underscores).
SelectionStrategy ParseStrategy(std::string_view name);

// Substitute in round-half-up(fraction * candidates) passages, at least one.
struct FractionAmount {
  double fraction = 1.0;
};
// Substitute in every candidate except the k with the highest attention.
struct AllExceptTopK {
  int k = 1;
};
// Substitute in exactly min(count, candidates) passages.
struct TopCount {
  int count = 1;
};
using SelectionAmount = std::variant<FractionAmount, AllExceptTopK, TopCount>;

std::string DescribeAmount(const SelectionAmount& amount);

struct PoolSubstitute {};
struct FixedSubstitute {
  std::string value;
};
using SubstituteSource = std::variant<PoolSubstitute, FixedSubstitute>;

struct SubstitutionPlan {
  SelectionStrategy strategy = SelectionStrategy::kRandom;
  SelectionAmount amount = FractionAmount{1.0};
  SubstituteSource substitute = PoolSubstitute{};
  // Global seed. Per-question seeds come from DeriveSeed(seed, qid, op).
  uint64_t seed = 0;
};

// Throws SelectionError for fractions outside (0, 1], k < 1 or count < 1.
void ValidatePlan(const SubstitutionPlan& plan);

// round-half-up(fraction * candidates), at least 1 when fraction > 0 and
// candidates > 0, never more than candidates.
size_t SelectionCount(double fraction, size_t candidates);

// Pids of the answer-containing passages chosen by `plan`, in evidence
// order. Score ties are broken by ascending pid. Empty when no passage
// contains an answer.
std::vector<std::string> SelectTargetPassages(const EvidenceSet& evidence,
                                              const std::vector<std::string>& answers,
                                              const SubstitutionPlan& plan);

// Seeded uniform draw from pool[type], skipping values that normalize to any
// of `exclude`. Throws SamplingError if nothing is left.
std::string SampleSubstitute(const EntityPool& pool, EntityType type,
                             const std::vector<std::string>& exclude, uint64_t seed);

struct PassageChange {
  std::string pid;
  bool selected = false;
  size_t mentions_replaced = 0;
};

// Audit trail of one substitution.
struct PerturbationRecord {
  std::string qid;
  std::string substitute;
  std::string strategy;
  std::string amount;
  std::vector<PassageChange> passages;
  size_t answer_passages_before = 0;
  size_t answer_passages_after = 0;
};

Json ToJson(const PerturbationRecord& record);
PerturbationRecord PerturbationRecordFromJson(const Json& j);

struct SubstitutionResult {
  EvidenceSet evidence;
  PerturbationRecord record;
};

// Replaces every answer mention of the selected passages with the
// substitute. Unselected passages are copied unchanged; scores are carried
// over. `pool` is required for PoolSubstitute plans.
SubstitutionResult Substitute(const EvidenceSet& evidence, const QuestionRecord& question,
                              const SubstitutionPlan& plan, const EntityPool* pool = nullptr);

}  // namespace kconflict

#endif  // KCONFLICT_ENTITY_PERTURB_H_
