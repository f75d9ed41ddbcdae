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

#ifndef KCONFLICT_TOY_CORPUS_H_
#define KCONFLICT_TOY_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "kconflict/corpus.h"
#include "kconflict/evidence_mixer.h"

namespace kconflict {

inline constexpr uint64_t kToySeed = 20220525;

struct ToyOptions {
  uint64_t seed = kToySeed;
  int questions_per_type = 12;  // for each of the five typed answer types
  int other_questions = 4;
  int train_questions = 90;
  int passages_per_question = 16;
  int alternative_passages = 10;
};

// Synthetic parsed corpus. Every question has several passages stating its
// answer, a few stating a same-type distractor, and filler. A second
// retrieval (`alternative_evidence`) supports alternative answers listed in
// `alternatives`.
struct ToyCorpus {
  std::vector<QuestionRecord> questions;
  std::vector<EvidenceSet> evidence;
  std::vector<QuestionRecord> train_questions;
  std::vector<EvidenceSet> alternative_evidence;
  std::map<std::string, std::vector<AlternativeCandidate>> alternatives;
};

ToyCorpus MakeToyCorpus(const ToyOptions& options = {});

// Writes questions.jsonl, passages.jsonl, train_questions.jsonl and
// alt/{passages,alternatives}.jsonl under `dir`.
void WriteToyCorpus(const ToyCorpus& corpus, const std::filesystem::path& dir);

}  // namespace kconflict

#endif  // KCONFLICT_TOY_CORPUS_H_
