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

#ifndef KCONFLICT_CORPUS_H_
#define KCONFLICT_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace kconflict {

using Json = nlohmann::json;

enum class EntityType { kPerson, kDate, kNumeric, kOrganization, kLocation, kOther };

std::string_view EntityTypeName(EntityType type);
// Throws DatasetError for unknown names.
EntityType ParseEntityType(std::string_view name);

struct QuestionRecord {
  std::string qid;
  std::string question;
  std::vector<std::string> answers;
  EntityType answer_type = EntityType::kOther;
};

struct EntityMention {
  size_t start = 0;  // code points, inclusive
  size_t end = 0;    // code points, exclusive
  EntityType type = EntityType::kOther;

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

// One dependency-parsed token. `head` is 1-based within the sentence; 0 marks
// the root.
struct Token {
  std::string form;
  std::string lemma;
  std::string xpos;
  int head = 0;
  std::string deprel;

  friend bool operator==(const Token&, const Token&) = default;
};

struct SentenceParse {
  size_t start = 0;
  size_t end = 0;
  std::vector<Token> tokens;

  // Index of the unique root token, if there is exactly one.
  std::optional<size_t> RootIndex() const;

  friend bool operator==(const SentenceParse&, const SentenceParse&) = default;
};

struct Passage {
  std::string qid;
  std::string pid;
  int rank = 1;
  std::string title;
  std::string text;
  double retrieval_score = 0.0;
  std::optional<double> attention_score;
  std::vector<EntityMention> mentions;
  std::vector<SentenceParse> sentences;

  friend bool operator==(const Passage&, const Passage&) = default;
};

struct EvidenceSet {
  std::string qid;
  std::vector<Passage> passages;  // ordered by rank

  const Passage* FindPassage(std::string_view pid) const;
};

struct PredictionRecord {
  std::string qid;
  std::string prediction;
  double gen_prob = 0.0;
  std::optional<std::vector<double>> encoder_features;
};

// Training-answer surface strings per entity type, as a multiset.
class EntityPool {
 public:
  void Add(EntityType type, std::string surface);
  // Empty vector for types never added.
  const std::vector<std::string>& Entries(EntityType type) const;
  size_t size() const;
  // Normalized union of every entry, for answer-overlap checks.
  std::vector<std::string> NormalizedEntries() const;

 private:
  std::map<EntityType, std::vector<std::string>> entries_;
};

// Every gold alias of every training question, duplicates preserved.
EntityPool BuildEntityPool(const std::vector<QuestionRecord>& training_questions);

// Answer mentions of `answers` in `passage`, sorted by start:
//  (a) annotated mentions whose covered text normalizes to a gold alias;
//  (b) case-insensitive whole-token matches of an alias that do not overlap
//      (a). These get `fallback_type`.
std::vector<EntityMention> FindAnswerMentions(
    const Passage& passage, const std::vector<std::string>& answers,
    EntityType fallback_type = EntityType::kOther);

// Text covered by `mention` in `passage`.
std::string MentionText(const Passage& passage, const EntityMention& mention);

// Token offsets (code points, relative to the sentence text) found by
// matching each form in order and skipping whitespace in between. nullopt if
// the forms do not tile the text.
std::optional<std::vector<std::pair<size_t, size_t>>> AlignTokens(
    std::u32string_view sentence_text, const std::vector<Token>& tokens);

// ---------------------------------------------------------------------------
// JSON records. Serialization is canonical: object keys sorted, nullable
// fields always present.

Json ToJson(const QuestionRecord& q);
Json ToJson(const Passage& p);
Json ToJson(const PredictionRecord& p);
Json ToJson(const Token& t);
Json ToJson(const SentenceParse& s);

// Schema checks only. Throw DatasetError naming the offending field.
QuestionRecord QuestionFromJson(const Json& j);
Passage PassageFromJson(const Json& j);
PredictionRecord PredictionFromJson(const Json& j);

// Content checks on a single record. Returns human-readable findings.
std::vector<std::string> CheckQuestion(const QuestionRecord& q);
std::vector<std::string> CheckPassage(const Passage& p);

// ---------------------------------------------------------------------------
// Files.

struct DatasetPaths {
  std::filesystem::path questions;
  std::filesystem::path passages;
  std::optional<std::filesystem::path> predictions;
};

struct Finding {
  std::string file;
  size_t line = 0;  // 1-based, 0 when not line-specific
  std::string message;
};

std::string FormatFinding(const Finding& f);

// Joined dataset keyed by qid. Immutable after loading.
struct Dataset {
  std::vector<QuestionRecord> questions;  // file order
  std::map<std::string, size_t> question_index;
  std::map<std::string, EvidenceSet> evidence;
  std::map<std::string, PredictionRecord> predictions;

  const QuestionRecord* FindQuestion(std::string_view qid) const;
  const EvidenceSet* FindEvidence(std::string_view qid) const;
  size_t size() const { return questions.size(); }
};

// Every schema and referential problem across the files; never throws for
// content problems.
std::vector<Finding> ValidateDataset(const DatasetPaths& paths);

// Throws DatasetError carrying the first finding.
Dataset LoadDataset(const DatasetPaths& paths);

std::vector<QuestionRecord> LoadQuestions(const std::filesystem::path& path);
std::vector<PredictionRecord> LoadPredictions(const std::filesystem::path& path);
// Passages grouped into evidence sets, passages sorted by rank.
std::map<std::string, EvidenceSet> LoadEvidence(const std::filesystem::path& path);

void WriteJsonl(const std::filesystem::path& path, const std::vector<Json>& rows);
std::vector<Json> ReadJsonl(const std::filesystem::path& path);

void WriteQuestions(const std::filesystem::path& path,
                    const std::vector<QuestionRecord>& questions);
// Sets are written in the given order, passages in rank order.
void WriteEvidence(const std::filesystem::path& path,
                   const std::vector<EvidenceSet>& sets);
void WritePredictions(const std::filesystem::path& path,
                      const std::vector<PredictionRecord>& predictions);

// ---------------------------------------------------------------------------
// CoNLL-U import.

struct ConlluSentence {
  std::string pid;  // from a preceding "# pid = ..." comment, may be empty
  std::vector<Token> tokens;
};

// FORM, LEMMA, XPOS, HEAD and DEPREL are read; multiword-token ranges and
// empty nodes are skipped.
std::vector<ConlluSentence> ParseConllu(std::string_view text);

// Locates each token sequence in `passage.text` in order and replaces the
// passage's sentences. Throws DatasetError when a sentence cannot be
// aligned.
void AttachSentences(Passage& passage, const std::vector<std::vector<Token>>& sentences);

}  // namespace kconflict

#endif  // KCONFLICT_CORPUS_H_
