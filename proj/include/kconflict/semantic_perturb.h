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

#ifndef KCONFLICT_SEMANTIC_PERTURB_H_
#define KCONFLICT_SEMANTIC_PERTURB_H_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kconflict/corpus.h"

namespace kconflict {

enum class PerturbKind { kNegation, kModality, kFuture, kInfilling };

std::string_view PerturbKindName(PerturbKind kind);
PerturbKind ParsePerturbKind(std::string_view name);

enum class SkipReason {
  kNone,
  kRootNotVerb,
  kNoAuxiliary,
  // Root already governed by a modal or do-support auxiliary.
  kAuxiliaryConstruction,
  kNoRoot,
  kUnalignedTokens,
  kNoInfill,
  // Answer mention outside every parsed sentence.
  kNoParse,
};

std::string_view SkipReasonName(SkipReason reason);

// Fills the "[blank]" in a sentence. Returns the whole filled sentence, or
// nullopt on any failure.
class Infiller {
 public:
  virtual ~Infiller() = default;
  virtual std::optional<std::string> Fill(const std::string& text_with_blank) = 0;
  virtual std::string Name() const = 0;
};

// Long-running child process speaking one JSON object per line:
// {"text": "... [blank] ..."} in, {"filled": "..."} out.
class SubprocessInfiller : public Infiller {
 public:
  SubprocessInfiller(std::string command, int timeout_ms);
  ~SubprocessInfiller() override;
  SubprocessInfiller(const SubprocessInfiller&) = delete;
  SubprocessInfiller& operator=(const SubprocessInfiller&) = delete;

  std::optional<std::string> Fill(const std::string& text_with_blank) override;
  std::string Name() const override { return "subprocess:" + command_; }

 private:
  bool Start();
  void Stop();

  std::string command_;
  int timeout_ms_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

// POSTs {"text": ...} to `url` and reads {"filled": ...}.
class HttpInfiller : public Infiller {
 public:
  HttpInfiller(std::string url, int timeout_ms);
  std::optional<std::string> Fill(const std::string& text_with_blank) override;
  std::string Name() const override { return "http:" + url_; }

 private:
  std::string url_;
  int timeout_ms_;
};

// http:// and https:// specs give an HttpInfiller, anything else is run as a
// shell command.
std::unique_ptr<Infiller> MakeInfiller(const std::string& spec, int timeout_ms);

// Contradicting verb for `lemma`, inflected like `xpos`, from the bundled
// table (win -> lose, ...).
std::optional<std::string> FallbackInfill(std::string_view lemma, std::string_view xpos);

inline constexpr std::string_view kBlank = "[blank]";
inline constexpr std::string_view kRulesInfiller = "rules";
inline constexpr std::string_view kFallbackInfiller = "fallback-table";

struct SentenceRewrite {
  bool perturbed = false;
  SkipReason reason = SkipReason::kNone;
  std::string text;  // the sentence after rewriting (unchanged if skipped)
  // Replaced region, code points relative to the original sentence text.
  size_t edit_start = 0;
  size_t edit_end = 0;
  std::string replacement;
  std::vector<Token> tokens;
  // Which component produced the edit: "rules", "fallback-table" or the
  // external infiller's name.
  std::string producer;
};

// Rewrites the dependency root of one sentence. `sentence_text` is the text
// the tokens tile.
SentenceRewrite PerturbSentence(const SentenceParse& parse, std::string_view sentence_text,
                                PerturbKind kind, Infiller* infiller = nullptr);

// Same, over the token forms joined by single spaces.
SentenceRewrite PerturbSentence(const SentenceParse& parse, PerturbKind kind,
                                Infiller* infiller = nullptr);

enum class CoverageClass { kNone, kPartial, kFull };

std::string_view CoverageClassName(CoverageClass c);

struct CoverageStats {
  std::string qid;
  size_t total = 0;  // answer sentences
  size_t perturbed = 0;
  size_t skipped = 0;
  std::map<std::string, size_t> skip_reasons;
  std::map<std::string, size_t> producers;

  CoverageClass Class() const;
};

Json ToJson(const CoverageStats& stats);

struct SemanticResult {
  EvidenceSet evidence;
  CoverageStats stats;
};

// Applies `kind` to every sentence holding an answer mention.
SemanticResult PerturbEvidence(const EvidenceSet& evidence, const QuestionRecord& question,
                               PerturbKind kind, Infiller* infiller = nullptr);

}  // namespace kconflict

#endif  // KCONFLICT_SEMANTIC_PERTURB_H_
