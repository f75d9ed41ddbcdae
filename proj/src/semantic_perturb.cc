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

#include "kconflict/semantic_perturb.h"

#include <algorithm>
#include <array>
#include <set>

#include "kconflict/error.h"
#include "kconflict/log.h"
#include "kconflict/passage_edit.h"
#include "kconflict/text.h"

namespace kconflict {

namespace {

const std::set<std::string> kBeForms = {"is", "am", "are", "was", "were"};
const std::set<std::string> kParticipleAuxiliaries = {"is",   "am",   "are",   "was",
                                                      "were", "be",   "been",  "being",
                                                      "has",  "have", "had"};
const std::set<std::string> kVerbTags = {"VB", "VBP", "VBZ", "VBD", "VBN", "VBG"};

bool IsAuxRelation(const std::string& deprel) { return deprel.rfind("aux", 0) == 0; }

std::string LemmaOf(const Token& t) {
  if (!t.lemma.empty()) return ToLowerAscii(t.lemma);
  const std::string form = ToLowerAscii(t.form);
  if (form == "has" || form == "have" || form == "had") return "have";
  if (kBeForms.count(form) || form == "been" || form == "being") return "be";
  return form;
}

Token MakeToken(std::string form, std::string lemma, std::string xpos, std::string deprel) {
  Token t;
  t.form = std::move(form);
  t.lemma = std::move(lemma);
  t.xpos = std::move(xpos);
  t.deprel = std::move(deprel);
  return t;
}

std::string Capitalized(std::string word) {
  if (!word.empty() && word[0] >= 'a' && word[0] <= 'z') word[0] = static_cast<char>(word[0] - 32);
  return word;
}

bool StartsUpper(const std::string& word) {
  return !word.empty() && word[0] >= 'A' && word[0] <= 'Z';
}

// Token-level plan for one sentence.
struct Rewrite {
  size_t first = 0;
  size_t last = 0;
  std::vector<ReplacementToken> tokens;
  size_t anchor = 0;
};

SentenceRewrite Skipped(SkipReason reason, const std::string& text,
                        const std::vector<Token>& tokens) {
  SentenceRewrite out;
  out.perturbed = false;
  out.reason = reason;
  out.text = text;
  out.tokens = tokens;
  return out;
}

// "won" -> "did not win" / "may win" / "will win"
Rewrite RewriteFiniteVerb(const Token& root, size_t index, PerturbKind kind) {
  const std::string lemma = LemmaOf(root);
  Rewrite r{index, index + 1, {}, 0};
  if (kind == PerturbKind::kNegation) {
    std::string aux = "do";
    std::string aux_tag = "VBP";
    if (root.xpos == "VBZ") {
      aux = "does";
      aux_tag = "VBZ";
    } else if (root.xpos == "VBD") {
      aux = "did";
      aux_tag = "VBD";
    }
    r.tokens.push_back({MakeToken(aux, "do", aux_tag, "aux"), 3});
    r.tokens.push_back({MakeToken("not", "not", "RB", "advmod"), 3});
    r.tokens.push_back({MakeToken(lemma, lemma, "VB", ""), 0});
    r.anchor = 2;
  } else {
    const std::string modal = kind == PerturbKind::kModality ? "may" : "will";
    r.tokens.push_back({MakeToken(modal, modal, "MD", "aux"), 2});
    r.tokens.push_back({MakeToken(lemma, lemma, "VB", ""), 0});
    r.anchor = 1;
  }
  return r;
}

// "is" -> "is not" / "may be" / "will be"
Rewrite RewriteBeRoot(const Token& root, size_t index, PerturbKind kind) {
  Rewrite r{index, index + 1, {}, 0};
  if (kind == PerturbKind::kNegation) {
    r.tokens.push_back({MakeToken(root.form, "be", root.xpos, ""), 0});
    r.tokens.push_back({MakeToken("not", "not", "RB", "advmod"), 1});
    r.anchor = 0;
  } else {
    const std::string modal = kind == PerturbKind::kModality ? "may" : "will";
    r.tokens.push_back({MakeToken(modal, modal, "MD", "aux"), 2});
    r.tokens.push_back({MakeToken("be", "be", "VB", ""), 0});
    r.anchor = 1;
  }
  return r;
}

// Auxiliary of a participle root: "has won" -> "has not won" / "may have
// won" / "will have won".
Rewrite RewriteAuxiliary(const Token& aux, size_t index, PerturbKind kind) {
  Rewrite r{index, index + 1, {}, 0};
  if (kind == PerturbKind::kNegation) {
    r.tokens.push_back({MakeToken(aux.form, aux.lemma, aux.xpos, ""), 0});
    r.tokens.push_back({MakeToken("not", "not", "RB", "advmod"), 0});
    r.anchor = 0;
  } else {
    const std::string modal = kind == PerturbKind::kModality ? "may" : "will";
    const std::string lemma = LemmaOf(aux);
    r.tokens.push_back({MakeToken(modal, modal, "MD", "aux"), 0});
    r.tokens.push_back({MakeToken(lemma, lemma, "VB", ""), 0});
    r.anchor = 1;
  }
  return r;
}

std::vector<size_t> AuxChildren(const SentenceParse& parse, size_t root) {
  std::vector<size_t> out;
  for (size_t i = 0; i < parse.tokens.size(); ++i) {
    if (parse.tokens[i].head == static_cast<int>(root) + 1 &&
        IsAuxRelation(parse.tokens[i].deprel)) {
      out.push_back(i);
    }
  }
  return out;
}

bool IsModalOrDoSupport(const Token& t) {
  return t.xpos == "MD" || LemmaOf(t) == "do";
}

SentenceRewrite Finish(const SentenceParse& parse, const std::u32string& text,
                       const std::vector<std::pair<size_t, size_t>>& spans, Rewrite rewrite,
                       std::string producer) {
  // Keep a capitalized sentence-initial word capitalized.
  if (rewrite.first == 0 && StartsUpper(parse.tokens[0].form)) {
    rewrite.tokens[0].token.form = Capitalized(rewrite.tokens[0].token.form);
  }
  SentenceRewrite out;
  out.perturbed = true;
  out.edit_start = spans[rewrite.first].first;
  out.edit_end = spans[rewrite.last - 1].second;
  for (size_t k = 0; k < rewrite.tokens.size(); ++k) {
    if (k > 0) out.replacement += ' ';
    out.replacement += rewrite.tokens[k].token.form;
  }
  std::u32string new_text = text.substr(0, out.edit_start);
  new_text += DecodeUtf8(out.replacement);
  new_text += text.substr(out.edit_end);
  out.text = EncodeUtf8(new_text);
  SentenceParse edited = parse;
  ReplaceTokenRange(edited, rewrite.first, rewrite.last, rewrite.tokens, rewrite.anchor);
  out.tokens = std::move(edited.tokens);
  out.producer = std::move(producer);
  return out;
}

// Middle part of `filled` that replaced the blank, if the rest of the
// sentence came back unchanged.
std::optional<std::string> ExtractFill(const std::u32string& blanked, size_t blank_start,
                                       const std::string& filled_utf8) {
  std::u32string filled;
  try {
    filled = DecodeUtf8(filled_utf8);
  } catch (const DatasetError&) {
    return std::nullopt;
  }
  const size_t blank_len = kBlank.size();
  const std::u32string prefix = blanked.substr(0, blank_start);
  const std::u32string suffix = blanked.substr(blank_start + blank_len);
  if (filled.size() < prefix.size() + suffix.size()) return std::nullopt;
  if (filled.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  if (filled.compare(filled.size() - suffix.size(), suffix.size(), suffix) != 0) {
    return std::nullopt;
  }
  return EncodeUtf8(filled.substr(prefix.size(), filled.size() - prefix.size() - suffix.size()));
}

struct Antonym {
  std::string_view lemma;
  std::string_view base, past, participle, third, gerund;
};

// Verb lemma -> contradicting verb, with its inflections.
constexpr Antonym kAntonyms[] = {
    {"win", "lose", "lost", "lost", "loses", "losing"},
    {"lose", "win", "won", "won", "wins", "winning"},
    {"open", "close", "closed", "closed", "closes", "closing"},
    {"close", "open", "opened", "opened", "opens", "opening"},
    {"start", "stop", "stopped", "stopped", "stops", "stopping"},
    {"begin", "end", "ended", "ended", "ends", "ending"},
    {"end", "begin", "began", "begun", "begins", "beginning"},
    {"rise", "fall", "fell", "fallen", "falls", "falling"},
    {"increase", "decrease", "decreased", "decreased", "decreases", "decreasing"},
    {"accept", "reject", "rejected", "rejected", "rejects", "rejecting"},
    {"build", "demolish", "demolished", "demolished", "demolishes", "demolishing"},
    {"join", "leave", "left", "left", "leaves", "leaving"},
    {"enter", "exit", "exited", "exited", "exits", "exiting"},
    {"arrive", "depart", "departed", "departed", "departs", "departing"},
    {"buy", "sell", "sold", "sold", "sells", "selling"},
    {"sell", "buy", "bought", "bought", "buys", "buying"},
    {"give", "take", "took", "taken", "takes", "taking"},
    {"find", "lose", "lost", "lost", "loses", "losing"},
    {"love", "hate", "hated", "hated", "hates", "hating"},
    {"agree", "disagree", "disagreed", "disagreed", "disagrees", "disagreeing"},
    {"allow", "forbid", "forbade", "forbidden", "forbids", "forbidding"},
    {"include", "exclude", "excluded", "excluded", "excludes", "excluding"},
    {"pass", "fail", "failed", "failed", "fails", "failing"},
    {"create", "destroy", "destroyed", "destroyed", "destroys", "destroying"},
    {"found", "dissolve", "dissolved", "dissolved", "dissolves", "dissolving"},
    {"host", "boycott", "boycotted", "boycotted", "boycotts", "boycotting"},
    {"appear", "disappear", "disappeared", "disappeared", "disappears", "disappearing"},
    {"live", "die", "died", "died", "dies", "dying"},
    {"die", "survive", "survived", "survived", "survives", "surviving"},
    {"marry", "divorce", "divorced", "divorced", "divorces", "divorcing"},
    {"remember", "forget", "forgot", "forgotten", "forgets", "forgetting"},
    {"hire", "fire", "fired", "fired", "fires", "firing"},
    {"attack", "defend", "defended", "defended", "defends", "defending"},
    {"lead", "follow", "followed", "followed", "follows", "following"},
    {"support", "oppose", "opposed", "opposed", "opposes", "opposing"},
    {"approve", "veto", "vetoed", "vetoed", "vetoes", "vetoing"},
    {"confirm", "deny", "denied", "denied", "denies", "denying"},
    {"hold", "lose", "lost", "lost", "loses", "losing"},
    {"own", "lack", "lacked", "lacked", "lacks", "lacking"},
    {"show", "hide", "hid", "hidden", "shows", "hiding"},
    {"succeed", "fail", "failed", "failed", "fails", "failing"},
    {"survive", "die", "died", "died", "dies", "dying"},
    {"remain", "leave", "left", "left", "leaves", "leaving"},
    {"stay", "leave", "left", "left", "leaves", "leaving"},
    {"complete", "abandon", "abandoned", "abandoned", "abandons", "abandoning"},
    {"release", "withhold", "withheld", "withheld", "withholds", "withholding"},
    {"score", "miss", "missed", "missed", "misses", "missing"},
    {"announce", "cancel", "cancelled", "cancelled", "cancels", "cancelling"},
    {"acquire", "sell", "sold", "sold", "sells", "selling"},
    {"add", "remove", "removed", "removed", "removes", "removing"},
    {"attract", "repel", "repelled", "repelled", "repels", "repelling"},
    {"choose", "reject", "rejected", "rejected", "rejects", "rejecting"},
    {"contain", "lack", "lacked", "lacked", "lacks", "lacking"},
    {"count", "ignore", "ignored", "ignored", "ignores", "ignoring"},
    {"credit", "blame", "blamed", "blamed", "blames", "blaming"},
    {"design", "destroy", "destroyed", "destroyed", "destroys", "destroying"},
    {"draw", "repel", "repelled", "repelled", "repels", "repelling"},
    {"finish", "abandon", "abandoned", "abandoned", "abandons", "abandoning"},
    {"house", "evict", "evicted", "evicted", "evicts", "evicting"},
    {"list", "omit", "omitted", "omitted", "omits", "omitting"},
    {"manage", "neglect", "neglected", "neglected", "neglects", "neglecting"},
    {"mark", "ignore", "ignored", "ignored", "ignores", "ignoring"},
    {"operate", "shut", "shut", "shut", "shuts", "shutting"},
    {"oversee", "ignore", "ignored", "ignored", "ignores", "ignoring"},
    {"place", "remove", "removed", "removed", "removes", "removing"},
    {"praise", "criticize", "criticized", "criticized", "criticizes", "criticizing"},
    {"reach", "miss", "missed", "missed", "misses", "missing"},
    {"reopen", "close", "closed", "closed", "closes", "closing"},
    {"restore", "damage", "damaged", "damaged", "damages", "damaging"},
    {"run", "abandon", "abandoned", "abandoned", "abandons", "abandoning"},
    {"stand", "fall", "fell", "fallen", "falls", "falling"},
    {"visit", "avoid", "avoided", "avoided", "avoids", "avoiding"},
    {"have", "lack", "lacked", "lacked", "lacks", "lacking"},
    {"be", "seem", "seemed", "seemed", "seems", "seeming"},
};

}  // namespace

std::string_view PerturbKindName(PerturbKind kind) {
  switch (kind) {
    case PerturbKind::kNegation:
      return "negation";
    case PerturbKind::kModality:
      return "modality";
    case PerturbKind::kFuture:
      return "future";
    case PerturbKind::kInfilling:
      return "infilling";
  }
  return "negation";
}

PerturbKind ParsePerturbKind(std::string_view name) {
  if (name == "negation") return PerturbKind::kNegation;
  if (name == "modality") return PerturbKind::kModality;
  if (name == "future") return PerturbKind::kFuture;
  if (name == "infilling") return PerturbKind::kInfilling;
  throw Error("unknown perturbation kind \"" + std::string(name) + "\"");
}

std::string_view SkipReasonName(SkipReason reason) {
  switch (reason) {
    case SkipReason::kNone:
      return "none";
    case SkipReason::kRootNotVerb:
      return "root-not-verb";
    case SkipReason::kNoAuxiliary:
      return "no-auxiliary";
    case SkipReason::kAuxiliaryConstruction:
      return "auxiliary-construction";
    case SkipReason::kNoRoot:
      return "no-root";
    case SkipReason::kUnalignedTokens:
      return "unaligned-tokens";
    case SkipReason::kNoInfill:
      return "no-infill";
    case SkipReason::kNoParse:
      return "no-parse";
  }
  return "none";
}

std::optional<std::string> FallbackInfill(std::string_view lemma, std::string_view xpos) {
  const std::string key = ToLowerAscii(lemma);
  for (const Antonym& a : kAntonyms) {
    if (a.lemma != key) continue;
    if (xpos == "VBD") return std::string(a.past);
    if (xpos == "VBN") return std::string(a.participle);
    if (xpos == "VBZ") return std::string(a.third);
    if (xpos == "VBG") return std::string(a.gerund);
    return std::string(a.base);
  }
  return std::nullopt;
}

SentenceRewrite PerturbSentence(const SentenceParse& parse, std::string_view sentence_text,
                                PerturbKind kind, Infiller* infiller) {
  const std::string original(sentence_text);
  const std::u32string text = DecodeUtf8(sentence_text);
  const auto spans = AlignTokens(text, parse.tokens);
  if (!spans) return Skipped(SkipReason::kUnalignedTokens, original, parse.tokens);
  const std::optional<size_t> root_index = parse.RootIndex();
  if (!root_index) return Skipped(SkipReason::kNoRoot, original, parse.tokens);
  const size_t root = *root_index;
  const Token& root_token = parse.tokens[root];
  if (!kVerbTags.count(root_token.xpos)) {
    return Skipped(SkipReason::kRootNotVerb, original, parse.tokens);
  }

  if (kind == PerturbKind::kInfilling) {
    std::u32string blanked = text.substr(0, (*spans)[root].first);
    const size_t blank_start = blanked.size();
    blanked += DecodeUtf8(kBlank);
    blanked += text.substr((*spans)[root].second);

    std::optional<std::string> fill;
    std::string producer;
    std::string fill_lemma;
    if (infiller != nullptr) {
      const std::optional<std::string> filled = infiller->Fill(EncodeUtf8(blanked));
      std::optional<std::string> middle;
      if (filled) middle = ExtractFill(blanked, blank_start, *filled);
      if (middle) {
        const std::string trimmed = Trim(*middle);
        if (!trimmed.empty() && trimmed.find(kBlank) == std::string::npos &&
            ToLowerAscii(trimmed) != ToLowerAscii(root_token.form)) {
          fill = trimmed;
          producer = infiller->Name();
        }
      }
      if (!fill) {
        LogWarning("infiller " + infiller->Name() + " failed on \"" + EncodeUtf8(blanked) +
                   "\"; using the fallback table");
      }
    }
    if (!fill) {
      fill = FallbackInfill(LemmaOf(root_token), root_token.xpos);
      if (!fill) return Skipped(SkipReason::kNoInfill, original, parse.tokens);
      producer = std::string(kFallbackInfiller);
      for (const Antonym& a : kAntonyms) {
        if (a.lemma == LemmaOf(root_token)) fill_lemma = std::string(a.base);
      }
    }
    const std::vector<std::string> pieces = SplitWhitespace(*fill);
    Rewrite r{root, root + 1, {}, 0};
    for (size_t k = 0; k < pieces.size(); ++k) {
      if (k == 0) {
        r.tokens.push_back({MakeToken(pieces[k], fill_lemma.empty() ? ToLowerAscii(pieces[k])
                                                                     : fill_lemma,
                                      root_token.xpos, ""),
                            0});
      } else {
        r.tokens.push_back({MakeToken(pieces[k], ToLowerAscii(pieces[k]), "", "dep"), 1});
      }
    }
    return Finish(parse, text, *spans, std::move(r), std::move(producer));
  }

  const std::string root_form = ToLowerAscii(root_token.form);
  const std::vector<size_t> auxes = AuxChildren(parse, root);

  if (kBeForms.count(root_form)) {
    return Finish(parse, text, *spans, RewriteBeRoot(root_token, root, kind),
                  std::string(kRulesInfiller));
  }
  if (root_token.xpos == "VBN" || root_token.xpos == "VBG") {
    for (size_t a : auxes) {
      if (IsModalOrDoSupport(parse.tokens[a])) {
        return Skipped(SkipReason::kAuxiliaryConstruction, original, parse.tokens);
      }
    }
    for (size_t a : auxes) {
      if (kParticipleAuxiliaries.count(ToLowerAscii(parse.tokens[a].form))) {
        return Finish(parse, text, *spans, RewriteAuxiliary(parse.tokens[a], a, kind),
                      std::string(kRulesInfiller));
      }
    }
    return Skipped(SkipReason::kNoAuxiliary, original, parse.tokens);
  }
  if (!auxes.empty()) {
    return Skipped(SkipReason::kAuxiliaryConstruction, original, parse.tokens);
  }
  return Finish(parse, text, *spans, RewriteFiniteVerb(root_token, root, kind),
                std::string(kRulesInfiller));
}

SentenceRewrite PerturbSentence(const SentenceParse& parse, PerturbKind kind,
                                Infiller* infiller) {
  std::string text;
  for (const Token& t : parse.tokens) {
    if (!text.empty()) text += ' ';
    text += t.form;
  }
  return PerturbSentence(parse, text, kind, infiller);
}

std::string_view CoverageClassName(CoverageClass c) {
  switch (c) {
    case CoverageClass::kNone:
      return "none";
    case CoverageClass::kPartial:
      return "partial";
    case CoverageClass::kFull:
      return "full";
  }
  return "none";
}

CoverageClass CoverageStats::Class() const {
  if (perturbed == 0) return CoverageClass::kNone;
  return skipped == 0 ? CoverageClass::kFull : CoverageClass::kPartial;
}

Json ToJson(const CoverageStats& stats) {
  return Json{{"qid", stats.qid},
              {"total", stats.total},
              {"perturbed", stats.perturbed},
              {"skipped", stats.skipped},
              {"skip_reasons", stats.skip_reasons},
              {"producers", stats.producers},
              {"coverage", std::string(CoverageClassName(stats.Class()))}};
}

SemanticResult PerturbEvidence(const EvidenceSet& evidence, const QuestionRecord& question,
                               PerturbKind kind, Infiller* infiller) {
  SemanticResult result;
  result.evidence.qid = evidence.qid;
  CoverageStats& stats = result.stats;
  stats.qid = question.qid;
  auto skip = [&stats](SkipReason reason) {
    ++stats.total;
    ++stats.skipped;
    ++stats.skip_reasons[std::string(SkipReasonName(reason))];
  };

  for (const Passage& passage : evidence.passages) {
    Passage out = passage;
    const std::vector<EntityMention> mentions =
        FindAnswerMentions(passage, question.answers, question.answer_type);
    if (mentions.empty()) {
      result.evidence.passages.push_back(std::move(out));
      continue;
    }
    const std::u32string text = DecodeUtf8(passage.text);
    std::vector<TextEdit> edits;
    std::vector<std::pair<size_t, std::vector<Token>>> new_tokens;
    std::vector<bool> covered(mentions.size(), false);

    for (size_t si = 0; si < passage.sentences.size(); ++si) {
      const SentenceParse& s = passage.sentences[si];
      bool holds_answer = false;
      for (size_t mi = 0; mi < mentions.size(); ++mi) {
        if (mentions[mi].start < s.end && s.start < mentions[mi].end) {
          holds_answer = true;
          covered[mi] = true;
        }
      }
      if (!holds_answer || s.end > text.size()) continue;
      const std::string sentence_text =
          EncodeUtf8(std::u32string_view(text).substr(s.start, s.end - s.start));
      SentenceRewrite rewrite = PerturbSentence(s, sentence_text, kind, infiller);
      if (!rewrite.perturbed) {
        skip(rewrite.reason);
        continue;
      }
      ++stats.total;
      ++stats.perturbed;
      ++stats.producers[rewrite.producer];
      edits.push_back(
          {s.start + rewrite.edit_start, s.start + rewrite.edit_end, rewrite.replacement, {}});
      new_tokens.emplace_back(si, std::move(rewrite.tokens));
    }
    for (bool c : covered) {
      if (!c) skip(SkipReason::kNoParse);
    }
    ApplyTextEdits(out, std::move(edits));
    for (auto& [si, tokens] : new_tokens) out.sentences[si].tokens = std::move(tokens);
    result.evidence.passages.push_back(std::move(out));
  }
  return result;
}

}  // namespace kconflict
