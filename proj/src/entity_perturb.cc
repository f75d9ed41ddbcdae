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

#include "kconflict/entity_perturb.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "kconflict/error.h"
#include "kconflict/passage_edit.h"
#include "kconflict/rng.h"
#include "kconflict/text.h"

namespace kconflict {

namespace {

struct Candidate {
  const Passage* passage;
  size_t index;  // position in the evidence set
};

std::vector<Candidate> AnswerCandidates(const EvidenceSet& evidence,
                                        const std::vector<std::string>& answers) {
  std::vector<Candidate> out;
  for (size_t i = 0; i < evidence.passages.size(); ++i) {
    if (!FindAnswerMentions(evidence.passages[i], answers).empty()) {
      out.push_back({&evidence.passages[i], i});
    }
  }
  return out;
}

double AttentionOf(const Passage& p) {
  if (!p.attention_score) {
    throw SelectionError("passage " + p.pid + " has no attention_score");
  }
  return *p.attention_score;
}

// Candidates ordered by descending score, ties by ascending pid.
std::vector<Candidate> RankBy(std::vector<Candidate> candidates, bool attention) {
  std::vector<std::pair<double, Candidate>> keyed;
  for (const Candidate& c : candidates) {
    keyed.emplace_back(attention ? AttentionOf(*c.passage) : c.passage->retrieval_score, c);
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second.passage->pid < b.second.passage->pid;
  });
  std::vector<Candidate> out;
  for (const auto& [score, c] : keyed) out.push_back(c);
  return out;
}

}  // namespace

std::string_view StrategyName(SelectionStrategy strategy) {
  switch (strategy) {
    case SelectionStrategy::kRandom:
      return "random";
    case SelectionStrategy::kTopRetrieval:
      return "top-retrieval";
    case SelectionStrategy::kTopAttention:
      return "top-attention";
  }
  return "random";
}

SelectionStrategy ParseStrategy(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "random") return SelectionStrategy::kRandom;
  if (n == "top-retrieval") return SelectionStrategy::kTopRetrieval;
  if (n == "top-attention") return SelectionStrategy::kTopAttention;
  throw SelectionError("unknown selection strategy \"" + std::string(name) + "\"");
}

std::string DescribeAmount(const SelectionAmount& amount) {
  std::ostringstream out;
  if (const auto* f = std::get_if<FractionAmount>(&amount)) {
    out << "fraction:" << f->fraction;
  } else if (const auto* k = std::get_if<AllExceptTopK>(&amount)) {
    out << "all-except-top-k:" << k->k;
  } else {
    out << "count:" << std::get<TopCount>(amount).count;
  }
  return out.str();
}

void ValidatePlan(const SubstitutionPlan& plan) {
  if (const auto* f = std::get_if<FractionAmount>(&plan.amount)) {
    if (!(f->fraction > 0.0 && f->fraction <= 1.0)) {
      throw SelectionError("fraction must be in (0, 1]");
    }
  } else if (const auto* k = std::get_if<AllExceptTopK>(&plan.amount)) {
    if (k->k < 1) throw SelectionError("all-except-top-k requires k >= 1");
  } else if (std::get<TopCount>(plan.amount).count < 1) {
    throw SelectionError("count must be >= 1");
  }
  if (const auto* fixed = std::get_if<FixedSubstitute>(&plan.substitute)) {
    if (NormalizeAnswer(fixed->value).empty()) {
      throw SelectionError("fixed substitute is empty after normalization");
    }
  }
}

size_t SelectionCount(double fraction, size_t candidates) {
  if (candidates == 0 || !(fraction > 0.0)) return 0;
  const double scaled = fraction * static_cast<double>(candidates);
  auto count = static_cast<size_t>(std::floor(scaled + 0.5 + 1e-9));
  return std::clamp<size_t>(count, 1, candidates);
}

std::vector<std::string> SelectTargetPassages(const EvidenceSet& evidence,
                                              const std::vector<std::string>& answers,
                                              const SubstitutionPlan& plan) {
  ValidatePlan(plan);
  const std::vector<Candidate> candidates = AnswerCandidates(evidence, answers);
  if (candidates.empty()) return {};

  std::vector<Candidate> chosen;
  if (const auto* k = std::get_if<AllExceptTopK>(&plan.amount)) {
    const std::vector<Candidate> ranked = RankBy(candidates, /*attention=*/true);
    const size_t keep = std::min<size_t>(static_cast<size_t>(k->k), ranked.size());
    chosen.assign(ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end());
  } else {
    size_t count;
    if (const auto* f = std::get_if<FractionAmount>(&plan.amount)) {
      count = SelectionCount(f->fraction, candidates.size());
    } else {
      count = std::min<size_t>(static_cast<size_t>(std::get<TopCount>(plan.amount).count),
                               candidates.size());
    }
    switch (plan.strategy) {
      case SelectionStrategy::kRandom: {
        Rng rng(DeriveSeed(plan.seed, evidence.qid, "select_target_passages"));
        for (size_t i : rng.SampleWithoutReplacement(candidates.size(), count)) {
          chosen.push_back(candidates[i]);
        }
        break;
      }
      case SelectionStrategy::kTopRetrieval:
      case SelectionStrategy::kTopAttention: {
        const std::vector<Candidate> ranked =
            RankBy(candidates, plan.strategy == SelectionStrategy::kTopAttention);
        chosen.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(count));
        break;
      }
    }
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const Candidate& a, const Candidate& b) { return a.index < b.index; });
  std::vector<std::string> pids;
  for (const Candidate& c : chosen) pids.push_back(c.passage->pid);
  return pids;
}

std::string SampleSubstitute(const EntityPool& pool, EntityType type,
                             const std::vector<std::string>& exclude, uint64_t seed) {
  const std::vector<std::string> excluded = NormalizeAliases(exclude);
  std::vector<const std::string*> admissible;
  for (const std::string& value : pool.Entries(type)) {
    const std::string norm = NormalizeAnswer(value);
    if (norm.empty() || std::binary_search(excluded.begin(), excluded.end(), norm)) continue;
    admissible.push_back(&value);
  }
  if (admissible.empty()) {
    throw SamplingError("entity pool for type " + std::string(EntityTypeName(type)) +
                        " is exhausted after exclusion");
  }
  Rng rng(seed);
  return *admissible[rng.UniformIndex(admissible.size())];
}

Json ToJson(const PerturbationRecord& record) {
  Json passages = Json::array();
  for (const PassageChange& c : record.passages) {
    passages.push_back(
        {{"pid", c.pid}, {"selected", c.selected}, {"mentions_replaced", c.mentions_replaced}});
  }
  return Json{{"qid", record.qid},
              {"substitute", record.substitute},
              {"strategy", record.strategy},
              {"amount", record.amount},
              {"passages", std::move(passages)},
              {"answer_passages_before", record.answer_passages_before},
              {"answer_passages_after", record.answer_passages_after}};
}

PerturbationRecord PerturbationRecordFromJson(const Json& j) {
  try {
    PerturbationRecord r;
    r.qid = j.at("qid").get<std::string>();
    r.substitute = j.at("substitute").get<std::string>();
    r.strategy = j.value("strategy", "");
    r.amount = j.value("amount", "");
    for (const Json& c : j.at("passages")) {
      r.passages.push_back({c.at("pid").get<std::string>(), c.at("selected").get<bool>(),
                            c.at("mentions_replaced").get<size_t>()});
    }
    r.answer_passages_before = j.at("answer_passages_before").get<size_t>();
    r.answer_passages_after = j.at("answer_passages_after").get<size_t>();
    return r;
  } catch (const Json::exception& e) {
    throw DatasetError(std::string("bad perturbation record: ") + e.what());
  }
}

SubstitutionResult Substitute(const EvidenceSet& evidence, const QuestionRecord& question,
                              const SubstitutionPlan& plan, const EntityPool* pool) {
  ValidatePlan(plan);
  std::string substitute;
  if (const auto* fixed = std::get_if<FixedSubstitute>(&plan.substitute)) {
    const std::vector<std::string> original = NormalizeAliases(question.answers);
    if (std::binary_search(original.begin(), original.end(), NormalizeAnswer(fixed->value))) {
      throw SelectionError("fixed substitute \"" + fixed->value +
                           "\" is one of the original answers of " + question.qid);
    }
    substitute = fixed->value;
  } else {
    if (pool == nullptr) throw SelectionError("pool substitution requested without a pool");
    substitute = SampleSubstitute(*pool, question.answer_type, question.answers,
                                  DeriveSeed(plan.seed, question.qid, "sample_substitute"));
  }

  const std::vector<std::string> targets =
      SelectTargetPassages(evidence, question.answers, plan);
  const std::set<std::string> selected(targets.begin(), targets.end());

  SubstitutionResult result;
  result.evidence.qid = evidence.qid;
  PerturbationRecord& record = result.record;
  record.qid = question.qid;
  record.substitute = substitute;
  record.strategy = std::string(StrategyName(plan.strategy));
  record.amount = DescribeAmount(plan.amount);

  for (const Passage& passage : evidence.passages) {
    const std::vector<EntityMention> mentions =
        FindAnswerMentions(passage, question.answers, question.answer_type);
    if (!mentions.empty()) ++record.answer_passages_before;
    PassageChange change{passage.pid, selected.count(passage.pid) > 0, 0};
    Passage out = passage;
    if (change.selected) {
      std::vector<TextEdit> edits;
      for (const EntityMention& m : mentions) {
        edits.push_back({m.start, m.end, substitute, m.type});
      }
      ApplyEditsWithRetokenization(out, std::move(edits));
      change.mentions_replaced = mentions.size();
    }
    if (!FindAnswerMentions(out, question.answers).empty()) ++record.answer_passages_after;
    record.passages.push_back(std::move(change));
    result.evidence.passages.push_back(std::move(out));
  }
  return result;
}

}  // namespace kconflict
