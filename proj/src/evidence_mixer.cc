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

#include "kconflict/evidence_mixer.h"

#include <algorithm>
#include <set>

#include "kconflict/calibrator.h"
#include "kconflict/entity_perturb.h"
#include "kconflict/error.h"
#include "kconflict/log.h"
#include "kconflict/metrics.h"
#include "kconflict/rng.h"
#include "kconflict/text.h"

namespace kconflict {

namespace {

bool ByScore(const Passage* x, const Passage* y) {
  if (x->retrieval_score != y->retrieval_score) return x->retrieval_score > y->retrieval_score;
  return x->pid < y->pid;
}

// Answer-containing passages first, each group by retrieval score.
std::vector<const Passage*> PreferenceOrder(const EvidenceSet& set,
                                            const std::vector<std::string>& answers,
                                            std::set<std::string>& containing) {
  std::vector<const Passage*> with, without;
  for (const Passage& p : set.passages) {
    if (ContainsAnswer(p.text, answers)) {
      with.push_back(&p);
      containing.insert(p.pid);
    } else {
      without.push_back(&p);
    }
  }
  std::sort(with.begin(), with.end(), ByScore);
  std::sort(without.begin(), without.end(), ByScore);
  with.insert(with.end(), without.begin(), without.end());
  return with;
}

}  // namespace

std::string_view ConflictSourceName(ConflictSource source) {
  switch (source) {
    case ConflictSource::kPartialSubstitution:
      return "partial_substitution";
    case ConflictSource::kAmbigQa:
      return "ambigqa_retrieval";
    case ConflictSource::kSituatedQa:
      return "situatedqa_two_corpora";
  }
  return "partial_substitution";
}

ConflictSource ParseConflictSource(std::string_view name) {
  if (name == "partial_substitution" || name == "partial-sub") {
    return ConflictSource::kPartialSubstitution;
  }
  if (name == "ambigqa" || name == "ambigqa_retrieval") return ConflictSource::kAmbigQa;
  if (name == "situatedqa" || name == "situatedqa_two_corpora") {
    return ConflictSource::kSituatedQa;
  }
  throw Error("unknown conflict source \"" + std::string(name) + "\"");
}

MixResult MixEvidence(const EvidenceSet& a, const std::vector<std::string>& answers_a,
                      const EvidenceSet& b, const std::vector<std::string>& answers_b,
                      size_t n) {
  if (n < 2) throw MixError("mixed evidence size must be at least 2");
  if (a.passages.empty() || b.passages.empty()) {
    throw MixError("cannot mix evidence for " + a.qid + ": a side is empty");
  }
  MixResult r;
  r.target_a = (n + 1) / 2;
  r.target_b = n / 2;

  std::set<std::string> contains_a, contains_b;
  const std::vector<const Passage*> order_a = PreferenceOrder(a, answers_a, contains_a);
  const std::vector<const Passage*> order_b = PreferenceOrder(b, answers_b, contains_b);
  size_t next_a = 0, next_b = 0;
  std::set<std::string> taken;
  std::vector<Passage> chosen;

  // Takes up to `want` passages from one side; returns how many were taken.
  auto take = [&](const std::vector<const Passage*>& order, size_t& next, size_t want,
                  const std::set<std::string>& containing, size_t& from, size_t& hits) {
    size_t got = 0;
    while (got < want && next < order.size()) {
      const Passage* p = order[next++];
      if (!taken.insert(p->pid).second) {
        ++r.duplicates;
        continue;
      }
      chosen.push_back(*p);
      ++got;
      ++from;
      if (containing.count(p->pid)) ++hits;
    }
    return got;
  };

  const size_t got_a = take(order_a, next_a, r.target_a, contains_a, r.from_a, r.containing_a);
  const size_t got_b = take(order_b, next_b, r.target_b, contains_b, r.from_b, r.containing_b);
  // Shortfalls move to whichever side still has passages.
  size_t missing = (r.target_a - got_a) + (r.target_b - got_b);
  missing -= take(order_b, next_b, missing, contains_b, r.from_b, r.containing_b);
  missing -= take(order_a, next_a, missing, contains_a, r.from_a, r.containing_a);
  if (missing > 0) {
    throw MixError("cannot mix evidence for " + a.qid + ": only " +
                   std::to_string(chosen.size()) + " distinct passages for N = " +
                   std::to_string(n));
  }

  std::sort(chosen.begin(), chosen.end(), [](const Passage& x, const Passage& y) {
    return ByScore(&x, &y);
  });
  r.evidence.qid = a.qid;
  for (size_t i = 0; i < chosen.size(); ++i) {
    chosen[i].qid = a.qid;
    chosen[i].rank = static_cast<int>(i + 1);
  }
  r.evidence.passages = std::move(chosen);
  return r;
}

Json AlternativesToJson(const std::string& qid,
                        const std::vector<AlternativeCandidate>& candidates) {
  Json list = Json::array();
  for (const AlternativeCandidate& c : candidates) {
    list.push_back({{"answer", c.answer}, {"date", c.date ? Json(*c.date) : Json(nullptr)}});
  }
  return Json{{"qid", qid}, {"candidates", list}};
}

std::map<std::string, std::vector<AlternativeCandidate>> LoadAlternatives(
    const std::filesystem::path& path) {
  std::map<std::string, std::vector<AlternativeCandidate>> out;
  size_t line = 0;
  for (const Json& j : ReadJsonl(path)) {
    ++line;
    try {
      std::vector<AlternativeCandidate>& list = out[j.at("qid").get<std::string>()];
      for (const Json& c : j.at("candidates")) {
        AlternativeCandidate candidate{c.at("answer").get<std::string>(), std::nullopt};
        if (c.contains("date") && !c["date"].is_null()) {
          candidate.date = c["date"].get<std::string>();
        }
        list.push_back(std::move(candidate));
      }
    } catch (const Json::exception& e) {
      throw DatasetError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

std::string SelectAlternativeAnswer(ConflictSource source,
                                    const std::vector<AlternativeCandidate>& candidates,
                                    const QuestionRecord& question, uint64_t seed,
                                    const EntityPool* pool) {
  if (source == ConflictSource::kPartialSubstitution) {
    if (pool == nullptr) throw MixError("partial substitution needs an entity pool");
    try {
      return SampleSubstitute(*pool, question.answer_type, question.answers,
                              DeriveSeed(seed, question.qid, "sample_substitute"));
    } catch (const SamplingError& e) {
      throw MixError(e.what());
    }
  }
  const std::vector<std::string> originals = NormalizeAliases(question.answers);
  std::vector<const AlternativeCandidate*> valid;
  for (const AlternativeCandidate& c : candidates) {
    const std::string norm = NormalizeAnswer(c.answer);
    if (norm.empty()) continue;
    if (std::binary_search(originals.begin(), originals.end(), norm)) continue;
    valid.push_back(&c);
  }
  if (source == ConflictSource::kAmbigQa) {
    if (valid.empty()) throw MixError("no valid alternative answer for " + question.qid);
    Rng rng(DeriveSeed(seed, question.qid, "select_alternative_answer"));
    return valid[rng.UniformIndex(valid.size())]->answer;
  }
  const AlternativeCandidate* latest = nullptr;
  for (const AlternativeCandidate* c : valid) {
    if (!c->date) continue;
    if (latest == nullptr || *c->date > *latest->date ||
        (*c->date == *latest->date && c->answer < latest->answer)) {
      latest = c;
    }
  }
  if (latest == nullptr) throw MixError("no dated alternative answer for " + question.qid);
  return latest->answer;
}

Json ConflictSummaryJson(const ConflictPair& pair) {
  std::vector<std::string> conflict_pids;
  for (const Passage& p : pair.conflict.passages) conflict_pids.push_back(p.pid);
  return Json{{"qid", pair.qid},
              {"original_answers", pair.original_answers},
              {"alternative_answers", pair.alternative_answers},
              {"provenance", std::string(ConflictSourceName(pair.provenance))},
              {"conflict_pids", conflict_pids}};
}

Json ToJson(const CalibrationRecord& record) {
  return Json{{"qid", record.qid},
              {"features", record.features},
              {"label", record.label},
              {"provenance", record.provenance}};
}

CalibrationRecord CalibrationRecordFromJson(const Json& j) {
  CalibrationRecord r;
  try {
    r.qid = j.at("qid").get<std::string>();
    r.features = j.at("features").get<std::vector<double>>();
    r.label = j.at("label").get<int>();
    r.provenance = j.value("provenance", std::string());
  } catch (const Json::exception& e) {
    throw DatasetError(std::string("calibration record: ") + e.what());
  }
  if (r.label != 0 && r.label != 1) {
    throw DatasetError("calibration record " + r.qid + ": label must be 0 or 1");
  }
  return r;
}

std::vector<CalibrationRecord> LoadCalibrationRecords(const std::filesystem::path& path) {
  std::vector<CalibrationRecord> out;
  size_t line = 0;
  for (const Json& j : ReadJsonl(path)) {
    ++line;
    try {
      out.push_back(CalibrationRecordFromJson(j));
    } catch (const DatasetError& e) {
      throw DatasetError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

void WriteCalibrationRecords(const std::filesystem::path& path,
                             const std::vector<CalibrationRecord>& records) {
  std::vector<Json> rows;
  for (const CalibrationRecord& r : records) rows.push_back(ToJson(r));
  WriteJsonl(path, rows);
}

std::vector<CalibrationRecord> PairPredictions(
    const std::vector<std::string>& qids,
    const std::map<std::string, PredictionRecord>& original,
    const std::map<std::string, PredictionRecord>& conflict, std::string_view provenance) {
  std::vector<CalibrationRecord> out;
  std::optional<size_t> dim;
  for (const std::string& qid : qids) {
    const auto o = original.find(qid);
    const auto c = conflict.find(qid);
    if (o == original.end() || c == conflict.end()) {
      LogWarning("dropping " + qid + ": missing " +
                 std::string(o == original.end() ? "original" : "conflict") + " prediction");
      continue;
    }
    CalibrationRecord answer{qid, AssembleFeatures(o->second.gen_prob, o->second.encoder_features, dim),
                             1, std::string(provenance)};
    dim = answer.features.size();
    CalibrationRecord abstain{
        qid, AssembleFeatures(c->second.gen_prob, c->second.encoder_features, dim), 0,
        std::string(provenance)};
    out.push_back(std::move(answer));
    out.push_back(std::move(abstain));
  }
  return out;
}

ConflictPairs BuildConflictPairs(const std::vector<QuestionRecord>& correct,
                                 const ConflictBuilder& builder, const Reader& reader) {
  ConflictPairs out;
  for (const QuestionRecord& q : correct) {
    ConflictPair pair;
    try {
      pair = builder(q);
    } catch (const Error& e) {
      LogWarning("dropping " + q.qid + ": " + e.what());
      out.dropped.push_back(q.qid);
      continue;
    }
    const std::map<std::string, PredictionRecord> original = {{q.qid, reader(q, pair.original)}};
    const std::map<std::string, PredictionRecord> conflict = {{q.qid, reader(q, pair.conflict)}};
    for (CalibrationRecord& r :
         PairPredictions({q.qid}, original, conflict, ConflictSourceName(pair.provenance))) {
      if (!out.records.empty() && r.features.size() != out.records[0].features.size()) {
        throw CalibrationError("feature dimension changes at " + q.qid);
      }
      out.records.push_back(std::move(r));
    }
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

}  // namespace kconflict
