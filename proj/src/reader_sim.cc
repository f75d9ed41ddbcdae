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

#include "kconflict/reader_sim.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "kconflict/error.h"
#include "kconflict/text.h"

namespace kconflict {

namespace {

double ScoreOf(const Passage& p, ScoreSource source) {
  double s = p.retrieval_score;
  if (source == ScoreSource::kAttention) {
    if (!p.attention_score) {
      throw Error("reader_sim: passage " + p.pid + " has no attention_score");
    }
    s = *p.attention_score;
  }
  if (!(s >= 0) || !std::isfinite(s)) {
    throw Error("reader_sim: passage " + p.pid + " has a negative or non-finite score");
  }
  return s;
}

struct Candidate {
  std::string surface;
  double score = 0.0;
};

}  // namespace

std::string_view ScoreSourceName(ScoreSource source) {
  return source == ScoreSource::kAttention ? "attention" : "retrieval";
}

ScoreSource ParseScoreSource(std::string_view name) {
  if (name == "attention") return ScoreSource::kAttention;
  if (name == "retrieval") return ScoreSource::kRetrieval;
  throw Error("unknown score source \"" + std::string(name) + "\"");
}

void ValidateReaderSimConfig(const ReaderSimConfig& config) {
  if (config.focus_k < 1) throw Error("reader_sim: focus_k must be >= 1");
  if (!(config.memory_bias >= 0) || !std::isfinite(config.memory_bias)) {
    throw Error("reader_sim: memory_bias must be a finite value >= 0");
  }
}

Json ToJson(const ReaderSimConfig& config) {
  return Json{{"memory", config.memory},
              {"memorize_gold", config.memorize_gold},
              {"memory_bias", config.memory_bias},
              {"focus_k", config.focus_k},
              {"score_source", std::string(ScoreSourceName(config.score_source))},
              {"seed", config.seed}};
}

ReaderSimConfig ReaderSimConfigFromJson(const Json& j) {
  ReaderSimConfig c;
  try {
    if (j.contains("memory")) c.memory = j["memory"].get<std::map<std::string, std::string>>();
    c.memorize_gold = j.value("memorize_gold", c.memorize_gold);
    c.memory_bias = j.value("memory_bias", c.memory_bias);
    c.focus_k = j.value("focus_k", c.focus_k);
    if (j.contains("score_source")) {
      c.score_source = ParseScoreSource(j["score_source"].get<std::string>());
    }
    c.seed = j.value("seed", c.seed);
  } catch (const Json::exception& e) {
    throw Error(std::string("reader_sim config: ") + e.what());
  }
  ValidateReaderSimConfig(c);
  return c;
}

PredictionRecord Simulate(const QuestionRecord& question, const EvidenceSet& evidence,
                          const ReaderSimConfig& config) {
  ValidateReaderSimConfig(config);
  if (evidence.passages.empty()) throw Error("reader_sim: empty evidence for " + question.qid);

  std::vector<std::pair<double, const Passage*>> ranked;
  for (const Passage& p : evidence.passages) ranked.emplace_back(ScoreOf(p, config.score_source), &p);
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second->pid < y.second->pid;
  });
  ranked.resize(std::min(ranked.size(), static_cast<size_t>(config.focus_k)));

  // Keyed by normalized text.
  std::map<std::string, Candidate> candidates;
  for (const auto& [score, passage] : ranked) {
    std::set<std::string> seen_here;
    for (const EntityMention& m : passage->mentions) {
      if (m.type != question.answer_type) continue;
      const std::string surface = MentionText(*passage, m);
      const std::string key = NormalizeAnswer(surface);
      if (key.empty()) continue;
      auto [it, inserted] = candidates.try_emplace(key, Candidate{surface, 0.0});
      if (!inserted && surface < it->second.surface) it->second.surface = surface;
      if (seen_here.insert(key).second) it->second.score += score;
    }
  }

  std::optional<std::string> memory;
  if (const auto it = config.memory.find(question.qid); it != config.memory.end()) {
    memory = it->second;
  } else if (config.memorize_gold && !question.answers.empty()) {
    memory = question.answers.front();
  }
  const std::string memory_key = memory ? NormalizeAnswer(*memory) : std::string();
  if (memory && !memory_key.empty() && config.memory_bias > 0) {
    auto [it, inserted] =
        candidates.try_emplace(memory_key, Candidate{*memory, 0.0});
    it->second.score += config.memory_bias;
  }

  PredictionRecord out;
  out.qid = question.qid;
  if (candidates.empty()) {
    out.prediction = memory.value_or("");
    out.gen_prob = memory ? 1.0 : 0.0;
    out.encoder_features = std::vector<double>{0.0, 0.0, 0.0, memory ? 1.0 : 0.0};
    return out;
  }

  std::vector<const Candidate*> order;
  double total = 0;
  for (const auto& [key, c] : candidates) {
    order.push_back(&c);
    total += c.score;
  }
  std::sort(order.begin(), order.end(), [](const Candidate* x, const Candidate* y) {
    return x->score != y->score ? x->score > y->score : x->surface < y->surface;
  });
  const double count = static_cast<double>(order.size());
  auto share = [&](const Candidate* c) { return total > 0 ? c->score / total : 1.0 / count; };

  out.prediction = order[0]->surface;
  out.gen_prob = order.size() == 1 ? 1.0 : share(order[0]);
  const bool agrees = memory && NormalizeAnswer(out.prediction) == memory_key;
  out.encoder_features = std::vector<double>{count, out.gen_prob,
                                             order.size() > 1 ? share(order[1]) : 0.0,
                                             agrees ? 1.0 : 0.0};
  return out;
}

}  // namespace kconflict
