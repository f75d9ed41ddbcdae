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

#include "kconflict/pipeline.h"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <set>
#include <thread>

#include "kconflict/error.h"
#include "kconflict/evidence_mixer.h"
#include "kconflict/log.h"
#include "kconflict/metrics.h"
#include "kconflict/rng.h"
#include "kconflict/text.h"

namespace kconflict {

namespace {

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "kconflict-XXXXXX").string();
    if (mkdtemp(pattern.data()) == nullptr) throw ExternalToolError("cannot create a temp dir");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

double Percent(size_t num, size_t den) {
  return den == 0 ? 0.0 : RoundPercent(static_cast<double>(num) / static_cast<double>(den));
}

std::vector<EvidenceSet> EvidenceFor(const std::vector<QuestionRecord>& questions,
                                     const std::map<std::string, EvidenceSet>& evidence) {
  std::vector<EvidenceSet> out;
  for (const QuestionRecord& q : questions) {
    const auto it = evidence.find(q.qid);
    if (it == evidence.end()) throw DatasetError("no evidence for question " + q.qid);
    out.push_back(it->second);
  }
  return out;
}

bool HasAnswerPassage(const QuestionRecord& q, const EvidenceSet& evidence) {
  for (const Passage& p : evidence.passages) {
    if (!FindAnswerMentions(p, q.answers, q.answer_type).empty()) return true;
  }
  return false;
}

template <typename T, typename F>
std::vector<T> ParseList(const Json& j, const char* key, std::vector<T> fallback, F parse) {
  if (!j.contains(key)) return fallback;
  std::vector<T> out;
  for (const Json& v : j.at(key)) out.push_back(parse(v));
  return out;
}

Json StudyCellJson(const StudyCell& c) {
  return Json{{"strategy", c.strategy},
              {"amount", c.amount},
              {"n", c.n},
              {"em_original", c.em_original},
              {"em_substitute", c.em_substitute},
              {"memorization_ratio",
               c.memorization_ratio ? Json(*c.memorization_ratio) : Json(nullptr)},
              {"flip_rate", c.flip_rate},
              {"confidence_dropped",
               c.confidence_dropped ? Json(*c.confidence_dropped) : Json(nullptr)}};
}

Json OptionalJson(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

SimReader::SimReader(ReaderSimConfig config) : config_(std::move(config)) {
  ValidateReaderSimConfig(config_);
}

std::map<std::string, PredictionRecord> SimReader::Predict(
    const std::vector<QuestionRecord>& questions, const std::vector<EvidenceSet>& evidence) {
  if (questions.size() != evidence.size()) throw Error("questions and evidence differ in length");
  std::vector<PredictionRecord> slots(questions.size());
  const size_t workers = std::clamp<size_t>(std::thread::hardware_concurrency(), 1, 8);
  const size_t chunk = (questions.size() + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (size_t w = 0; w < workers && w * chunk < questions.size(); ++w) {
    threads.emplace_back([&, w] {
      try {
        const size_t end = std::min(questions.size(), (w + 1) * chunk);
        for (size_t i = w * chunk; i < end; ++i) slots[i] = Simulate(questions[i], evidence[i], config_);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::map<std::string, PredictionRecord> out;
  for (size_t i = 0; i < questions.size(); ++i) out[questions[i].qid] = std::move(slots[i]);
  return out;
}

Json SimReader::Describe() const {
  Json j = ToJson(config_);
  j["type"] = "sim";
  return j;
}

CommandReader::CommandReader(std::string command) : command_(std::move(command)) {}

std::map<std::string, PredictionRecord> CommandReader::Predict(
    const std::vector<QuestionRecord>& questions, const std::vector<EvidenceSet>& evidence) {
  TempDir dir;
  const auto questions_path = dir.path() / "questions.jsonl";
  const auto passages_path = dir.path() / "passages.jsonl";
  const auto predictions_path = dir.path() / "predictions.jsonl";
  WriteQuestions(questions_path, questions);
  WriteEvidence(passages_path, evidence);
  const std::string shell = "KCONFLICT_QUESTIONS=" + ShellQuote(questions_path.string()) +
                            " /bin/sh -c " + ShellQuote(command_) + " < " +
                            ShellQuote(passages_path.string()) + " > " +
                            ShellQuote(predictions_path.string());
  std::fflush(nullptr);
  const int status = std::system(shell.c_str());
  if (status != 0) {
    throw ExternalToolError("reader command failed (status " + std::to_string(status) +
                            "): " + command_);
  }
  std::map<std::string, PredictionRecord> out;
  try {
    for (PredictionRecord& p : LoadPredictions(predictions_path)) {
      const std::string qid = p.qid;
      out[qid] = std::move(p);
    }
  } catch (const DatasetError& e) {
    throw ExternalToolError(std::string("reader command output: ") + e.what());
  }
  for (const QuestionRecord& q : questions) {
    if (!out.count(q.qid)) throw ExternalToolError("reader command gave no prediction for " + q.qid);
  }
  return out;
}

Json CommandReader::Describe() const { return Json{{"type", "command"}, {"command", command_}}; }

std::unique_ptr<ReaderBackend> MakeReader(const Json& config) {
  const std::string type = config.value("type", std::string("sim"));
  if (type == "sim") return std::make_unique<SimReader>(ReaderSimConfigFromJson(config));
  if (type == "command") {
    if (!config.contains("command")) throw Error("command reader needs \"command\"");
    return std::make_unique<CommandReader>(config.at("command").get<std::string>());
  }
  throw Error("unknown reader type \"" + type + "\"");
}

std::string ConfigHash(const Json& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(config.dump())));
  return buf;
}

std::vector<QuestionRecord> CorrectlyAnswered(const std::vector<QuestionRecord>& questions,
                                              const std::map<std::string, PredictionRecord>& preds) {
  std::vector<QuestionRecord> out;
  for (const QuestionRecord& q : questions) {
    const auto it = preds.find(q.qid);
    if (it != preds.end() && ExactMatch(it->second.prediction, q.answers)) out.push_back(q);
  }
  return out;
}

// ---------------------------------------------------------------------------

Json ToJson(const EntityStudyConfig& c) {
  std::vector<std::string> strategies;
  for (SelectionStrategy s : c.strategies) strategies.emplace_back(StrategyName(s));
  return Json{{"questions", c.questions.string()},
              {"passages", c.passages.string()},
              {"train_questions", c.train_questions.string()},
              {"seed", c.seed},
              {"strategies", strategies},
              {"fractions", c.fractions},
              {"all_except_top_k", c.all_except_top_k},
              {"top_counts", c.top_counts},
              {"reader", c.reader}};
}

EntityStudyConfig EntityStudyConfigFromJson(const Json& j) {
  EntityStudyConfig c;
  try {
    c.questions = j.value("questions", std::string());
    c.passages = j.value("passages", std::string());
    c.train_questions = j.value("train_questions", std::string());
    c.seed = j.value("seed", c.seed);
    c.strategies = ParseList(j, "strategies", c.strategies, [](const Json& v) {
      return ParseStrategy(v.get<std::string>());
    });
    c.fractions = j.value("fractions", c.fractions);
    c.all_except_top_k = j.value("all_except_top_k", c.all_except_top_k);
    c.top_counts = j.value("top_counts", c.top_counts);
    if (j.contains("reader")) c.reader = j.at("reader");
  } catch (const Json::exception& e) {
    throw Error(std::string("entity-study config: ") + e.what());
  }
  return c;
}

EntityStudyResult RunEntityStudy(const EntityStudyConfig& config) {
  const std::vector<QuestionRecord> questions = LoadQuestions(config.questions);
  const std::map<std::string, EvidenceSet> evidence = LoadEvidence(config.passages);
  const EntityPool pool = BuildEntityPool(LoadQuestions(config.train_questions));
  std::unique_ptr<ReaderBackend> reader = MakeReader(config.reader);

  EntityStudyResult result;
  result.config_hash = ConfigHash(ToJson(config));
  result.seed = config.seed;
  result.questions = questions.size();
  result.baseline = reader->Predict(questions, EvidenceFor(questions, evidence));

  std::vector<QuestionRecord> eligible;
  for (const QuestionRecord& q : CorrectlyAnswered(questions, result.baseline)) {
    if (q.answer_type == EntityType::kOther) continue;
    if (!HasAnswerPassage(q, evidence.at(q.qid))) continue;
    eligible.push_back(q);
  }
  result.eligible = eligible.size();
  if (eligible.empty()) throw Error("entity study: no eligible questions");

  auto run_cell = [&](SelectionStrategy strategy, SelectionAmount amount) {
    SubstitutionPlan plan{strategy, amount, PoolSubstitute{}, config.seed};
    ValidatePlan(plan);
    std::vector<EvidenceSet> perturbed;
    std::map<std::string, std::string> substitutes;
    for (const QuestionRecord& q : eligible) {
      SubstitutionResult r = Substitute(evidence.at(q.qid), q, plan, &pool);
      substitutes[q.qid] = r.record.substitute;
      perturbed.push_back(std::move(r.evidence));
    }
    if (result.substitutes.empty()) result.substitutes = substitutes;

    StudyCell cell;
    cell.strategy = std::string(StrategyName(strategy));
    cell.amount = DescribeAmount(amount);
    cell.n = eligible.size();
    cell.predictions = reader->Predict(eligible, perturbed);
    size_t original = 0, substitute = 0, flipped = 0;
    std::vector<ConfidencePair> pairs;
    for (const QuestionRecord& q : eligible) {
      const PredictionRecord& now = cell.predictions.at(q.qid);
      const PredictionRecord& before = result.baseline.at(q.qid);
      if (ExactMatch(now.prediction, q.answers)) ++original;
      if (ExactMatch(now.prediction, {substitutes.at(q.qid)})) ++substitute;
      if (NormalizeAnswer(now.prediction) != NormalizeAnswer(before.prediction)) ++flipped;
      pairs.push_back({q.qid, before.gen_prob, now.gen_prob, ConfidenceKind::kGenProb});
    }
    cell.em_original = Percent(original, cell.n);
    cell.em_substitute = Percent(substitute, cell.n);
    if (original + substitute > 0) {
      cell.memorization_ratio = RoundPercent(
          MemorizationRatio(static_cast<double>(original), static_cast<double>(substitute)));
    }
    cell.flip_rate = Percent(flipped, cell.n);
    try {
      cell.confidence_dropped = RoundPercent(ComputeConfidenceDrop(pairs).fraction_dropped);
    } catch (const UndefinedMetricError&) {
    }
    return cell;
  };

  for (SelectionStrategy s : config.strategies) {
    for (double f : config.fractions) result.cells.push_back(run_cell(s, FractionAmount{f}));
  }
  for (int k : config.all_except_top_k) {
    result.all_except_top_k.push_back(run_cell(SelectionStrategy::kTopAttention, AllExceptTopK{k}));
  }
  for (int k : config.top_counts) {
    result.top_counts.push_back(run_cell(SelectionStrategy::kTopAttention, TopCount{k}));
  }
  return result;
}

Json ToJson(const EntityStudyResult& r) {
  Json cells = Json::array(), except = Json::array(), counts = Json::array();
  for (const StudyCell& c : r.cells) cells.push_back(StudyCellJson(c));
  for (const StudyCell& c : r.all_except_top_k) except.push_back(StudyCellJson(c));
  for (const StudyCell& c : r.top_counts) counts.push_back(StudyCellJson(c));
  return Json{{"config_hash", r.config_hash}, {"seed", r.seed},
              {"questions", r.questions},     {"eligible", r.eligible},
              {"cells", cells},               {"all_except_top_k", except},
              {"top_counts", counts}};
}

// ---------------------------------------------------------------------------

Json ToJson(const SemanticStudyConfig& c) {
  std::vector<std::string> kinds;
  for (PerturbKind k : c.kinds) kinds.emplace_back(PerturbKindName(k));
  return Json{{"questions", c.questions.string()},
              {"passages", c.passages.string()},
              {"kinds", kinds},
              {"infiller", c.infiller},
              {"infiller_timeout_ms", c.infiller_timeout_ms},
              {"reader", c.reader}};
}

SemanticStudyConfig SemanticStudyConfigFromJson(const Json& j) {
  SemanticStudyConfig c;
  try {
    c.questions = j.value("questions", std::string());
    c.passages = j.value("passages", std::string());
    c.kinds = ParseList(j, "kinds", c.kinds, [](const Json& v) {
      return ParsePerturbKind(v.get<std::string>());
    });
    c.infiller = j.value("infiller", c.infiller);
    c.infiller_timeout_ms = j.value("infiller_timeout_ms", c.infiller_timeout_ms);
    if (j.contains("reader")) c.reader = j.at("reader");
  } catch (const Json::exception& e) {
    throw Error(std::string("semantic-study config: ") + e.what());
  }
  return c;
}

SemanticStudyResult RunSemanticStudy(const SemanticStudyConfig& config) {
  const std::vector<QuestionRecord> questions = LoadQuestions(config.questions);
  const std::map<std::string, EvidenceSet> evidence = LoadEvidence(config.passages);
  std::unique_ptr<ReaderBackend> reader = MakeReader(config.reader);
  std::unique_ptr<Infiller> infiller;
  if (!config.infiller.empty()) infiller = MakeInfiller(config.infiller, config.infiller_timeout_ms);

  SemanticStudyResult result;
  result.config_hash = ConfigHash(ToJson(config));
  result.questions = questions.size();
  const auto baseline = reader->Predict(questions, EvidenceFor(questions, evidence));
  const std::vector<QuestionRecord> correct = CorrectlyAnswered(questions, baseline);

  for (PerturbKind kind : config.kinds) {
    SemanticKindResult k;
    k.kind = std::string(PerturbKindName(kind));
    k.eligible = correct.size();
    std::vector<QuestionRecord> valid;
    std::vector<EvidenceSet> perturbed;
    std::set<std::string> full;
    for (const QuestionRecord& q : correct) {
      SemanticResult r = PerturbEvidence(evidence.at(q.qid), q, kind,
                                         kind == PerturbKind::kInfilling ? infiller.get() : nullptr);
      for (const auto& [reason, n] : r.stats.skip_reasons) k.skip_reasons[reason] += n;
      for (const auto& [producer, n] : r.stats.producers) k.producers[producer] += n;
      if (r.stats.perturbed == 0) continue;
      k.sentences += r.stats.total;
      k.sentences_perturbed += r.stats.perturbed;
      if (r.stats.Class() == CoverageClass::kFull) full.insert(q.qid);
      valid.push_back(q);
      perturbed.push_back(std::move(r.evidence));
    }
    k.valid = valid.size();
    k.full = full.size();
    if (!valid.empty()) {
      const auto preds = reader->Predict(valid, perturbed);
      size_t partial_hits = 0, full_hits = 0;
      for (const QuestionRecord& q : valid) {
        const bool hit = ExactMatch(preds.at(q.qid).prediction, q.answers);
        if (hit) ++partial_hits;
        if (hit && full.count(q.qid)) ++full_hits;
      }
      k.em_partial = Percent(partial_hits, valid.size());
      if (!full.empty()) k.em_full = Percent(full_hits, full.size());
    }
    result.kinds.push_back(std::move(k));
  }
  return result;
}

Json ToJson(const SemanticStudyResult& r) {
  Json kinds = Json::array();
  for (const SemanticKindResult& k : r.kinds) {
    kinds.push_back({{"kind", k.kind},
                     {"eligible", k.eligible},
                     {"valid", k.valid},
                     {"full", k.full},
                     {"valid_percent", Percent(k.valid, k.eligible)},
                     {"sentence_coverage_percent", Percent(k.sentences_perturbed, k.sentences)},
                     {"full_percent", Percent(k.full, k.eligible)},
                     {"em_partial_coverage", OptionalJson(k.em_partial)},
                     {"em_full_coverage", OptionalJson(k.em_full)},
                     {"skip_reasons", k.skip_reasons},
                     {"producers", k.producers}});
  }
  return Json{{"config_hash", r.config_hash}, {"questions", r.questions}, {"kinds", kinds}};
}

// ---------------------------------------------------------------------------

Json ToJson(const ConflictCalibrationConfig& c) {
  return Json{{"questions", c.questions.string()},
              {"passages", c.passages.string()},
              {"train_questions", c.train_questions.string()},
              {"alt_passages", c.alt_passages.string()},
              {"alternatives", c.alternatives.string()},
              {"sources", c.sources},
              {"mix_n", c.mix_n},
              {"partial_fraction", c.partial_fraction},
              {"eval_fraction", c.eval_fraction},
              {"threshold", c.threshold},
              {"seed", c.seed},
              {"gbdt",
               {{"rounds", c.gbdt.rounds},
                {"learning_rate", c.gbdt.learning_rate},
                {"subsample", c.gbdt.subsample},
                {"max_depth", c.gbdt.max_depth},
                {"l2_leaf_reg", c.gbdt.l2_leaf_reg},
                {"min_child_weight", c.gbdt.min_child_weight}}},
              {"reader", c.reader}};
}

ConflictCalibrationConfig ConflictCalibrationConfigFromJson(const Json& j) {
  ConflictCalibrationConfig c;
  try {
    c.questions = j.value("questions", std::string());
    c.passages = j.value("passages", std::string());
    c.train_questions = j.value("train_questions", std::string());
    c.alt_passages = j.value("alt_passages", std::string());
    c.alternatives = j.value("alternatives", std::string());
    c.sources = j.value("sources", c.sources);
    c.mix_n = j.value("mix_n", c.mix_n);
    c.partial_fraction = j.value("partial_fraction", c.partial_fraction);
    c.eval_fraction = j.value("eval_fraction", c.eval_fraction);
    c.threshold = j.value("threshold", c.threshold);
    c.seed = j.value("seed", c.seed);
    if (j.contains("gbdt")) {
      const Json& g = j.at("gbdt");
      c.gbdt.rounds = g.value("rounds", c.gbdt.rounds);
      c.gbdt.learning_rate = g.value("learning_rate", c.gbdt.learning_rate);
      c.gbdt.subsample = g.value("subsample", c.gbdt.subsample);
      c.gbdt.max_depth = g.value("max_depth", c.gbdt.max_depth);
      c.gbdt.l2_leaf_reg = g.value("l2_leaf_reg", c.gbdt.l2_leaf_reg);
      c.gbdt.min_child_weight = g.value("min_child_weight", c.gbdt.min_child_weight);
    }
    if (j.contains("reader")) c.reader = j.at("reader");
  } catch (const Json::exception& e) {
    throw Error(std::string("conflict-calibration config: ") + e.what());
  }
  return c;
}

ConflictCalibrationResult RunConflictCalibration(const ConflictCalibrationConfig& config) {
  const std::vector<QuestionRecord> questions = LoadQuestions(config.questions);
  const std::map<std::string, EvidenceSet> evidence = LoadEvidence(config.passages);
  std::unique_ptr<ReaderBackend> reader = MakeReader(config.reader);
  std::vector<ConflictSource> sources;
  for (const std::string& s : config.sources) sources.push_back(ParseConflictSource(s));
  if (sources.empty()) throw Error("conflict calibration needs at least one source");

  EntityPool pool;
  std::map<std::string, EvidenceSet> alt_evidence;
  std::map<std::string, std::vector<AlternativeCandidate>> alternatives;
  for (ConflictSource s : sources) {
    if (s == ConflictSource::kPartialSubstitution && pool.size() == 0) {
      pool = BuildEntityPool(LoadQuestions(config.train_questions));
    }
    if (s != ConflictSource::kPartialSubstitution && alt_evidence.empty()) {
      alt_evidence = LoadEvidence(config.alt_passages);
      alternatives = LoadAlternatives(config.alternatives);
    }
  }

  ConflictCalibrationResult result;
  result.config_hash = ConfigHash(ToJson(config));
  result.seed = config.seed;
  const auto baseline = reader->Predict(questions, EvidenceFor(questions, evidence));
  const std::vector<QuestionRecord> correct = CorrectlyAnswered(questions, baseline);
  result.correct = correct.size();

  std::vector<std::string> order;
  for (const QuestionRecord& q : correct) order.push_back(q.qid);
  Rng split_rng(DeriveSeed(config.seed, "", "eval_split"));
  split_rng.Shuffle(order);
  const auto eval_count = static_cast<size_t>(
      std::floor(config.eval_fraction * static_cast<double>(order.size()) + 0.5));
  const std::set<std::string> eval_qids(order.begin(), order.begin() + static_cast<long>(
                                                                           std::min(eval_count, order.size())));

  std::vector<std::vector<CalibrationExample>> train_sets, eval_sets;
  CalibrationMatrix& m = result.matrix;
  for (ConflictSource source : sources) {
    const std::string name(ConflictSourceName(source));
    std::vector<QuestionRecord> kept;
    std::vector<EvidenceSet> conflicts;
    for (const QuestionRecord& q : correct) {
      try {
        if (source == ConflictSource::kPartialSubstitution) {
          SubstitutionPlan plan{SelectionStrategy::kRandom, FractionAmount{config.partial_fraction},
                                PoolSubstitute{}, config.seed};
          conflicts.push_back(Substitute(evidence.at(q.qid), q, plan, &pool).evidence);
        } else {
          const auto alt_it = alt_evidence.find(q.qid);
          const auto cand_it = alternatives.find(q.qid);
          if (alt_it == alt_evidence.end() || cand_it == alternatives.end()) {
            throw MixError("no alternative retrieval for " + q.qid);
          }
          const std::string alt =
              SelectAlternativeAnswer(source, cand_it->second, q, config.seed);
          conflicts.push_back(
              MixEvidence(evidence.at(q.qid), q.answers, alt_it->second, {alt}, config.mix_n)
                  .evidence);
        }
        kept.push_back(q);
      } catch (const Error& e) {
        LogWarning("dropping " + q.qid + " from " + name + ": " + e.what());
        ++result.dropped[name];
      }
    }
    const auto conflict_preds = reader->Predict(kept, conflicts);
    std::vector<std::string> qids;
    for (const QuestionRecord& q : kept) {
      for (const auto* preds : {&baseline, &conflict_preds}) {
        if (!preds->at(q.qid).encoder_features) {
          throw CalibrationError("prediction for " + q.qid + " has no encoder_features");
        }
      }
      qids.push_back(q.qid);
    }
    std::vector<CalibrationExample> train, eval;
    for (const CalibrationRecord& r : PairPredictions(qids, baseline, conflict_preds, name)) {
      (eval_qids.count(r.qid) ? eval : train).push_back({r.features, r.label});
    }
    if (eval.empty()) throw CalibrationError("empty evaluation set for " + name);
    m.columns.push_back(name);
    m.eval_sizes.push_back(eval.size());
    train_sets.push_back(std::move(train));
    eval_sets.push_back(std::move(eval));
  }

  auto evaluate = [&](const std::function<double(const std::vector<double>&)>& score) {
    std::vector<double> row;
    for (const auto& eval : eval_sets) {
      std::vector<double> scores;
      std::vector<int> labels;
      for (const CalibrationExample& e : eval) {
        scores.push_back(score(e.features));
        labels.push_back(e.label);
      }
      row.push_back(RoundPercent(BinaryAccuracy(scores, labels, config.threshold)));
    }
    return row;
  };

  m.rows.push_back("model_confidence");
  m.train_sizes.push_back(0);
  m.accuracy.push_back(evaluate([](const std::vector<double>& x) { return x[0]; }));

  auto add_calibrator = [&](const std::string& row, const std::vector<CalibrationExample>& train) {
    GbdtHyperparams hp = config.gbdt;
    hp.seed = DeriveSeed(config.seed, row, "train_calibrator");
    const GbdtModel model = Train(train, hp).model;
    m.rows.push_back(row);
    m.train_sizes.push_back(train.size());
    m.accuracy.push_back(evaluate([&](const std::vector<double>& x) { return model.Predict(x); }));
  };
  for (size_t i = 0; i < sources.size(); ++i) add_calibrator(m.columns[i], train_sets[i]);
  if (sources.size() > 1) {
    std::vector<CalibrationExample> all;
    for (const auto& t : train_sets) all.insert(all.end(), t.begin(), t.end());
    add_calibrator("combined", all);
  }
  for (const auto& row : m.accuracy) {
    double sum = 0;
    for (double v : row) sum += v;
    m.macro_average.push_back(std::round(sum / static_cast<double>(row.size()) * 100.0) / 100.0);
  }
  return result;
}

Json ToJson(const ConflictCalibrationResult& r) {
  const CalibrationMatrix& m = r.matrix;
  Json rows = Json::array();
  for (size_t i = 0; i < m.rows.size(); ++i) {
    Json cells = Json::object();
    for (size_t c = 0; c < m.columns.size(); ++c) cells[m.columns[c]] = m.accuracy[i][c];
    rows.push_back({{"calibrator", m.rows[i]},
                    {"train_size", m.train_sizes[i]},
                    {"accuracy", cells},
                    {"macro_average", m.macro_average[i]}});
  }
  Json eval_sizes = Json::object();
  for (size_t c = 0; c < m.columns.size(); ++c) eval_sizes[m.columns[c]] = m.eval_sizes[c];
  return Json{{"config_hash", r.config_hash}, {"seed", r.seed},
              {"correct", r.correct},         {"dropped", r.dropped},
              {"eval_sizes", eval_sizes},     {"rows", rows}};
}

}  // namespace kconflict
