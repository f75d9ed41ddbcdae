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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json_config.h"
#include "kconflict/calibrator.h"
#include "kconflict/corpus.h"
#include "kconflict/entity_perturb.h"
#include "kconflict/error.h"
#include "kconflict/evidence_mixer.h"
#include "kconflict/log.h"
#include "kconflict/metrics.h"
#include "kconflict/pipeline.h"
#include "kconflict/reader_sim.h"
#include "kconflict/rng.h"
#include "kconflict/semantic_perturb.h"
#include "kconflict/text.h"
#include "kconflict/toy_corpus.h"

namespace fs = std::filesystem;

namespace kconflict::cli {
namespace {

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void WriteJson(const fs::path& path, const Json& j) { WriteText(path, j.dump(2) + "\n"); }

Json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<EvidenceSet> InQuestionOrder(const std::vector<QuestionRecord>& questions,
                                         const std::map<std::string, EvidenceSet>& evidence) {
  std::vector<EvidenceSet> out;
  for (const QuestionRecord& q : questions) {
    const auto it = evidence.find(q.qid);
    if (it == evidence.end()) throw DatasetError("no evidence for question " + q.qid);
    out.push_back(it->second);
  }
  return out;
}

std::map<std::string, PredictionRecord> PredictionMap(const fs::path& path) {
  std::map<std::string, PredictionRecord> out;
  for (PredictionRecord& p : LoadPredictions(path)) {
    const std::string qid = p.qid;
    out[qid] = std::move(p);
  }
  return out;
}

CLI::App* Leaf(CLI::App* parent, const std::string& name, const std::string& description) {
  return parent->add_subcommand(name, description);
}

// ---------------------------------------------------------------------------

void AddDataset(CLI::App& root) {
  CLI::App* dataset = root.add_subcommand("dataset", "Dataset utilities");
  dataset->require_subcommand(1);

  auto* validate = Leaf(dataset, "validate", "Schema and referential checks");
  static std::string v_questions, v_passages, v_predictions;
  validate->add_option("--questions", v_questions)->required();
  validate->add_option("--passages", v_passages)->required();
  validate->add_option("--predictions", v_predictions);
  validate->callback([] {
    DatasetPaths paths{v_questions, v_passages, std::nullopt};
    if (!v_predictions.empty()) paths.predictions = v_predictions;
    const std::vector<Finding> findings = ValidateDataset(paths);
    for (const Finding& f : findings) std::cout << FormatFinding(f) << "\n";
    std::cout << findings.size() << " finding(s)\n";
    if (!findings.empty()) throw CLI::RuntimeError(1);
  });

  auto* toy = Leaf(dataset, "make-toy", "Write the synthetic toy corpus");
  static std::string t_out;
  static uint64_t t_seed = kToySeed;
  toy->add_option("--out", t_out)->required();
  toy->add_option("--seed", t_seed, "Corpus seed")->capture_default_str();
  toy->callback([] {
    ToyOptions options;
    options.seed = t_seed;
    WriteToyCorpus(MakeToyCorpus(options), t_out);
  });

  auto* attach = Leaf(dataset, "attach-parses", "Attach CoNLL-U parses to passages");
  static std::string a_passages, a_conllu, a_out;
  attach->add_option("--passages", a_passages)->required();
  attach->add_option("--conllu", a_conllu, "CoNLL-U with '# pid = ...' comments")->required();
  attach->add_option("--out", a_out)->required();
  attach->callback([] {
    std::ifstream in(a_conllu);
    if (!in) throw Error("cannot read " + a_conllu);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::map<std::string, std::vector<std::vector<Token>>> by_pid;
    for (ConlluSentence& s : ParseConllu(text)) {
      if (s.pid.empty()) throw DatasetError("CoNLL-U sentence without a pid comment");
      by_pid[s.pid].push_back(std::move(s.tokens));
    }
    std::vector<Json> rows;
    for (const Json& row : ReadJsonl(a_passages)) {
      Passage p = PassageFromJson(row);
      const auto it = by_pid.find(p.pid);
      if (it != by_pid.end()) AttachSentences(p, it->second);
      rows.push_back(ToJson(p));
    }
    WriteJsonl(a_out, rows);
  });
}

// ---------------------------------------------------------------------------

void AddPerturb(CLI::App& root) {
  CLI::App* perturb = root.add_subcommand("perturb", "Evidence perturbation");
  perturb->require_subcommand(1);

  auto* entity = Leaf(perturb, "entity", "Answer entity substitution");
  static std::string e_strategy = "random", e_substitute = "pool", e_in, e_out, e_pool;
  static double e_fraction = 1.0;
  static int e_except = 0, e_count = 0;
  static uint64_t e_seed = 0;
  entity->add_option("--strategy", e_strategy)
      ->check(CLI::IsMember({"random", "top-retrieval", "top-attention"}))
      ->capture_default_str();
  auto* fraction = entity->add_option("--fraction", e_fraction, "Fraction of answer passages");
  auto* except = entity->add_option("--all-except-top-k", e_except);
  auto* count = entity->add_option("--count", e_count, "Perturb exactly this many passages");
  fraction->excludes(except)->excludes(count);
  except->excludes(count);
  entity->add_option("--substitute", e_substitute, "pool or fixed:<string>")->capture_default_str();
  entity->add_option("--seed", e_seed)->required();
  entity->add_option("--in", e_in, "Directory with questions.jsonl and passages.jsonl")->required();
  entity->add_option("--out", e_out)->required();
  entity->add_option("--pool-questions", e_pool, "Training questions (default IN/train_questions.jsonl)");
  entity->callback([except, count] {
    SubstitutionPlan plan;
    plan.strategy = ParseStrategy(e_strategy);
    if (except->count() > 0) {
      plan.amount = AllExceptTopK{e_except};
    } else if (count->count() > 0) {
      plan.amount = TopCount{e_count};
    } else {
      plan.amount = FractionAmount{e_fraction};
    }
    std::optional<EntityPool> pool;
    if (e_substitute == "pool") {
      plan.substitute = PoolSubstitute{};
      const fs::path pool_path = e_pool.empty() ? fs::path(e_in) / "train_questions.jsonl" : fs::path(e_pool);
      pool = BuildEntityPool(LoadQuestions(pool_path));
    } else if (e_substitute.rfind("fixed:", 0) == 0 && e_substitute.size() > 6) {
      plan.substitute = FixedSubstitute{e_substitute.substr(6)};
    } else {
      throw Error("--substitute must be pool or fixed:<string>");
    }
    plan.seed = e_seed;
    ValidatePlan(plan);
    const auto questions = LoadQuestions(fs::path(e_in) / "questions.jsonl");
    const auto evidence = LoadEvidence(fs::path(e_in) / "passages.jsonl");
    std::vector<EvidenceSet> out;
    std::vector<Json> records;
    for (const QuestionRecord& q : questions) {
      const auto it = evidence.find(q.qid);
      if (it == evidence.end()) throw DatasetError("no evidence for question " + q.qid);
      try {
        SubstitutionResult r = Substitute(it->second, q, plan, pool ? &*pool : nullptr);
        records.push_back(ToJson(r.record));
        out.push_back(std::move(r.evidence));
      } catch (const SamplingError& e) {
        LogWarning(q.qid + " left unchanged: " + e.what());
        out.push_back(it->second);
      }
    }
    WriteQuestions(fs::path(e_out) / "questions.jsonl", questions);
    WriteEvidence(fs::path(e_out) / "passages.jsonl", out);
    WriteJsonl(fs::path(e_out) / "perturbation_records.jsonl", records);
  });

  auto* semantic = Leaf(perturb, "semantic", "Rule-based sentence perturbation");
  static std::string s_kind, s_in, s_out, s_infiller;
  static int s_timeout = 10000;
  semantic->add_option("--kind", s_kind)
      ->check(CLI::IsMember({"negation", "modality", "future", "infilling"}))
      ->required();
  semantic->add_option("--in", s_in)->required();
  semantic->add_option("--out", s_out)->required();
  semantic->add_option("--infiller", s_infiller, "Infilling command or http(s) URL");
  semantic->add_option("--infiller-timeout-ms", s_timeout)->capture_default_str();
  semantic->callback([] {
    const PerturbKind kind = ParsePerturbKind(s_kind);
    std::unique_ptr<Infiller> infiller;
    if (!s_infiller.empty()) infiller = MakeInfiller(s_infiller, s_timeout);
    const auto questions = LoadQuestions(fs::path(s_in) / "questions.jsonl");
    const auto evidence = LoadEvidence(fs::path(s_in) / "passages.jsonl");
    std::vector<EvidenceSet> out;
    std::vector<Json> stats;
    for (const QuestionRecord& q : questions) {
      const auto it = evidence.find(q.qid);
      if (it == evidence.end()) throw DatasetError("no evidence for question " + q.qid);
      SemanticResult r = PerturbEvidence(it->second, q, kind, infiller.get());
      stats.push_back(ToJson(r.stats));
      out.push_back(std::move(r.evidence));
    }
    WriteQuestions(fs::path(s_out) / "questions.jsonl", questions);
    WriteEvidence(fs::path(s_out) / "passages.jsonl", out);
    WriteJsonl(fs::path(s_out) / "coverage_stats.jsonl", stats);
  });
}

// ---------------------------------------------------------------------------

void AddMix(CLI::App& root) {
  auto* mix = Leaf(&root, "mix", "Build conflicting evidence sets");
  static std::string m_mode, m_in_a, m_in_b, m_out, m_pool;
  static size_t m_n = 10;
  static double m_fraction = 0.5;
  static uint64_t m_seed = 0;
  mix->add_option("--mode", m_mode)
      ->check(CLI::IsMember({"partial-sub", "ambigqa", "situatedqa"}))
      ->required();
  mix->add_option("--n", m_n, "Passages per mixed set")->capture_default_str();
  mix->add_option("--seed", m_seed)->required();
  mix->add_option("--in-a", m_in_a, "Original questions.jsonl and passages.jsonl")->required();
  mix->add_option("--in-b", m_in_b, "Second retrieval: passages.jsonl and alternatives.jsonl");
  mix->add_option("--out", m_out)->required();
  mix->add_option("--pool-questions", m_pool, "Training questions for partial-sub");
  mix->add_option("--fraction", m_fraction, "Substituted fraction for partial-sub")
      ->capture_default_str();
  mix->callback([] {
    const ConflictSource source = ParseConflictSource(m_mode);
    const auto questions = LoadQuestions(fs::path(m_in_a) / "questions.jsonl");
    const auto evidence = LoadEvidence(fs::path(m_in_a) / "passages.jsonl");
    std::optional<EntityPool> pool;
    std::map<std::string, EvidenceSet> alt_evidence;
    std::map<std::string, std::vector<AlternativeCandidate>> alternatives;
    if (source == ConflictSource::kPartialSubstitution) {
      const fs::path p = m_pool.empty() ? fs::path(m_in_a) / "train_questions.jsonl" : fs::path(m_pool);
      pool = BuildEntityPool(LoadQuestions(p));
    } else {
      if (m_in_b.empty()) throw Error("--in-b is required for " + m_mode);
      alt_evidence = LoadEvidence(fs::path(m_in_b) / "passages.jsonl");
      alternatives = LoadAlternatives(fs::path(m_in_b) / "alternatives.jsonl");
    }
    std::vector<QuestionRecord> kept;
    std::vector<EvidenceSet> mixed;
    std::vector<Json> summaries;
    for (const QuestionRecord& q : questions) {
      const auto it = evidence.find(q.qid);
      if (it == evidence.end()) throw DatasetError("no evidence for question " + q.qid);
      ConflictPair pair;
      pair.qid = q.qid;
      pair.original = it->second;
      pair.original_answers = q.answers;
      pair.provenance = source;
      try {
        if (source == ConflictSource::kPartialSubstitution) {
          SubstitutionPlan plan{SelectionStrategy::kRandom, FractionAmount{m_fraction},
                                PoolSubstitute{}, m_seed};
          SubstitutionResult r = Substitute(it->second, q, plan, &*pool);
          pair.conflict = std::move(r.evidence);
          pair.alternative_answers = {r.record.substitute};
        } else {
          const auto alt = alt_evidence.find(q.qid);
          const auto cand = alternatives.find(q.qid);
          if (alt == alt_evidence.end() || cand == alternatives.end()) {
            throw MixError("no second retrieval for " + q.qid);
          }
          const std::string answer = SelectAlternativeAnswer(source, cand->second, q, m_seed);
          pair.conflict = MixEvidence(it->second, q.answers, alt->second, {answer}, m_n).evidence;
          pair.alternative_answers = {answer};
        }
      } catch (const Error& e) {
        LogWarning("dropping " + q.qid + ": " + e.what());
        continue;
      }
      summaries.push_back(ConflictSummaryJson(pair));
      kept.push_back(q);
      mixed.push_back(std::move(pair.conflict));
    }
    WriteQuestions(fs::path(m_out) / "questions.jsonl", kept);
    WriteEvidence(fs::path(m_out) / "passages.jsonl", mixed);
    WriteJsonl(fs::path(m_out) / "conflicts.jsonl", summaries);
  });
}

void AddPairs(CLI::App& root) {
  CLI::App* pairs = root.add_subcommand("pairs", "Calibration pairs");
  pairs->require_subcommand(1);
  auto* build = Leaf(pairs, "build", "Pair original and conflict predictions");
  static std::string p_questions, p_predictions, p_conflict, p_provenance, p_out;
  build->add_option("--questions", p_questions, "Question order (default: prediction order)");
  build->add_option("--predictions", p_predictions, "Predictions on original evidence")->required();
  build->add_option("--conflict-predictions", p_conflict, "Predictions on conflicting evidence")
      ->required();
  build->add_option("--provenance", p_provenance)->required();
  build->add_option("--out", p_out)->required();
  build->callback([] {
    const auto original = PredictionMap(p_predictions);
    const auto conflict = PredictionMap(p_conflict);
    std::vector<std::string> qids;
    if (!p_questions.empty()) {
      for (const QuestionRecord& q : LoadQuestions(p_questions)) qids.push_back(q.qid);
    } else {
      for (const PredictionRecord& p : LoadPredictions(p_predictions)) qids.push_back(p.qid);
    }
    WriteCalibrationRecords(p_out, PairPredictions(qids, original, conflict, p_provenance));
  });
}

// ---------------------------------------------------------------------------

void AddMetrics(CLI::App& root) {
  CLI::App* metrics = root.add_subcommand("metrics", "Evaluation metrics");
  metrics->require_subcommand(1);
  auto* report = Leaf(metrics, "report", "EM, source and memorization report");
  static std::string r_questions, r_passages, r_predictions, r_cbqa, r_perturbed_predictions,
      r_perturbed_passages, r_records, r_train, r_out;
  report->add_option("--questions", r_questions)->required();
  report->add_option("--passages", r_passages)->required();
  report->add_option("--predictions", r_predictions)->required();
  report->add_option("--cbqa-predictions", r_cbqa, "Closed-book predictions");
  report->add_option("--perturbed-predictions", r_perturbed_predictions);
  report->add_option("--perturbed-passages", r_perturbed_passages);
  report->add_option("--perturbation-records", r_records);
  report->add_option("--train-questions", r_train, "Enables the answer-overlap split");
  report->add_option("--out", r_out, "report.json; a .csv is written alongside")->required();
  report->callback([] {
    const auto questions = LoadQuestions(r_questions);
    auto evidence = LoadEvidence(r_passages);
    auto predictions = PredictionMap(r_predictions);
    std::map<std::string, PredictionRecord> cbqa;
    if (!r_cbqa.empty()) cbqa = PredictionMap(r_cbqa);
    std::map<std::string, std::string> substitutes;
    const bool perturbed = !r_perturbed_predictions.empty();
    if (perturbed) {
      if (r_perturbed_passages.empty() || r_records.empty()) {
        throw Error("--perturbed-predictions needs --perturbed-passages and --perturbation-records");
      }
      for (const Json& row : ReadJsonl(r_records)) {
        const PerturbationRecord record = PerturbationRecordFromJson(row);
        substitutes[record.qid] = record.substitute;
      }
      evidence = LoadEvidence(r_perturbed_passages);
      predictions = PredictionMap(r_perturbed_predictions);
    }
    std::set<std::string> train_answers;
    if (!r_train.empty()) {
      for (const std::string& a : BuildEntityPool(LoadQuestions(r_train)).NormalizedEntries()) {
        train_answers.insert(a);
      }
    }
    std::vector<EvalOutcome> outcomes;
    for (const QuestionRecord& q : questions) {
      const auto pred = predictions.find(q.qid);
      const auto ev = evidence.find(q.qid);
      if (pred == predictions.end() || ev == evidence.end()) {
        LogWarning("skipping " + q.qid + ": missing prediction or evidence");
        continue;
      }
      std::optional<std::string> substitute;
      if (perturbed) {
        const auto s = substitutes.find(q.qid);
        if (s == substitutes.end()) {
          LogWarning("skipping " + q.qid + ": no perturbation record");
          continue;
        }
        substitute = s->second;
      }
      std::optional<PredictionRecord> closed;
      if (!r_cbqa.empty()) {
        const auto c = cbqa.find(q.qid);
        if (c != cbqa.end()) closed = c->second;
      }
      EvalOutcome o = MakeOutcome(q, ev->second, pred->second, substitute, closed);
      if (!r_train.empty()) o.answer_overlap = AnswerOverlap(q, train_answers) == OverlapSplit::kAnswerOverlap;
      outcomes.push_back(std::move(o));
    }
    const MetricsReport result = Report(outcomes);
    fs::path csv = r_out;
    csv.replace_extension(".csv");
    WriteJson(r_out, ToJson(result));
    WriteText(csv, ToCsv(result));
  });
}

// ---------------------------------------------------------------------------

std::vector<CalibrationExample> Examples(const std::vector<CalibrationRecord>& records) {
  std::vector<CalibrationExample> out;
  for (const CalibrationRecord& r : records) out.push_back({r.features, r.label});
  return out;
}

Json EvaluationJson(const GbdtModel& model, const std::vector<CalibrationExample>& data,
                    double threshold) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const CalibrationExample& e : data) {
    scores.push_back(model.Predict(e.features));
    labels.push_back(e.label);
  }
  Json curve = Json::array();
  for (const RiskCoveragePoint& p : RiskCoverage(scores, labels)) {
    curve.push_back({{"threshold", p.threshold},
                     {"answered", p.answered},
                     {"coverage", p.coverage},
                     {"risk", p.risk ? Json(*p.risk) : Json(nullptr)}});
  }
  Json auroc = nullptr;
  try {
    auroc = Auroc(scores, labels);
  } catch (const UndefinedMetricError&) {
  }
  return Json{{"n", data.size()},
              {"threshold", threshold},
              {"accuracy", BinaryAccuracy(scores, labels, threshold)},
              {"auroc", auroc},
              {"risk_coverage", curve}};
}

void AddGbdtOptions(CLI::App* app, GbdtHyperparams& hp) {
  app->add_option("--rounds", hp.rounds)->capture_default_str();
  app->add_option("--learning-rate", hp.learning_rate)->capture_default_str();
  app->add_option("--subsample", hp.subsample)->capture_default_str();
  app->add_option("--max-depth", hp.max_depth)->capture_default_str();
  app->add_option("--l2-leaf-reg", hp.l2_leaf_reg)->capture_default_str();
  app->add_option("--min-child-weight", hp.min_child_weight)->capture_default_str();
}

void AddCalibrate(CLI::App& root) {
  CLI::App* calibrate = root.add_subcommand("calibrate", "Abstention calibrator");
  calibrate->require_subcommand(1);

  auto* train = Leaf(calibrate, "train", "Train a gradient-boosted calibrator");
  static std::string c_data, c_out, c_report;
  static size_t c_holdout = 0;
  static uint64_t c_seed = 0;
  static double c_threshold = 0.5;
  static GbdtHyperparams hp;
  train->add_option("--data", c_data, "Calibration JSONL")->required();
  train->add_option("--out", c_out, "Model file")->required();
  train->add_option("--holdout", c_holdout, "Rows held out for evaluation")->capture_default_str();
  train->add_option("--report", c_report, "Training report (default: stdout)");
  train->add_option("--threshold", c_threshold)->capture_default_str();
  train->add_option("--seed", c_seed)->required();
  AddGbdtOptions(train, hp);
  train->callback([] {
    std::vector<CalibrationExample> data = Examples(LoadCalibrationRecords(c_data));
    std::vector<CalibrationExample> held;
    if (c_holdout > 0) {
      if (c_holdout >= data.size()) throw CalibrationError("--holdout leaves no training rows");
      Rng rng(DeriveSeed(c_seed, "", "holdout_split"));
      rng.Shuffle(data);
      held.assign(data.end() - static_cast<long>(c_holdout), data.end());
      data.resize(data.size() - c_holdout);
    }
    GbdtHyperparams params = hp;
    params.seed = c_seed;
    const TrainResult result = Train(data, params);
    SaveModel(result.model, c_out);
    Json report{{"train_rows", data.size()},
                {"trees", result.model.trees.size()},
                {"loss_history", result.loss_history},
                {"train", EvaluationJson(result.model, data, c_threshold)}};
    if (!held.empty()) report["holdout"] = EvaluationJson(result.model, held, c_threshold);
    if (c_report.empty()) {
      std::cout << report.dump(2) << "\n";
    } else {
      WriteJson(c_report, report);
    }
  });

  auto* eval = Leaf(calibrate, "eval", "Evaluate a calibrator");
  static std::string e_model, e_data, e_report;
  static double e_threshold = 0.5;
  eval->add_option("--model", e_model)->required();
  eval->add_option("--data", e_data)->required();
  eval->add_option("--report", e_report)->required();
  eval->add_option("--threshold", e_threshold)->capture_default_str();
  eval->callback([] {
    const GbdtModel model = LoadModel(e_model);
    WriteJson(e_report, EvaluationJson(model, Examples(LoadCalibrationRecords(e_data)), e_threshold));
  });
}

// ---------------------------------------------------------------------------

void AddReaderSim(CLI::App& root) {
  CLI::App* readersim = root.add_subcommand("readersim", "Deterministic simulated reader");
  readersim->require_subcommand(1);
  auto* run = readersim->add_subcommand("run", "Predict with the simulated reader");
  static std::string q_path, p_path, sim_config, out;
  static double bias = 0.0;
  static int focus_k = 1;
  static std::string score_source;
  static bool memorize_gold = false;
  static uint64_t seed = 0;
  run->add_option("--questions", q_path)->required();
  run->add_option("--passages", p_path)->required();
  run->add_option("--config", sim_config, "Reader configuration JSON");
  run->add_option("--out", out)->required();
  auto* bias_opt = run->add_option("--memory-bias", bias);
  auto* focus_opt = run->add_option("--focus-k", focus_k);
  auto* source_opt = run->add_option("--score-source", score_source)
                         ->check(CLI::IsMember({"attention", "retrieval"}));
  auto* gold_opt = run->add_flag("--memorize-gold", memorize_gold);
  auto* seed_opt = run->add_option("--seed", seed);
  run->callback([=] {
    ReaderSimConfig config;
    if (!sim_config.empty()) config = ReaderSimConfigFromJson(ReadJsonFile(sim_config));
    if (bias_opt->count()) config.memory_bias = bias;
    if (focus_opt->count()) config.focus_k = focus_k;
    if (source_opt->count()) config.score_source = ParseScoreSource(score_source);
    if (gold_opt->count()) config.memorize_gold = memorize_gold;
    if (seed_opt->count()) config.seed = seed;
    SimReader reader(config);
    const auto questions = LoadQuestions(q_path);
    const auto preds = reader.Predict(questions, InQuestionOrder(questions, LoadEvidence(p_path)));
    std::vector<PredictionRecord> rows;
    for (const QuestionRecord& q : questions) rows.push_back(preds.at(q.qid));
    WritePredictions(out, rows);
  });
}

// ---------------------------------------------------------------------------

struct PipelineFlags {
  std::string config, out, questions, passages, train_questions, reader_command;
  uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
};

CLI::App* AddPipelineLeaf(CLI::App* parent, const std::string& name, const std::string& description,
                          PipelineFlags& f) {
  CLI::App* app = parent->add_subcommand(name, description);
  app->add_option("--config", f.config, "Pipeline configuration JSON");
  app->add_option("--out", f.out, "Report path (default: stdout)");
  app->add_option("--questions", f.questions);
  app->add_option("--passages", f.passages);
  app->add_option("--reader-command", f.reader_command, "External reader command");
  return app;
}

Json LoadPipelineConfig(const PipelineFlags& f) {
  Json j = f.config.empty() ? Json::object() : ReadJsonFile(f.config);
  if (!j.is_object()) throw Error("pipeline config must be a JSON object");
  if (!f.questions.empty()) j["questions"] = f.questions;
  if (!f.passages.empty()) j["passages"] = f.passages;
  if (!f.train_questions.empty()) j["train_questions"] = f.train_questions;
  if (!f.reader_command.empty()) j["reader"] = {{"type", "command"}, {"command", f.reader_command}};
  if (f.seed_opt != nullptr && f.seed_opt->count() > 0) j["seed"] = f.seed;
  return j;
}

void RequireSeed(const Json& j) {
  if (!j.contains("seed")) throw Error("a seed is required (--seed or \"seed\" in --config)");
}

void EmitReport(const PipelineFlags& f, const Json& report) {
  if (f.out.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    WriteJson(f.out, report);
  }
}

void AddPipeline(CLI::App& root) {
  CLI::App* pipeline = root.add_subcommand("pipeline", "End-to-end experiment pipelines");
  pipeline->require_subcommand(1);

  static PipelineFlags ef;
  static std::vector<std::string> e_strategies;
  static std::vector<double> e_fractions;
  static std::vector<int> e_counts;
  auto* entity = AddPipelineLeaf(pipeline, "entity-study", "Substitution study grid", ef);
  entity->add_option("--train-questions", ef.train_questions);
  ef.seed_opt = entity->add_option("--seed", ef.seed);
  auto* strategies_opt = entity->add_option("--strategies", e_strategies);
  auto* fractions_opt = entity->add_option("--fractions", e_fractions);
  auto* counts_opt = entity->add_option("--top-counts", e_counts);
  entity->callback([=] {
    Json j = LoadPipelineConfig(ef);
    RequireSeed(j);
    if (strategies_opt->count()) j["strategies"] = e_strategies;
    if (fractions_opt->count()) j["fractions"] = e_fractions;
    if (counts_opt->count()) j["top_counts"] = e_counts;
    EmitReport(ef, ToJson(RunEntityStudy(EntityStudyConfigFromJson(j))));
  });

  static PipelineFlags sf;
  static std::string s_infiller;
  auto* semantic = AddPipelineLeaf(pipeline, "semantic-study", "Semantic perturbation study", sf);
  auto* infiller_opt = semantic->add_option("--infiller", s_infiller);
  semantic->callback([=] {
    Json j = LoadPipelineConfig(sf);
    if (infiller_opt->count()) j["infiller"] = s_infiller;
    EmitReport(sf, ToJson(RunSemanticStudy(SemanticStudyConfigFromJson(j))));
  });

  static PipelineFlags cf;
  static std::string c_alt_passages, c_alternatives;
  auto* conflict = AddPipelineLeaf(pipeline, "conflict-calibration",
                                   "Calibrator accuracy across conflict sources", cf);
  conflict->add_option("--train-questions", cf.train_questions);
  conflict->add_option("--alt-passages", c_alt_passages);
  conflict->add_option("--alternatives", c_alternatives);
  cf.seed_opt = conflict->add_option("--seed", cf.seed);
  conflict->callback([] {
    Json j = LoadPipelineConfig(cf);
    RequireSeed(j);
    if (!c_alt_passages.empty()) j["alt_passages"] = c_alt_passages;
    if (!c_alternatives.empty()) j["alternatives"] = c_alternatives;
    EmitReport(cf, ToJson(RunConflictCalibration(ConflictCalibrationConfigFromJson(j))));
  });
}

}  // namespace
}  // namespace kconflict::cli

int main(int argc, char** argv) {
  using namespace kconflict::cli;
  CLI::App app("Knowledge-conflict QA toolkit", "kconflict");
  app.require_subcommand(1);
  app.set_version_flag("--version", "kconflict 0.1.0");
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON file holding option values for the chosen command");
  AddDataset(app);
  AddPerturb(app);
  AddMix(app);
  AddPairs(app);
  AddMetrics(app);
  AddCalibrate(app);
  AddReaderSim(app);
  AddPipeline(app);
  kconflict::SetLogSink([](std::string_view message) { std::cerr << "warning: " << message << "\n"; });
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const kconflict::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
