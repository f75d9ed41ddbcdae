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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "kconflict/calibrator.h"
#include "kconflict/corpus.h"
#include "kconflict/entity_perturb.h"
#include "kconflict/error.h"
#include "kconflict/evidence_mixer.h"
#include "kconflict/metrics.h"
#include "kconflict/pipeline.h"
#include "kconflict/reader_sim.h"
#include "kconflict/semantic_perturb.h"
#include "kconflict/text.h"
#include "kconflict/toy_corpus.h"

namespace py = pybind11;

namespace kconflict {
namespace {

// The Python layer passes records as JSON text.
EvidenceSet EvidenceFromJson(const std::string& qid, const std::string& passages) {
  EvidenceSet e;
  e.qid = qid;
  for (const Json& p : Json::parse(passages)) e.passages.push_back(PassageFromJson(p));
  return e;
}

std::string PassagesJson(const EvidenceSet& e) {
  Json out = Json::array();
  for (const Passage& p : e.passages) out.push_back(ToJson(p));
  return out.dump();
}

std::vector<QuestionRecord> QuestionsFromJson(const std::string& text) {
  std::vector<QuestionRecord> out;
  for (const Json& q : Json::parse(text)) out.push_back(QuestionFromJson(q));
  return out;
}

SelectionAmount AmountFromArgs(std::optional<double> fraction, std::optional<int> all_except_top_k,
                               std::optional<int> count) {
  const int given = fraction.has_value() + all_except_top_k.has_value() + count.has_value();
  if (given > 1) throw SelectionError("give only one of fraction, all_except_top_k, count");
  if (all_except_top_k) return AllExceptTopK{*all_except_top_k};
  if (count) return TopCount{*count};
  return FractionAmount{fraction.value_or(1.0)};
}

std::string PySubstitute(const std::string& question, const std::string& passages,
                       const std::string& strategy, std::optional<double> fraction,
                       std::optional<int> all_except_top_k, std::optional<int> count,
                       std::optional<std::string> substitute, uint64_t seed,
                       std::optional<std::string> pool_questions) {
  const QuestionRecord q = QuestionFromJson(Json::parse(question));
  SubstitutionPlan plan;
  plan.strategy = ParseStrategy(strategy);
  plan.amount = AmountFromArgs(fraction, all_except_top_k, count);
  plan.seed = seed;
  if (substitute) plan.substitute = FixedSubstitute{*substitute};
  std::optional<EntityPool> pool;
  if (pool_questions) pool = BuildEntityPool(QuestionsFromJson(*pool_questions));
  const SubstitutionResult r =
      kconflict::Substitute(EvidenceFromJson(q.qid, passages), q, plan, pool ? &*pool : nullptr);
  return Json{{"passages", Json::parse(PassagesJson(r.evidence))}, {"record", ToJson(r.record)}}
      .dump();
}

std::string PyPerturb(const std::string& question, const std::string& passages,
                    const std::string& kind, std::optional<std::string> infiller, int timeout_ms) {
  const QuestionRecord q = QuestionFromJson(Json::parse(question));
  std::unique_ptr<Infiller> backend;
  if (infiller) backend = MakeInfiller(*infiller, timeout_ms);
  const SemanticResult r =
      PerturbEvidence(EvidenceFromJson(q.qid, passages), q, ParsePerturbKind(kind), backend.get());
  return Json{{"passages", Json::parse(PassagesJson(r.evidence))}, {"stats", ToJson(r.stats)}}
      .dump();
}

std::string PyMix(const std::string& qid, const std::string& passages_a,
                const std::vector<std::string>& answers_a, const std::string& passages_b,
                const std::vector<std::string>& answers_b, size_t n) {
  const MixResult r = MixEvidence(EvidenceFromJson(qid, passages_a), answers_a,
                                  EvidenceFromJson(qid, passages_b), answers_b, n);
  return Json{{"passages", Json::parse(PassagesJson(r.evidence))},
              {"from_a", r.from_a},
              {"from_b", r.from_b},
              {"containing_a", r.containing_a},
              {"containing_b", r.containing_b},
              {"duplicates", r.duplicates}}
      .dump();
}

std::string PySimulate(const std::string& question, const std::string& passages,
                     const std::string& config) {
  const QuestionRecord q = QuestionFromJson(Json::parse(question));
  return ToJson(kconflict::Simulate(q, EvidenceFromJson(q.qid, passages),
                                    ReaderSimConfigFromJson(Json::parse(config))))
      .dump();
}

std::string TrainCalibrator(const std::vector<std::vector<double>>& features,
                            const std::vector<int>& labels, int rounds, double learning_rate,
                            double subsample, int max_depth, double l2_leaf_reg, uint64_t seed) {
  if (features.size() != labels.size()) throw CalibrationError("features and labels differ in size");
  std::vector<CalibrationExample> data;
  for (size_t i = 0; i < features.size(); ++i) data.push_back({features[i], labels[i]});
  GbdtHyperparams hp;
  hp.rounds = rounds;
  hp.learning_rate = learning_rate;
  hp.subsample = subsample;
  hp.max_depth = max_depth;
  hp.l2_leaf_reg = l2_leaf_reg;
  hp.seed = seed;
  const TrainResult r = Train(data, hp);
  return Json{{"model", ToJson(r.model)}, {"loss_history", r.loss_history}}.dump();
}

std::vector<double> PredictCalibrator(const std::string& model,
                                      const std::vector<std::vector<double>>& features) {
  const GbdtModel m = GbdtModelFromJson(Json::parse(model));
  std::vector<double> out;
  for (const auto& x : features) out.push_back(m.Predict(x));
  return out;
}

std::string ConfidenceDrop(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<ConfidencePair> in;
  for (size_t i = 0; i < pairs.size(); ++i) {
    in.push_back({std::to_string(i), pairs[i].first, pairs[i].second});
  }
  return ToJson(ComputeConfidenceDrop(in)).dump();
}

std::string ToyCorpusJson(uint64_t seed) {
  ToyOptions options;
  options.seed = seed;
  const ToyCorpus toy = MakeToyCorpus(options);
  Json questions = Json::array(), evidence = Json::array(), train = Json::array();
  for (const QuestionRecord& q : toy.questions) questions.push_back(ToJson(q));
  for (const EvidenceSet& e : toy.evidence) evidence.push_back(Json::parse(PassagesJson(e)));
  for (const QuestionRecord& q : toy.train_questions) train.push_back(ToJson(q));
  return Json{{"questions", questions}, {"passages", evidence}, {"train_questions", train}}.dump();
}

std::string EntityStudy(const std::string& config) {
  return ToJson(RunEntityStudy(EntityStudyConfigFromJson(Json::parse(config)))).dump();
}

}  // namespace
}  // namespace kconflict

PYBIND11_MODULE(_kconflict, m) {
  using namespace kconflict;
  m.doc() = "Knowledge-conflict QA toolkit core";

  py::register_exception<Error>(m, "KconflictError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("normalize_answer", [](const std::string& s) { return NormalizeAnswer(s); });
  m.def("exact_match", [](const std::string& p, const std::vector<std::string>& a) {
    return ExactMatch(p, a);
  });
  m.def("memorization_ratio", &MemorizationRatio);
  m.def("selection_count", &SelectionCount);
  m.def("auroc", &Auroc);
  m.def("binary_accuracy",
        py::overload_cast<const std::vector<double>&, const std::vector<int>&, double>(&BinaryAccuracy),
        py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);
  m.def("substitute", &PySubstitute);
  m.def("perturb", &PyPerturb);
  m.def("mix", &PyMix);
  m.def("simulate", &PySimulate);
  m.def("train_calibrator", &TrainCalibrator);
  m.def("predict_calibrator", &PredictCalibrator);
  m.def("confidence_drop", &ConfidenceDrop);
  m.attr("TOY_SEED") = kToySeed;
  m.def("toy_corpus", &ToyCorpusJson);
  m.def("entity_study", &EntityStudy);
}
