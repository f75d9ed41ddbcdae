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

// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kconflict/calibrator.h"
#include "kconflict/corpus.h"
#include "kconflict/entity_perturb.h"
#include "kconflict/error.h"
#include "kconflict/evidence_mixer.h"
#include "kconflict/log.h"
#include "kconflict/metrics.h"
#include "kconflict/pipeline.h"
#include "kconflict/reader_sim.h"
#include "kconflict/semantic_perturb.h"
#include "kconflict/toy_corpus.h"
#include "test_support.h"

namespace fs = std::filesystem;
using namespace kconflict;
using kconflict::testing::MakeEvidence;
using kconflict::testing::MakePassage;
using kconflict::testing::OracleContains;
using kconflict::testing::OracleNormalize;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void Check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
  void Info(const std::string& what) { notes.push_back(what); }
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

int failures = 0;

void Run(int id, const std::string& title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.Check(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.Check(secs < budget_s, Fmt("time %.3fs over the %.0fs budget", secs, budget_s));
  if (!out.pass) ++failures;
  std::printf("%s [C%d] %s (%.3fs, budget %.0fs)\n", out.pass ? "PASS" : "FAIL", id, title.c_str(),
              secs, budget_s);
  for (const std::string& n : out.notes) std::printf("    %s\n", n.c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------

struct PrintedRow {
  const char* label;
  double original, substitute, printed;
};

constexpr PrintedRow kNqRows[] = {
    {"FiD 1/1 (MRQA)", 17, 47, 27},   {"FiD 1/1", 10.1, 61.1, 14.1},
    {"RAG 5/1", 10.3, 65.9, 13.5},    {"RAG 5/5", 11.6, 63.7, 15.3},
    {"FiD 5/1", 3.0, 69.5, 4.2},      {"FiD 5/5", 2.7, 53.1, 4.8},
    {"FiD 20/1", 1.2, 70.6, 1.6},     {"FiD 20/20", 1.0, 50.0, 2.0},
    {"FiD 50/1", 0.3, 82.0, 0.4},     {"FiD 50/50", 1.1, 50.4, 2.1},
    {"FiD 100/1", 1.1, 71.3, 1.5},    {"FiD 100/100", 2.4, 64.5, 3.6},
};

constexpr PrintedRow kTriviaQaRows[] = {
    {"1/1", 20.6, 38.6, 34.8},   {"5/1", 10.4, 52.7, 16.5},  {"5/5", 10.7, 52.4, 16.9},
    {"20/1", 8.5, 53.9, 13.6},   {"20/20", 8.8, 52.1, 14.5}, {"50/1", 6.0, 59.3, 9.1},
    {"50/50", 6.8, 57.9, 10.6},  {"100/1", 8.64, 56.2, 13.3}, {"100/100", 4.9, 52.6, 8.5},
};

// Half a unit in the last printed digit of `v`.
double HalfUlp(double v) {
  std::ostringstream s;
  s << v;
  const std::string text = s.str();
  const size_t dot = text.find('.');
  const int decimals = dot == std::string::npos ? 0 : static_cast<int>(text.size() - dot - 1);
  return 0.5 * std::pow(10.0, -decimals);
}

void CriterionMemorizationRatio(Outcome& out) {
  int checked = 0;
  auto check_table = [&](const char* table, const PrintedRow* rows, size_t n) {
    for (size_t i = 0; i < n; ++i) {
      const PrintedRow& r = rows[i];
      const double mr = 100.0 * MemorizationRatio(r.original, r.substitute);
      ++checked;
      const bool ok = std::fabs(mr - r.printed) <= 0.1 + 1e-9;
      if (ok) continue;
      out.Check(false, std::string(table) + " " + r.label +
                           Fmt(": M_R(%.2f, %.2f) = %.3f vs printed %.1f", r.original,
                               r.substitute, mr, r.printed));
      // Range of M_R over inputs consistent with their printed rounding.
      const double eo = HalfUlp(r.original), es = HalfUlp(r.substitute);
      const double lo = 100.0 * (r.original - eo) / (r.original - eo + r.substitute + es);
      const double hi = 100.0 * (r.original + eo) / (r.original + eo + r.substitute - es);
      out.Info(Fmt("  inputs as printed allow M_R in [%.3f, %.3f]; printed %.1f lies ", lo, hi,
                   r.printed) +
               ((r.printed >= lo - 0.1 && r.printed <= hi + 0.1) ? "within 0.1 of that range"
                                                                   : "outside that range"));
    }
  };
  check_table("NQ", kNqRows, std::size(kNqRows));
  check_table("TriviaQA", kTriviaQaRows, std::size(kTriviaQaRows));
  out.Info(std::to_string(checked) + " rows checked");
}

// ---------------------------------------------------------------------------

size_t OracleCount(int quarters, size_t n) {
  // round-half-up(quarters / 4 * n) in integer arithmetic, clamped to [1, n].
  size_t c = (static_cast<size_t>(quarters) * n * 2 + 4) / 8;
  return std::clamp<size_t>(c, 1, n);
}

void CriterionFullSubstitution(Outcome& out) {
  const ToyCorpus toy = MakeToyCorpus();
  size_t passages = 0;
  for (const EvidenceSet& e : toy.evidence) passages += e.passages.size();
  out.Check(toy.questions.size() >= 50, "toy corpus has fewer than 50 questions");
  out.Check(passages >= 500, "toy corpus has fewer than 500 passages");
  const EntityPool pool = BuildEntityPool(toy.train_questions);
  size_t leaks = 0, substituted = 0;
  for (size_t i = 0; i < toy.questions.size(); ++i) {
    const QuestionRecord& q = toy.questions[i];
    SubstitutionPlan plan{SelectionStrategy::kRandom, FractionAmount{1.0}, PoolSubstitute{}, 11};
    const SubstitutionResult r = Substitute(toy.evidence[i], q, plan, &pool);
    ++substituted;
    for (const Passage& p : r.evidence.passages) {
      for (const std::string& alias : q.answers) {
        if (OracleContains(p.text, alias)) {
          ++leaks;
          if (leaks <= 3) out.Info("leak: " + p.pid + " still contains \"" + alias + "\"");
        }
      }
    }
  }
  out.Check(leaks == 0, std::to_string(leaks) + " passages still contain an original alias");
  out.Info(std::to_string(substituted) + " questions, " + std::to_string(passages) +
           " passages substituted at fraction 1.0");

  size_t mismatches = 0;
  for (size_t n = 1; n <= 50; ++n) {
    EvidenceSet e;
    e.qid = "q";
    for (size_t k = 0; k < n; ++k) {
      e.passages.push_back(MakePassage("q", "p" + std::to_string(100 + k), "the answer is Zed",
                                       static_cast<double>(k), static_cast<double>(k) / 100.0,
                                       {{"Zed", EntityType::kPerson}}));
    }
    for (int quarters = 1; quarters <= 4; ++quarters) {
      const double f = quarters / 4.0;
      const size_t expected = OracleCount(quarters, n);
      if (SelectionCount(f, n) != expected) ++mismatches;
      for (SelectionStrategy s : {SelectionStrategy::kRandom, SelectionStrategy::kTopRetrieval,
                                  SelectionStrategy::kTopAttention}) {
        SubstitutionPlan plan{s, FractionAmount{f}, FixedSubstitute{"Ada"}, 5};
        if (SelectTargetPassages(e, {"Zed"}, plan).size() != expected) ++mismatches;
      }
    }
  }
  out.Check(mismatches == 0, std::to_string(mismatches) + " selection-count mismatches");
  out.Info("selection counts checked for 1..50 candidates x 4 fractions x 3 strategies");
}

// ---------------------------------------------------------------------------

SentenceParse Parse(const std::vector<Token>& tokens) {
  SentenceParse s;
  s.tokens = tokens;
  return s;
}

Token T(const char* form, const char* lemma, const char* xpos, int head, const char* deprel) {
  return Token{form, lemma, xpos, head, deprel};
}

struct RuleCase {
  SentenceParse parse;
  PerturbKind kind;
  std::string expected;  // empty: skip expected
  SkipReason reason = SkipReason::kNone;
};

std::vector<RuleCase> RuleCases() {
  const auto bills = Parse({T("the", "the", "DT", 3, "det"), T("1995", "1995", "CD", 3, "nummod"),
                            T("Bills", "Bill", "NNPS", 4, "nsubj"), T("won", "win", "VBD", 0, "root"),
                            T("the", "the", "DT", 7, "det"), T("AFC", "AFC", "NNP", 7, "compound"),
                            T("East", "East", "NNP", 4, "obj")});
  const auto vbz = Parse({T("Ada", "Ada", "NNP", 2, "nsubj"), T("owns", "own", "VBZ", 0, "root"),
                          T("the", "the", "DT", 4, "det"), T("mill", "mill", "NN", 2, "obj")});
  const auto vbp = Parse({T("They", "they", "PRP", 2, "nsubj"), T("live", "live", "VBP", 0, "root"),
                          T("in", "in", "IN", 4, "case"), T("Oslo", "Oslo", "NNP", 2, "obl")});
  const auto vb = Parse({T("Visit", "visit", "VB", 0, "root"), T("Oslo", "Oslo", "NNP", 1, "obj")});
  const auto is = Parse({T("Oslo", "Oslo", "NNP", 2, "nsubj"), T("is", "be", "VBZ", 0, "root"),
                         T("here", "here", "RB", 2, "advmod")});
  const auto were = Parse({T("They", "they", "PRP", 2, "nsubj"), T("were", "be", "VBD", 0, "root"),
                           T("there", "there", "RB", 2, "advmod")});
  const auto vbn_has = Parse({T("Ada", "Ada", "NNP", 3, "nsubj"), T("has", "have", "VBZ", 3, "aux"),
                              T("won", "win", "VBN", 0, "root"), T("twice", "twice", "RB", 3, "advmod")});
  const auto vbn_was = Parse({T("It", "it", "PRP", 3, "nsubj:pass"), T("was", "be", "VBD", 3, "aux:pass"),
                              T("built", "build", "VBN", 0, "root"), T("in", "in", "IN", 5, "case"),
                              T("1990", "1990", "CD", 3, "obl")});
  const auto vbg_is = Parse({T("Ada", "Ada", "NNP", 3, "nsubj"), T("is", "be", "VBZ", 3, "aux"),
                             T("running", "run", "VBG", 0, "root"), T("the", "the", "DT", 5, "det"),
                             T("mill", "mill", "NN", 3, "obj")});
  const auto vbn_bare = Parse({T("Built", "build", "VBN", 0, "root"), T("in", "in", "IN", 3, "case"),
                               T("1990", "1990", "CD", 1, "obl")});
  const auto adj = Parse({T("Oslo", "Oslo", "NNP", 2, "nsubj"), T("cold", "cold", "JJ", 0, "root")});
  const auto noun = Parse({T("The", "the", "DT", 2, "det"), T("capital", "capital", "NN", 0, "root"),
                           T("Oslo", "Oslo", "NNP", 2, "appos")});
  const auto modal = Parse({T("Ada", "Ada", "NNP", 3, "nsubj"), T("can", "can", "MD", 3, "aux"),
                            T("win", "win", "VB", 0, "root")});

  using K = PerturbKind;
  return {
      {bills, K::kNegation, "the 1995 Bills did not win the AFC East"},
      {bills, K::kFuture, "the 1995 Bills will win the AFC East"},
      {bills, K::kModality, "the 1995 Bills may win the AFC East"},
      {vbz, K::kNegation, "Ada does not own the mill"},
      {vbz, K::kModality, "Ada may own the mill"},
      {vbz, K::kFuture, "Ada will own the mill"},
      {vbp, K::kNegation, "They do not live in Oslo"},
      {vbp, K::kFuture, "They will live in Oslo"},
      {vb, K::kNegation, "Do not visit Oslo"},
      {vb, K::kModality, "May visit Oslo"},
      {is, K::kNegation, "Oslo is not here"},
      {is, K::kModality, "Oslo may be here"},
      {is, K::kFuture, "Oslo will be here"},
      {were, K::kNegation, "They were not there"},
      {were, K::kFuture, "They will be there"},
      {vbn_has, K::kNegation, "Ada has not won twice"},
      {vbn_has, K::kModality, "Ada may have won twice"},
      {vbn_has, K::kFuture, "Ada will have won twice"},
      {vbn_was, K::kNegation, "It was not built in 1990"},
      {vbn_was, K::kModality, "It may be built in 1990"},
      {vbg_is, K::kNegation, "Ada is not running the mill"},
      {vbg_is, K::kFuture, "Ada will be running the mill"},
      {vbn_bare, K::kNegation, "", SkipReason::kNoAuxiliary},
      {adj, K::kNegation, "", SkipReason::kRootNotVerb},
      {noun, K::kFuture, "", SkipReason::kRootNotVerb},
      {noun, K::kModality, "", SkipReason::kRootNotVerb},
      {modal, K::kNegation, "", SkipReason::kAuxiliaryConstruction},
  };
}

void CriterionSemanticRules(Outcome& out) {
  const auto cases = RuleCases();
  std::set<std::string> tags;
  size_t verb_cases = 0;
  for (const RuleCase& c : cases) {
    const SentenceRewrite r = PerturbSentence(c.parse, c.kind);
    std::string input;
    for (const Token& t : c.parse.tokens) input += (input.empty() ? "" : " ") + t.form;
    const std::string label = std::string(PerturbKindName(c.kind)) + "(\"" + input + "\")";
    if (c.expected.empty()) {
      out.Check(!r.perturbed && r.reason == c.reason,
                label + " should skip with " + std::string(SkipReasonName(c.reason)) + ", got " +
                    (r.perturbed ? "\"" + r.text + "\"" : std::string(SkipReasonName(r.reason))));
      continue;
    }
    out.Check(r.perturbed && r.text == c.expected,
              label + " gave \"" + r.text + "\", want \"" + c.expected + "\"");
    const auto root = c.parse.RootIndex();
    if (root) tags.insert(c.parse.tokens[*root].xpos + (c.parse.tokens[*root].lemma == "be" ? "/be" : ""));
    ++verb_cases;
  }
  for (const char* tag : {"VB", "VBP", "VBZ", "VBD", "VBN", "VBG", "VBZ/be"}) {
    out.Check(tags.count(tag) > 0, std::string("no unit sentence with a ") + tag + " root");
  }
  out.Check(cases.size() >= 20, "fewer than 20 unit sentences");
  out.Info(std::to_string(cases.size()) + " unit sentences, " + std::to_string(verb_cases) +
           " rewrites, " + std::to_string(cases.size() - verb_cases) + " skips");
}

// ---------------------------------------------------------------------------

// Independent re-statement of the mixing rule.
std::vector<std::string> OracleMix(const EvidenceSet& a, const std::string& ans_a,
                                   const EvidenceSet& b, const std::string& ans_b, size_t n) {
  auto order = [](const EvidenceSet& s, const std::string& ans) {
    std::vector<const Passage*> with, without;
    for (const Passage& p : s.passages) (OracleContains(p.text, ans) ? with : without).push_back(&p);
    auto by = [](const Passage* x, const Passage* y) {
      return x->retrieval_score != y->retrieval_score ? x->retrieval_score > y->retrieval_score
                                                      : x->pid < y->pid;
    };
    std::sort(with.begin(), with.end(), by);
    std::sort(without.begin(), without.end(), by);
    with.insert(with.end(), without.begin(), without.end());
    return with;
  };
  const auto oa = order(a, ans_a), ob = order(b, ans_b);
  std::vector<std::string> picked;
  size_t ia = 0, ib = 0;
  auto pull = [&](const std::vector<const Passage*>& o, size_t& i, size_t want) {
    size_t got = 0;
    for (; got < want && i < o.size(); ++i) {
      if (std::find(picked.begin(), picked.end(), o[i]->pid) != picked.end()) continue;
      picked.push_back(o[i]->pid);
      ++got;
    }
    return got;
  };
  size_t short_a = (n + 1) / 2 - pull(oa, ia, (n + 1) / 2);
  size_t short_b = n / 2 - pull(ob, ib, n / 2);
  size_t missing = short_a + short_b;
  missing -= pull(ob, ib, missing);
  missing -= pull(oa, ia, missing);
  std::sort(picked.begin(), picked.end());
  return picked;
}

void CriterionMixer(Outcome& out) {
  std::mt19937_64 gen(4242);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
  size_t instances = 0, recall_checks = 0, bad = 0;
  while (instances < 200) {
    const std::string ans_a = "Alder", ans_b = "Birch";
    std::vector<Passage> shared;
    const int n_shared = uniform(0, 2);
    for (int i = 0; i < n_shared; ++i) {
      const int kind = uniform(0, 3);
      std::string text = "shared passage";
      if (kind & 1) text += " Alder";
      if (kind & 2) text += " Birch";
      shared.push_back(MakePassage("q", "s" + std::to_string(i), text, uniform(0, 30), std::nullopt));
    }
    auto side = [&](const std::string& prefix, const std::string& ans) {
      std::vector<Passage> ps;
      const int size = uniform(1, 12);
      for (int i = 0; i < size; ++i) {
        const bool with = uniform(0, 2) == 0;
        ps.push_back(MakePassage("q", prefix + std::to_string(i),
                                 with ? "passage naming " + ans : "filler passage",
                                 uniform(0, 30), std::nullopt));
      }
      for (const Passage& p : shared) {
        if (uniform(0, 1)) ps.push_back(p);
      }
      return MakeEvidence("q", ps);
    };
    const EvidenceSet a = side("a", ans_a), b = side("b", ans_b);
    std::set<std::string> distinct;
    for (const auto* s : {&a, &b}) {
      for (const Passage& p : s->passages) distinct.insert(p.pid);
    }
    if (distinct.size() < 2) continue;
    const size_t n = static_cast<size_t>(uniform(2, static_cast<int>(distinct.size())));
    ++instances;
    const MixResult r = MixEvidence(a, {ans_a}, b, {ans_b}, n);
    std::vector<std::string> got;
    for (const Passage& p : r.evidence.passages) got.push_back(p.pid);
    std::vector<std::string> sorted = got;
    std::sort(sorted.begin(), sorted.end());
    const auto expected = OracleMix(a, ans_a, b, ans_b, n);
    bool ok = got.size() == n && sorted == expected && r.target_a == (n + 1) / 2 &&
              r.target_b == n / 2 && r.from_a + r.from_b == n;
    for (size_t i = 0; i < r.evidence.passages.size(); ++i) {
      const Passage& p = r.evidence.passages[i];
      ok = ok && p.rank == static_cast<int>(i + 1);
      if (i > 0) {
        const Passage& prev = r.evidence.passages[i - 1];
        ok = ok && (prev.retrieval_score > p.retrieval_score ||
                    (prev.retrieval_score == p.retrieval_score && prev.pid < p.pid));
      }
    }
    auto any = [](const EvidenceSet& s, const std::string& ans) {
      return std::any_of(s.passages.begin(), s.passages.end(),
                         [&](const Passage& p) { return OracleContains(p.text, ans); });
    };
    if (any(a, ans_a) && any(b, ans_b)) {
      ++recall_checks;
      ok = ok && any(r.evidence, ans_a) && any(r.evidence, ans_b);
    }
    if (!ok && ++bad <= 3) out.Info("mismatch at instance " + std::to_string(instances));
  }
  out.Check(bad == 0, std::to_string(bad) + " of 200 instances disagree with the oracle");
  out.Info("200 instances, dual-recall checked on " + std::to_string(recall_checks));
}

// ---------------------------------------------------------------------------

double OracleAuroc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0, pairs = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

void CriterionGbdt(Outcome& out) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<CalibrationExample> data;
  while (data.size() < 200) {
    const double x0 = u(gen), x1 = u(gen);
    const double margin = 2.0 * x0 + 0.3 * x1;
    if (std::fabs(margin) < 0.05) continue;
    data.push_back({{x0, x1}, margin > 0 ? 1 : 0});
  }
  // Best single-threshold stump, as a floor for the boosted model.
  double stump = 0;
  for (int f = 0; f < 2; ++f) {
    for (const auto& pivot : data) {
      for (int sign : {1, -1}) {
        size_t correct = 0;
        for (const auto& e : data) {
          const int pred = (sign * (e.features[f] - pivot.features[f]) >= 0) ? 1 : 0;
          correct += pred == e.label;
        }
        stump = std::max(stump, correct / 200.0);
      }
    }
  }
  GbdtHyperparams hp;
  hp.seed = 1;
  const TrainResult trained = Train(data, hp);
  const double acc = BinaryAccuracy(trained.model, data);
  out.Check(acc >= 0.99, Fmt("training accuracy %.4f < 0.99", acc));
  out.Check(acc >= stump, Fmt("boosted accuracy %.4f below stump %.4f", acc, stump));
  out.Info(Fmt("(i) accuracy %.4f after %.0f rounds; stump floor %.4f", acc, hp.rounds, stump));

  GbdtHyperparams full = hp;
  full.subsample = 1.0;
  const TrainResult mono = Train(data, full);
  size_t increases = 0;
  for (size_t i = 1; i < mono.loss_history.size(); ++i) {
    if (mono.loss_history[i] > mono.loss_history[i - 1] + 1e-12) ++increases;
  }
  out.Check(mono.loss_history.size() == static_cast<size_t>(full.rounds) + 1, "loss history length");
  out.Check(increases == 0, std::to_string(increases) + " loss increases at subsample 1.0");
  out.Info(Fmt("(ii) loss %.5f -> %.5f over %.0f rounds", mono.loss_history.front(),
               mono.loss_history.back(), full.rounds));

  double worst = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const size_t n = std::uniform_int_distribution<size_t>(2, 200)(gen);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (size_t i = 0; i < n; ++i) {
      s[i] = std::round(std::uniform_real_distribution<double>(0, 1)(gen) * 20) / 20;
      y[i] = std::uniform_int_distribution<int>(0, 1)(gen);
    }
    y[0] = 0;
    y[1] = 1;
    worst = std::max(worst, std::fabs(Auroc(s, y) - OracleAuroc(s, y)));
  }
  out.Check(worst <= 1e-9, Fmt("AUROC deviates from the pairwise oracle by %.3g", worst));
  out.Info(Fmt("(iii) 100 instances, max |AUROC - oracle| = %.3g", worst));

  const fs::path dir = kconflict::testing::MakeTempDir("kconflict-acc");
  SaveModel(trained.model, dir / "model.json");
  const GbdtModel loaded = LoadModel(dir / "model.json");
  size_t differ = 0;
  for (const auto& e : data) {
    const double a = trained.model.Predict(e.features), b = loaded.Predict(e.features);
    if (std::memcmp(&a, &b, sizeof(double)) != 0) ++differ;
  }
  fs::remove_all(dir);
  out.Check(differ == 0, std::to_string(differ) + " predictions differ after save/load");
  out.Info("(iv) save/load predictions bit-equal on 200 rows");
}

// ---------------------------------------------------------------------------

std::vector<CalibrationExample> ToyPairs(size_t n, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CalibrationExample> out;
  for (size_t i = 0; i < n; ++i) {
    const double gen_prob = u(gen);
    const std::vector<double> encoder = {u(gen), u(gen), u(gen)};
    out.push_back({AssembleFeatures(gen_prob, encoder, 4), gen_prob > 0.6 ? 1 : 0});
  }
  return out;
}

void CriterionCalibration(Outcome& out) {
  const auto train = ToyPairs(2000, 7);
  const auto held = ToyPairs(1000, 8);
  GbdtHyperparams hp;
  hp.seed = 3;
  const GbdtModel model = Train(train, hp).model;
  const double acc = BinaryAccuracy(model, held);
  out.Check(acc >= 0.95, Fmt("held-out accuracy %.4f < 0.95", acc));

  auto shuffled = train;
  std::vector<int> labels;
  for (const auto& e : shuffled) labels.push_back(e.label);
  std::mt19937_64 gen(17);
  std::shuffle(labels.begin(), labels.end(), gen);
  for (size_t i = 0; i < shuffled.size(); ++i) shuffled[i].label = labels[i];
  auto held_shuffled = held;
  std::vector<int> held_labels;
  for (const auto& e : held_shuffled) held_labels.push_back(e.label);
  std::shuffle(held_labels.begin(), held_labels.end(), gen);
  const GbdtModel noise = Train(shuffled, hp).model;
  std::vector<double> scores;
  for (const auto& e : held_shuffled) scores.push_back(noise.Predict(e.features));
  const double auroc = Auroc(scores, held_labels);
  out.Check(auroc >= 0.4 && auroc <= 0.6, Fmt("shuffled-label AUROC %.4f outside [0.4, 0.6]", auroc));
  out.Info(Fmt("held-out accuracy %.4f; shuffled-label AUROC %.4f", acc, auroc));
}

// ---------------------------------------------------------------------------

struct ToyFiles {
  fs::path dir;
  ToyFiles() : dir(kconflict::testing::MakeTempDir("kconflict-toy")) {
    WriteToyCorpus(MakeToyCorpus(), dir);
  }
  ~ToyFiles() { fs::remove_all(dir); }
};

EntityStudyConfig StudyConfig(const ToyFiles& toy, Json reader) {
  EntityStudyConfig c;
  c.questions = toy.dir / "questions.jsonl";
  c.passages = toy.dir / "passages.jsonl";
  c.train_questions = toy.dir / "train_questions.jsonl";
  c.seed = 2022;
  c.all_except_top_k = {};
  c.reader = std::move(reader);
  return c;
}

void CriterionTrends(Outcome& out) {
  ToyFiles toy;
  const auto questions = LoadQuestions(toy.dir / "questions.jsonl");
  std::map<std::string, QuestionRecord> by_qid;
  for (const auto& q : questions) by_qid[q.qid] = q;
  const auto evidence = LoadEvidence(toy.dir / "passages.jsonl");

  // (i) flip rate at 25%: top-attention vs random.
  EntityStudyConfig c = StudyConfig(toy, {{"type", "sim"}});
  c.strategies = {SelectionStrategy::kRandom, SelectionStrategy::kTopAttention};
  c.fractions = {0.25};
  const EntityStudyResult r = RunEntityStudy(c);
  auto tally_flips = [&](const StudyCell& cell) {
    size_t flips = 0;
    for (const auto& [qid, pred] : cell.predictions) {
      flips += OracleNormalize(pred.prediction) != OracleNormalize(r.baseline.at(qid).prediction);
    }
    return 100.0 * static_cast<double>(flips) / static_cast<double>(cell.predictions.size());
  };
  const double flip_random = tally_flips(r.cells[0]), flip_top = tally_flips(r.cells[1]);
  out.Check(std::fabs(flip_random - r.cells[0].flip_rate) < 0.01 &&
                std::fabs(flip_top - r.cells[1].flip_rate) < 0.01,
            "reported flip rates disagree with the tally");
  out.Check(flip_top > flip_random, Fmt("top-attention flips %.2f%% <= random %.2f%%", flip_top, flip_random));
  out.Info(Fmt("(i) 25%% substitution flip rate: top-attention %.2f%%, random %.2f%% (n = %.0f)",
               flip_top, flip_random, static_cast<double>(r.eligible)));

  // (ii) M_R against beta.
  std::vector<double> ratios;
  std::string line = "(ii) M_R by beta:";
  for (double beta : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    EntityStudyConfig cb = StudyConfig(
        toy, {{"type", "sim"}, {"memorize_gold", true}, {"memory_bias", beta}, {"focus_k", 3}});
    cb.strategies = {SelectionStrategy::kRandom};
    cb.fractions = {0.5};
    const EntityStudyResult rb = RunEntityStudy(cb);
    size_t orig = 0, sub = 0;
    for (const auto& [qid, pred] : rb.cells[0].predictions) {
      const std::string norm = OracleNormalize(pred.prediction);
      for (const auto& a : by_qid.at(qid).answers) {
        if (norm == OracleNormalize(a)) {
          ++orig;
          break;
        }
      }
      sub += norm == OracleNormalize(rb.substitutes.at(qid));
    }
    const double mr = orig + sub == 0 ? 0.0 : 100.0 * orig / static_cast<double>(orig + sub);
    ratios.push_back(mr);
    line += Fmt(" %.1f->%.2f", beta, mr);
  }
  for (size_t i = 1; i < ratios.size(); ++i) {
    out.Check(ratios[i] + 1e-9 >= ratios[i - 1], "M_R decreases between consecutive beta values");
  }
  out.Info(line);

  // (iii) focus_k = 1: substituting the top-attention passage.
  EntityStudyConfig ck = StudyConfig(toy, {{"type", "sim"}, {"focus_k", 1}});
  ck.strategies = {};
  ck.top_counts = {1};
  const EntityStudyResult rk = RunEntityStudy(ck);
  size_t flippable = 0, flipped = 0;
  for (const auto& [qid, pred] : rk.top_counts[0].predictions) {
    const EvidenceSet& ev = evidence.at(qid);
    const Passage* top = nullptr;
    for (const Passage& p : ev.passages) {
      if (top == nullptr || *p.attention_score > *top->attention_score ||
          (*p.attention_score == *top->attention_score && p.pid < top->pid)) {
        top = &p;
      }
    }
    bool holds_answer = false;
    for (const auto& a : by_qid.at(qid).answers) holds_answer |= OracleContains(top->text, a);
    if (!holds_answer) continue;
    ++flippable;
    flipped += OracleNormalize(pred.prediction) != OracleNormalize(rk.baseline.at(qid).prediction);
  }
  out.Check(flippable > 0, "no flippable examples");
  out.Check(flipped == flippable, std::to_string(flipped) + " of " + std::to_string(flippable) +
                                      " flippable examples flipped");
  out.Info("(iii) " + std::to_string(flipped) + "/" + std::to_string(flippable) +
           " flippable examples flipped");
}

// ---------------------------------------------------------------------------

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void CriterionDeterminism(Outcome& out) {
  const fs::path dir = kconflict::testing::MakeTempDir("kconflict-det");
  const std::string toy = std::string(KCONFLICT_SOURCE_DIR) + "/data/toy/";
  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    const fs::path report = dir / ("report" + std::to_string(run) + ".json");
    const std::string cmd = std::string(KCONFLICT_CLI) + " pipeline entity-study --questions " +
                            toy + "questions.jsonl --passages " + toy +
                            "passages.jsonl --train-questions " + toy +
                            "train_questions.jsonl --seed 13 --out " + report.string();
    const int status = std::system(cmd.c_str());
    out.Check(status == 0, "run " + std::to_string(run) + " exited with " + std::to_string(status));
    reports.push_back(Slurp(report));
  }
  fs::remove_all(dir);
  out.Check(!reports[0].empty(), "empty report");
  out.Check(reports[0] == reports[1], "reports differ between runs");
  out.Info(std::to_string(reports[0].size()) + " byte reports compared");
}

// ---------------------------------------------------------------------------

void CriterionConfidenceDrop(Outcome& out) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ConfidencePair> pairs;
  for (int i = 0; i < 1000; ++i) {
    double before = u(gen), after = u(gen);
    const int special = static_cast<int>(u(gen) * 10);
    if (special == 0) before = 0.0;
    if (special == 1) after = 0.0;
    if (special == 2) after = before;
    if (special == 3) after = std::min(1.0, before * std::exp(3.0));
    pairs.push_back({"q" + std::to_string(i), before, after, ConfidenceKind::kGenProb});
  }
  const ConfidenceDropStats s = ComputeConfidenceDrop(pairs);
  size_t counted = 0, excluded = 0, dropped = 0;
  std::vector<size_t> hist(24, 0);
  for (const auto& p : pairs) {
    if (p.before == 0) {
      ++excluded;
      continue;
    }
    ++counted;
    dropped += p.after < p.before;
    int bin = 0;
    if (p.after > 0) {
      const double r = std::log(p.after / p.before);
      bin = static_cast<int>(std::floor((r + 3.0) / 0.25));
      bin = std::clamp(bin, 0, 23);
    }
    ++hist[static_cast<size_t>(bin)];
  }
  size_t mass = 0;
  for (size_t h : s.histogram) mass += h;
  out.Check(s.pairs == counted && s.excluded_zero_before == excluded && s.dropped == dropped,
            "pair counts differ from the recount");
  out.Check(std::fabs(s.fraction_dropped - static_cast<double>(dropped) / counted) < 1e-12,
            "fraction dropped differs");
  out.Check(s.histogram == hist, "histogram differs from the recount");
  out.Check(mass == s.pairs, "histogram mass differs from the pair count");
  out.Info(Fmt("%.0f pairs counted, %.0f excluded, %.2f%% dropped", counted, excluded,
               100.0 * dropped / counted));
}

}  // namespace

int main() {
  SetLogSink([](std::string_view) {});
  Run(1, "M_R arithmetic against published NQ and TriviaQA rows (0.1pp)", 1, CriterionMemorizationRatio);
  Run(2, "Full-substitution invariant and selection counts", 1, CriterionFullSubstitution);
  Run(3, "Semantic rule fidelity", 1, CriterionSemanticRules);
  Run(4, "Mixer invariants against a counting oracle", 5, CriterionMixer);
  Run(5, "GBDT correctness", 30, CriterionGbdt);
  Run(6, "Calibration pipeline sanity", 30, CriterionCalibration);
  Run(7, "End-to-end trends with the simulated reader", 60, CriterionTrends);
  Run(8, "Determinism of pipeline entity-study", 60, CriterionDeterminism);
  Run(9, "Confidence-drop oracle", 1, CriterionConfidenceDrop);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
