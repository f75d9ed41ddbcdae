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

#include <gtest/gtest.h>

#include "kconflict/entity_perturb.h"
#include "kconflict/error.h"
#include "test_support.h"

namespace kconflict {
namespace {

using testing::MakeEvidence;
using testing::MakePassage;
using testing::OracleContains;

const QuestionRecord kBills{"bills", "When did the Bills last win their division?", {"1995"},
                            EntityType::kDate};

EvidenceSet FourCandidates() {
  return MakeEvidence(
      "bills", {MakePassage("bills", "p1", "In 1995 the team won.", 10, 0.1, {{"1995", EntityType::kDate}}),
                MakePassage("bills", "p2", "The 1995 season ended.", 40, 0.4, {{"1995", EntityType::kDate}}),
                MakePassage("bills", "p3", "Unrelated filler text.", 90, 0.9),
                MakePassage("bills", "p4", "Back in 1995, again 1995.", 30, 0.2, {{"1995", EntityType::kDate}}),
                MakePassage("bills", "p5", "The 1995 Bills won the AFC East.", 20, 0.8,
                            {{"1995", EntityType::kDate}})});
}

SubstitutionPlan Plan(SelectionStrategy s, SelectionAmount amount, uint64_t seed = 1) {
  return SubstitutionPlan{s, amount, FixedSubstitute{"1936"}, seed};
}

TEST(SelectionCountTest, RoundHalfUpWithMinimumOne) {
  EXPECT_EQ(SelectionCount(0.5, 3), 2u);
  EXPECT_EQ(SelectionCount(0.25, 1), 1u);
  EXPECT_EQ(SelectionCount(0.25, 2), 1u);
  EXPECT_EQ(SelectionCount(0.25, 6), 2u);
  EXPECT_EQ(SelectionCount(0.75, 2), 2u);
  EXPECT_EQ(SelectionCount(1.0, 7), 7u);
  EXPECT_EQ(SelectionCount(0.35, 10), 4u);
  EXPECT_EQ(SelectionCount(0.5, 0), 0u);
}

TEST(SelectTargetPassagesTest, TopRetrievalTakesHighestScores) {
  const auto pids = SelectTargetPassages(FourCandidates(), {"1995"},
                                         Plan(SelectionStrategy::kTopRetrieval, FractionAmount{0.5}));
  EXPECT_EQ(pids, (std::vector<std::string>{"p2", "p4"}));
}

TEST(SelectTargetPassagesTest, TopAttentionTakesHighestAttention) {
  const auto pids = SelectTargetPassages(FourCandidates(), {"1995"},
                                         Plan(SelectionStrategy::kTopAttention, FractionAmount{0.25}));
  EXPECT_EQ(pids, (std::vector<std::string>{"p5"}));
}

TEST(SelectTargetPassagesTest, AllExceptTopK) {
  const auto pids = SelectTargetPassages(FourCandidates(), {"1995"},
                                         Plan(SelectionStrategy::kTopAttention, AllExceptTopK{1}));
  EXPECT_EQ(pids, (std::vector<std::string>{"p1", "p2", "p4"}));

  EvidenceSet sixteen;
  sixteen.qid = "q";
  for (int i = 0; i < 16; ++i) {
    sixteen.passages.push_back(MakePassage("q", "p" + std::to_string(10 + i), "Ada", i, i / 16.0,
                                           {{"Ada", EntityType::kPerson}}));
  }
  EXPECT_EQ(SelectTargetPassages(sixteen, {"Ada"}, Plan(SelectionStrategy::kTopAttention, AllExceptTopK{1}))
                .size(),
            15u);
}

TEST(SelectTargetPassagesTest, TopCountClampsToCandidates) {
  EXPECT_EQ(SelectTargetPassages(FourCandidates(), {"1995"},
                                 Plan(SelectionStrategy::kTopAttention, TopCount{2})),
            (std::vector<std::string>{"p2", "p5"}));
  EXPECT_EQ(SelectTargetPassages(FourCandidates(), {"1995"},
                                 Plan(SelectionStrategy::kTopAttention, TopCount{9}))
                .size(),
            4u);
}

TEST(SelectTargetPassagesTest, NoCandidatesGivesEmpty) {
  const EvidenceSet e = MakeEvidence("q", {MakePassage("q", "p", "nothing", 1, 1)});
  EXPECT_TRUE(SelectTargetPassages(e, {"1995"}, Plan(SelectionStrategy::kRandom, FractionAmount{1})).empty());
}

TEST(SelectTargetPassagesTest, MissingAttentionIsAnError) {
  EvidenceSet e = FourCandidates();
  e.passages[0].attention_score.reset();
  EXPECT_THROW(SelectTargetPassages(e, {"1995"}, Plan(SelectionStrategy::kTopAttention, FractionAmount{0.5})),
               SelectionError);
}

TEST(SelectTargetPassagesTest, RandomIsSeededAndPerQuestion) {
  const EvidenceSet e = FourCandidates();
  const auto plan = Plan(SelectionStrategy::kRandom, FractionAmount{0.5}, 77);
  EXPECT_EQ(SelectTargetPassages(e, {"1995"}, plan), SelectTargetPassages(e, {"1995"}, plan));
  std::set<std::vector<std::string>> seen;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    seen.insert(SelectTargetPassages(e, {"1995"}, Plan(SelectionStrategy::kRandom, FractionAmount{0.5}, seed)));
  }
  EXPECT_GT(seen.size(), 1u);
}

TEST(ValidatePlanTest, RejectsBadAmounts) {
  EXPECT_THROW(ValidatePlan(Plan(SelectionStrategy::kRandom, FractionAmount{0.0})), SelectionError);
  EXPECT_THROW(ValidatePlan(Plan(SelectionStrategy::kRandom, FractionAmount{1.5})), SelectionError);
  EXPECT_THROW(ValidatePlan(Plan(SelectionStrategy::kTopAttention, AllExceptTopK{0})), SelectionError);
  EXPECT_THROW(ValidatePlan(Plan(SelectionStrategy::kTopAttention, TopCount{0})), SelectionError);
  EXPECT_NO_THROW(ValidatePlan(Plan(SelectionStrategy::kRandom, FractionAmount{0.25})));
}

TEST(SampleSubstituteTest, ExcludesOriginal) {
  const EntityPool pool = BuildEntityPool(
      {{"a", "", {"1936"}, EntityType::kDate}, {"b", "", {"1995"}, EntityType::kDate}});
  for (uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(SampleSubstitute(pool, EntityType::kDate, {"1995"}, seed), "1936");
  }
}

TEST(SampleSubstituteTest, ExhaustionIsAnError) {
  const EntityPool pool = BuildEntityPool({{"a", "", {"X"}, EntityType::kPerson}});
  EXPECT_THROW(SampleSubstitute(pool, EntityType::kPerson, {"X"}, 1), SamplingError);
  EXPECT_THROW(SampleSubstitute(pool, EntityType::kLocation, {}, 1), SamplingError);
}

TEST(SampleSubstituteTest, DeterministicAndFrequencyWeighted) {
  const EntityPool pool = BuildEntityPool({{"a", "", {"Ann"}, EntityType::kPerson},
                                           {"b", "", {"Ann"}, EntityType::kPerson},
                                           {"c", "", {"Ann"}, EntityType::kPerson},
                                           {"d", "", {"Bob"}, EntityType::kPerson}});
  EXPECT_EQ(SampleSubstitute(pool, EntityType::kPerson, {}, 5),
            SampleSubstitute(pool, EntityType::kPerson, {}, 5));
  int a = 0;
  for (uint64_t seed = 0; seed < 400; ++seed) a += SampleSubstitute(pool, EntityType::kPerson, {}, seed) == "Ann";
  EXPECT_GT(a, 240);
  EXPECT_LT(a, 360);
}

TEST(SubstituteTest, BillsEntitySubstitution) {
  const EvidenceSet e = MakeEvidence(
      "bills", {MakePassage("bills", "p", "... the 1995 Bills won the AFC East ...", 1, 1,
                            {{"1995", EntityType::kDate}, {"AFC East", EntityType::kOrganization}})});
  const SubstitutionResult r =
      Substitute(e, kBills, Plan(SelectionStrategy::kRandom, FractionAmount{1.0}));
  EXPECT_EQ(r.evidence.passages[0].text, "... the 1936 Bills won the AFC East ...");
  // The later mention shifts by the length difference (zero here) and still
  // covers its text.
  const auto& m = r.evidence.passages[0].mentions;
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(MentionText(r.evidence.passages[0], m[0]), "1936");
  EXPECT_EQ(MentionText(r.evidence.passages[0], m[1]), "AFC East");
  EXPECT_EQ(r.record.substitute, "1936");
  EXPECT_EQ(r.record.answer_passages_before, 1u);
  EXPECT_EQ(r.record.answer_passages_after, 0u);
}

TEST(SubstituteTest, ShiftsDownstreamOffsets) {
  const EvidenceSet e = MakeEvidence(
      "q", {MakePassage("q", "p", "Ada met Bob; later Ada left Oslo.", 1, 1,
                        {{"Ada", EntityType::kPerson}, {"Oslo", EntityType::kLocation}})});
  const QuestionRecord q{"q", "who?", {"Ada"}, EntityType::kPerson};
  SubstitutionPlan plan{SelectionStrategy::kRandom, FractionAmount{1.0}, FixedSubstitute{"Grace Hopper"}, 1};
  const SubstitutionResult r = Substitute(e, q, plan);
  const Passage& p = r.evidence.passages[0];
  EXPECT_EQ(p.text, "Grace Hopper met Bob; later Grace Hopper left Oslo.");
  ASSERT_EQ(p.mentions.size(), 3u);
  EXPECT_EQ(MentionText(p, p.mentions[2]), "Oslo");
  EXPECT_TRUE(CheckPassage(p).empty());
}

TEST(SubstituteTest, FullSubstitutionRemovesEveryAlias) {
  const SubstitutionResult r = Substitute(FourCandidates(), kBills,
                                          Plan(SelectionStrategy::kTopRetrieval, FractionAmount{1.0}));
  for (const Passage& p : r.evidence.passages) {
    EXPECT_FALSE(OracleContains(p.text, "1995")) << p.pid;
  }
  size_t with_sub = 0;
  for (const Passage& p : r.evidence.passages) with_sub += OracleContains(p.text, "1936");
  EXPECT_EQ(with_sub, 4u);
}

TEST(SubstituteTest, PartialRandomModifiesExactlyOneOfTwo) {
  const EvidenceSet e = MakeEvidence(
      "bills", {MakePassage("bills", "a", "In 1995 they won.", 5, 0.5, {{"1995", EntityType::kDate}}),
                MakePassage("bills", "b", "1995 was the year; 1995 indeed.", 4, 0.4,
                            {{"1995", EntityType::kDate}}),
                MakePassage("bills", "c", "Filler.", 3, 0.3)});
  const auto plan = Plan(SelectionStrategy::kRandom, FractionAmount{0.5}, 9);
  const SubstitutionResult r1 = Substitute(e, kBills, plan);
  const SubstitutionResult r2 = Substitute(e, kBills, plan);
  size_t modified = 0, replaced = 0;
  for (size_t i = 0; i < e.passages.size(); ++i) {
    const bool changed = r1.evidence.passages[i].text != e.passages[i].text;
    modified += changed;
    if (!changed) {
      EXPECT_EQ(r1.evidence.passages[i], e.passages[i]);
      continue;
    }
    // Independent count of replaced mentions: occurrences of "1995" before.
    size_t count = 0;
    for (size_t pos = e.passages[i].text.find("1995"); pos != std::string::npos;
         pos = e.passages[i].text.find("1995", pos + 1)) {
      ++count;
    }
    replaced += count;
    EXPECT_FALSE(OracleContains(r1.evidence.passages[i].text, "1995"));
  }
  EXPECT_EQ(modified, 1u);
  size_t recorded = 0;
  for (const PassageChange& c : r1.record.passages) recorded += c.mentions_replaced;
  EXPECT_EQ(recorded, replaced);
  for (size_t i = 0; i < e.passages.size(); ++i) {
    EXPECT_EQ(r1.evidence.passages[i], r2.evidence.passages[i]);
  }
}

TEST(SubstituteTest, ScoresCarriedOver) {
  const SubstitutionResult r = Substitute(FourCandidates(), kBills,
                                          Plan(SelectionStrategy::kTopAttention, FractionAmount{0.5}));
  const EvidenceSet e = FourCandidates();
  for (size_t i = 0; i < e.passages.size(); ++i) {
    EXPECT_EQ(r.evidence.passages[i].retrieval_score, e.passages[i].retrieval_score);
    EXPECT_EQ(r.evidence.passages[i].attention_score, e.passages[i].attention_score);
  }
}

TEST(SubstituteTest, PoolPlanNeedsPool) {
  SubstitutionPlan plan{SelectionStrategy::kRandom, FractionAmount{1.0}, PoolSubstitute{}, 1};
  EXPECT_THROW(Substitute(FourCandidates(), kBills, plan, nullptr), Error);
}

TEST(PerturbationRecordTest, JsonRoundTrip) {
  const SubstitutionResult r = Substitute(FourCandidates(), kBills,
                                          Plan(SelectionStrategy::kTopRetrieval, FractionAmount{0.5}));
  const Json j = ToJson(r.record);
  EXPECT_EQ(ToJson(PerturbationRecordFromJson(j)), j);
  EXPECT_EQ(j.at("strategy"), "top-retrieval");
}

}  // namespace
}  // namespace kconflict
