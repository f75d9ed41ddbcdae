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

#include "kconflict/error.h"
#include "kconflict/reader_sim.h"
#include "test_support.h"

namespace kconflict {
namespace {

using testing::MakeEvidence;
using testing::MakePassage;

const QuestionRecord kQ{"q", "Who wrote it?", {"Ada"}, EntityType::kPerson};

EvidenceSet TwoVoices(double ada, double bob) {
  return MakeEvidence("q", {MakePassage("q", "p1", "Ada wrote it.", 1, ada, {{"Ada", EntityType::kPerson}}),
                            MakePassage("q", "p2", "Bob wrote it.", 1, bob, {{"Bob", EntityType::kPerson}})});
}

ReaderSimConfig Config(int focus_k, double bias = 0.0) {
  ReaderSimConfig c;
  c.focus_k = focus_k;
  c.memory_bias = bias;
  return c;
}

TEST(ReaderSimTest, PicksHighestVoteAndReportsShare) {
  const PredictionRecord p = Simulate(kQ, TwoVoices(0.3, 0.1), Config(2));
  EXPECT_EQ(p.prediction, "Ada");
  EXPECT_NEAR(p.gen_prob, 0.75, 1e-12);
  ASSERT_TRUE(p.encoder_features.has_value());
  ASSERT_EQ(p.encoder_features->size(), kReaderSimFeatureDim);
  EXPECT_EQ((*p.encoder_features)[0], 2.0);
  EXPECT_NEAR((*p.encoder_features)[2], 0.25, 1e-12);
}

TEST(ReaderSimTest, FocusLimitsPassagesRead) {
  const PredictionRecord p = Simulate(kQ, TwoVoices(0.1, 0.3), Config(1));
  EXPECT_EQ(p.prediction, "Bob");
  EXPECT_EQ(p.gen_prob, 1.0);
}

TEST(ReaderSimTest, MemoryBiasDominatesEvidence) {
  ReaderSimConfig c = Config(2, 5.0);
  c.memory["q"] = "Ada";
  EXPECT_EQ(Simulate(kQ, TwoVoices(0.1, 0.9), c).prediction, "Ada");
  c.memory_bias = 0.0;
  EXPECT_EQ(Simulate(kQ, TwoVoices(0.1, 0.9), c).prediction, "Bob");
}

TEST(ReaderSimTest, TieBrokenByBias) {
  // Equal votes; without bias the lexicographically smaller surface wins.
  EXPECT_EQ(Simulate(kQ, TwoVoices(0.5, 0.5), Config(2)).prediction, "Ada");
  ReaderSimConfig c = Config(2, 0.01);
  c.memory["q"] = "Bob";
  const PredictionRecord p = Simulate(kQ, TwoVoices(0.5, 0.5), c);
  EXPECT_EQ(p.prediction, "Bob");
  EXPECT_EQ((*p.encoder_features)[3], 1.0);
}

TEST(ReaderSimTest, MemorizedAnswerAbsentFromEvidenceIsACandidate) {
  ReaderSimConfig c = Config(2, 2.0);
  c.memorize_gold = true;
  const EvidenceSet e = MakeEvidence(
      "q", {MakePassage("q", "p1", "Bob wrote it.", 1, 0.5, {{"Bob", EntityType::kPerson}})});
  EXPECT_EQ(Simulate(kQ, e, c).prediction, "Ada");
}

TEST(ReaderSimTest, NoCandidatesFallsBackToMemoryOrEmpty) {
  const EvidenceSet e = MakeEvidence("q", {MakePassage("q", "p1", "Nothing here.", 1, 0.5)});
  const PredictionRecord none = Simulate(kQ, e, Config(1));
  EXPECT_EQ(none.prediction, "");
  EXPECT_EQ(none.gen_prob, 0.0);
  ReaderSimConfig c = Config(1);
  c.memorize_gold = true;
  const PredictionRecord mem = Simulate(kQ, e, c);
  EXPECT_EQ(mem.prediction, "Ada");
  EXPECT_EQ(mem.gen_prob, 1.0);
}

TEST(ReaderSimTest, IgnoresOtherEntityTypes) {
  const EvidenceSet e = MakeEvidence(
      "q", {MakePassage("q", "p1", "Ada went to Oslo.", 1, 0.5,
                        {{"Ada", EntityType::kPerson}, {"Oslo", EntityType::kLocation}})});
  EXPECT_EQ(Simulate(kQ, e, Config(1)).prediction, "Ada");
}

TEST(ReaderSimTest, RetrievalScoreSource) {
  EvidenceSet e = TwoVoices(0.9, 0.1);
  e.passages[1].retrieval_score = 10;
  ReaderSimConfig c = Config(1);
  c.score_source = ScoreSource::kRetrieval;
  EXPECT_EQ(Simulate(kQ, e, c).prediction, "Bob");
}

TEST(ReaderSimTest, InvalidInputsThrow) {
  EXPECT_THROW(Simulate(kQ, EvidenceSet{"q", {}}, Config(1)), Error);
  EvidenceSet missing = TwoVoices(0.1, 0.2);
  missing.passages[0].attention_score.reset();
  EXPECT_THROW(Simulate(kQ, missing, Config(1)), Error);
  EXPECT_THROW(Simulate(kQ, TwoVoices(-0.1, 0.2), Config(1)), Error);
  EXPECT_THROW(Simulate(kQ, TwoVoices(0.1, 0.2), Config(0)), Error);
}

TEST(ReaderSimTest, ConfigJsonRoundTrip) {
  ReaderSimConfig c = Config(3, 1.5);
  c.memory["q"] = "Ada";
  c.score_source = ScoreSource::kRetrieval;
  c.seed = 9;
  EXPECT_EQ(ToJson(ReaderSimConfigFromJson(ToJson(c))), ToJson(c));
  EXPECT_EQ(ReaderSimConfigFromJson(Json::object()).focus_k, 1);
}

}  // namespace
}  // namespace kconflict
