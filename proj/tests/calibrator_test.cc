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

#include <cmath>
#include <filesystem>

#include "kconflict/calibrator.h"
#include "kconflict/error.h"
#include "kconflict/rng.h"
#include "test_support.h"

namespace kconflict {
namespace {

std::vector<CalibrationExample> Threshold(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<CalibrationExample> out;
  for (size_t i = 0; i < n; ++i) {
    const double x = rng.UniformReal(), y = rng.UniformReal();
    out.push_back({{x, y}, x > 0.6 ? 1 : 0});
  }
  return out;
}

GbdtHyperparams Small(uint64_t seed = 3) {
  GbdtHyperparams hp;
  hp.rounds = 20;
  hp.max_depth = 3;
  hp.seed = seed;
  return hp;
}

TEST(TrainTest, RejectsBadData) {
  EXPECT_THROW(Train({{{0.1}, 1}}, Small()), CalibrationError);
  EXPECT_THROW(Train({{{0.1}, 1}, {{0.2}, 1}}, Small()), CalibrationError);
  EXPECT_THROW(Train({{{0.1}, 1}, {{0.2, 0.3}, 0}}, Small()), CalibrationError);
  EXPECT_THROW(Train({{{NAN}, 1}, {{0.2}, 0}}, Small()), CalibrationError);
}

TEST(TrainTest, RejectsBadHyperparams) {
  GbdtHyperparams hp = Small();
  hp.subsample = 0;
  EXPECT_THROW(ValidateHyperparams(hp), Error);
  hp = Small();
  hp.learning_rate = -1;
  EXPECT_THROW(ValidateHyperparams(hp), Error);
  hp = Small();
  hp.max_depth = -1;
  EXPECT_THROW(ValidateHyperparams(hp), Error);
}

TEST(TrainTest, LearnsThreshold) {
  const TrainResult r = Train(Threshold(400, 1), Small());
  EXPECT_GE(BinaryAccuracy(r.model, Threshold(400, 2)), 0.95);
  EXPECT_EQ(r.loss_history.size(), 21u);
  EXPECT_LT(r.loss_history.back(), r.loss_history.front());
}

TEST(TrainTest, SameSeedSameModel) {
  const auto data = Threshold(200, 5);
  EXPECT_EQ(ToJson(Train(data, Small(9)).model), ToJson(Train(data, Small(9)).model));
}

TEST(GbdtModelTest, ZeroTreesPredictsPrior) {
  GbdtHyperparams hp = Small();
  hp.rounds = 0;
  const TrainResult r = Train({{{0.0}, 1}, {{1.0}, 1}, {{2.0}, 1}, {{3.0}, 0}}, hp);
  EXPECT_NEAR(r.model.Predict({7.0}), 0.75, 1e-12);
  EXPECT_THROW(r.model.Logit({1.0, 2.0}), CalibrationError);
}

TEST(GbdtModelTest, LogitIsClamped) {
  GbdtModel m;
  m.feature_dim = 1;
  m.base_logit = 100;
  EXPECT_EQ(m.Logit({0.0}), kLogitClamp);
  m.base_logit = -100;
  EXPECT_EQ(m.Logit({0.0}), -kLogitClamp);
}

TEST(GbdtModelTest, SaveLoadRoundTrip) {
  const TrainResult r = Train(Threshold(100, 4), Small());
  const auto dir = testing::MakeTempDir("kconflict-model");
  SaveModel(r.model, dir / "m.json");
  const GbdtModel back = LoadModel(dir / "m.json");
  for (const auto& ex : Threshold(50, 8)) EXPECT_EQ(back.Predict(ex.features), r.model.Predict(ex.features));
  std::filesystem::remove_all(dir);
}

TEST(AssembleFeaturesTest, Examples) {
  EXPECT_EQ(AssembleFeatures(0.4, std::vector<double>{1, 2}), (std::vector<double>{0.4, 1, 2}));
  EXPECT_EQ(AssembleFeatures(0.4, std::nullopt), (std::vector<double>{0.4}));
  EXPECT_THROW(AssembleFeatures(0.4, std::nullopt, 3), CalibrationError);
  EXPECT_THROW(AssembleFeatures(1.2, std::nullopt), CalibrationError);
}

TEST(AurocTest, Examples) {
  EXPECT_DOUBLE_EQ(Auroc({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}), 0.75);
  EXPECT_DOUBLE_EQ(Auroc({0.5, 0.5}, {0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(Auroc({0.1, 0.9}, {0, 1}), 1.0);
  EXPECT_THROW(Auroc({0.1, 0.9}, {1, 1}), UndefinedMetricError);
}

TEST(BinaryAccuracyTest, Threshold) {
  EXPECT_DOUBLE_EQ(BinaryAccuracy({0.2, 0.5, 0.7}, {0, 1, 0}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(BinaryAccuracy({0.2, 0.5, 0.7}, {0, 1, 0}, 0.8), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(BinaryAccuracy({0.2, 0.5, 0.7}, {0, 0, 0}, 0.8), 1.0);
}

TEST(RiskCoverageTest, Curve) {
  const auto curve = RiskCoverage({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1});
  ASSERT_EQ(curve.size(), 21u);
  EXPECT_EQ(curve[0].answered, 4u);
  EXPECT_DOUBLE_EQ(*curve[0].risk, 0.5);
  EXPECT_EQ(curve[7].answered, 3u);  // threshold 0.35
  EXPECT_DOUBLE_EQ(*curve[7].risk, 1.0 / 3.0);
  EXPECT_EQ(curve[16].answered, 1u);
  EXPECT_DOUBLE_EQ(*curve[16].risk, 0.0);
  EXPECT_EQ(curve[20].answered, 0u);
  EXPECT_FALSE(curve[20].risk.has_value());
  EXPECT_DOUBLE_EQ(curve[20].coverage, 0.0);
}

}  // namespace
}  // namespace kconflict
