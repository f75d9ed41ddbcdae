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

#ifndef KCONFLICT_CALIBRATOR_H_
#define KCONFLICT_CALIBRATOR_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kconflict/corpus.h"

namespace kconflict {

struct GbdtHyperparams {
  int rounds = 100;
  double learning_rate = 0.5;
  // Fraction of rows sampled per tree, and of features sampled per tree,
  // per level and per split.
  double subsample = 0.5;
  int max_depth = 6;
  double l2_leaf_reg = 1.0;
  double min_child_weight = 1.0;
  uint64_t seed = 0;
};

void ValidateHyperparams(const GbdtHyperparams& hp);

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;  // x < threshold goes left
  int left = -1;
  int right = -1;
  double weight = 0.0;  // leaves only
};

// Nodes stored in creation order; node 0 is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  double Leaf(const std::vector<double>& x) const;
};

inline constexpr int kModelVersion = 1;
inline constexpr double kLogitClamp = 30.0;

struct GbdtModel {
  int version = kModelVersion;
  GbdtHyperparams hyperparams;
  size_t feature_dim = 0;
  double base_logit = 0.0;
  std::vector<Tree> trees;

  // Clamped to [-30, 30]. Throws CalibrationError on dimension mismatch.
  double Logit(const std::vector<double>& x) const;
  double Predict(const std::vector<double>& x) const;
};

Json ToJson(const GbdtModel& model);
GbdtModel GbdtModelFromJson(const Json& j);
void SaveModel(const GbdtModel& model, const std::filesystem::path& path);
GbdtModel LoadModel(const std::filesystem::path& path);

struct CalibrationExample {
  std::vector<double> features;
  int label = 0;  // 1 = answer, 0 = abstain
};

struct TrainResult {
  GbdtModel model;
  // Mean logistic loss on the training rows: before the first tree, then
  // after each round.
  std::vector<double> loss_history;
};

// Throws CalibrationError for fewer than two rows, a single label, NaN
// features or mixed dimensions.
TrainResult Train(const std::vector<CalibrationExample>& data, const GbdtHyperparams& hp);

double MeanLogisticLoss(const GbdtModel& model, const std::vector<CalibrationExample>& data);

// [gen_prob] followed by the encoder features. `expected_dim`, when set,
// is the full vector length the dataset uses.
std::vector<double> AssembleFeatures(double gen_prob,
                                     const std::optional<std::vector<double>>& encoder,
                                     std::optional<size_t> expected_dim = std::nullopt);

double BinaryAccuracy(const std::vector<double>& scores, const std::vector<int>& labels,
                      double threshold = 0.5);
double BinaryAccuracy(const GbdtModel& model, const std::vector<CalibrationExample>& data,
                      double threshold = 0.5);

// Mann-Whitney statistic with midranks for ties. Throws UndefinedMetricError
// for single-class input.
double Auroc(const std::vector<double>& scores, const std::vector<int>& labels);

struct RiskCoveragePoint {
  double threshold = 0.0;
  size_t answered = 0;
  double coverage = 0.0;
  std::optional<double> risk;  // error rate among answered rows
};

// Thresholds 0.00, 0.05, ..., 1.00; a row is answered when score >= threshold.
std::vector<RiskCoveragePoint> RiskCoverage(const std::vector<double>& scores,
                                            const std::vector<int>& labels);

}  // namespace kconflict

#endif  // KCONFLICT_CALIBRATOR_H_
