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

#include "kconflict/calibrator.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "kconflict/error.h"
#include "kconflict/rng.h"

namespace kconflict {

namespace {

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double ClampLogit(double z) { return std::clamp(z, -kLogitClamp, kLogitClamp); }

// log(1 + exp(z)) without overflow.
double Softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

size_t SampleSize(double fraction, size_t n) {
  return std::max<size_t>(1, static_cast<size_t>(std::floor(fraction * static_cast<double>(n))));
}

// Sorted subset of `from` of the subsampled size.
std::vector<int> SampleSubset(Rng& rng, const std::vector<int>& from, double fraction) {
  if (fraction >= 1.0) return from;
  std::vector<int> out;
  for (size_t i : rng.SampleWithoutReplacement(from.size(), SampleSize(fraction, from.size()))) {
    out.push_back(from[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void CheckData(const std::vector<CalibrationExample>& data) {
  if (data.size() < 2) throw CalibrationError("training needs at least two examples");
  const size_t dim = data[0].features.size();
  if (dim == 0) throw CalibrationError("training examples have no features");
  bool seen[2] = {false, false};
  for (size_t i = 0; i < data.size(); ++i) {
    const CalibrationExample& e = data[i];
    if (e.features.size() != dim) {
      throw CalibrationError("example " + std::to_string(i) + " has " +
                             std::to_string(e.features.size()) + " features, expected " +
                             std::to_string(dim));
    }
    for (double v : e.features) {
      if (!std::isfinite(v)) {
        throw CalibrationError("example " + std::to_string(i) + " has a non-finite feature");
      }
    }
    if (e.label != 0 && e.label != 1) {
      throw CalibrationError("example " + std::to_string(i) + " has label " +
                             std::to_string(e.label));
    }
    seen[e.label] = true;
  }
  if (!seen[0] || !seen[1]) throw CalibrationError("training data has a single class");
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<CalibrationExample>& data, const std::vector<double>& grad,
              const std::vector<double>& hess, const GbdtHyperparams& hp, Rng& rng)
      : data_(data), grad_(grad), hess_(hess), hp_(hp), rng_(rng) {}

  Tree Build(const std::vector<int>& rows, const std::vector<int>& tree_features) {
    Tree tree;
    tree.nodes.push_back({});
    std::vector<std::pair<int, std::vector<int>>> level = {{0, rows}};
    for (int depth = 0; !level.empty(); ++depth) {
      const std::vector<int> level_features = SampleSubset(rng_, tree_features, hp_.subsample);
      std::vector<std::pair<int, std::vector<int>>> next;
      for (auto& [node, node_rows] : level) {
        double g = 0, h = 0;
        for (int r : node_rows) {
          g += grad_[r];
          h += hess_[r];
        }
        SplitChoice split;
        if (depth < hp_.max_depth) {
          const std::vector<int> node_features =
              SampleSubset(rng_, level_features, hp_.subsample);
          split = BestSplit(node_rows, node_features, g, h);
        }
        if (split.feature < 0) {
          tree.nodes[node].weight = -g / (h + hp_.l2_leaf_reg);
          continue;
        }
        std::vector<int> left_rows, right_rows;
        for (int r : node_rows) {
          (data_[r].features[split.feature] < split.threshold ? left_rows : right_rows)
              .push_back(r);
        }
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes.push_back({});
        TreeNode& n = tree.nodes[node];
        n.feature = split.feature;
        n.threshold = split.threshold;
        n.left = left;
        n.right = left + 1;
        next.emplace_back(left, std::move(left_rows));
        next.emplace_back(left + 1, std::move(right_rows));
      }
      level = std::move(next);
    }
    return tree;
  }

 private:
  double Score(double g, double h) const { return g * g / (h + hp_.l2_leaf_reg); }

  SplitChoice BestSplit(const std::vector<int>& rows, const std::vector<int>& features,
                        double g_total, double h_total) const {
    SplitChoice best;
    const double parent = Score(g_total, h_total);
    std::vector<int> order = rows;
    for (int f : features) {
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double va = data_[a].features[f], vb = data_[b].features[f];
        return va != vb ? va < vb : a < b;
      });
      double gl = 0, hl = 0;
      for (size_t i = 0; i + 1 < order.size(); ++i) {
        gl += grad_[order[i]];
        hl += hess_[order[i]];
        const double a = data_[order[i]].features[f];
        const double b = data_[order[i + 1]].features[f];
        if (a == b) continue;
        const double hr = h_total - hl;
        if (hl < hp_.min_child_weight || hr < hp_.min_child_weight) continue;
        const double gain = 0.5 * (Score(gl, hl) + Score(g_total - gl, hr) - parent);
        if (gain > 1e-12 && gain > best.gain) {
          double mid = a + (b - a) / 2;
          if (mid <= a) mid = b;
          best = {f, mid, gain};
        }
      }
    }
    return best;
  }

  const std::vector<CalibrationExample>& data_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  const GbdtHyperparams& hp_;
  Rng& rng_;
};

Json HyperparamsToJson(const GbdtHyperparams& hp) {
  return Json{{"rounds", hp.rounds},
              {"learning_rate", hp.learning_rate},
              {"subsample", hp.subsample},
              {"max_depth", hp.max_depth},
              {"l2_leaf_reg", hp.l2_leaf_reg},
              {"min_child_weight", hp.min_child_weight},
              {"seed", hp.seed}};
}

}  // namespace

void ValidateHyperparams(const GbdtHyperparams& hp) {
  if (hp.rounds < 0) throw CalibrationError("rounds must be >= 0");
  if (!(hp.learning_rate > 0)) throw CalibrationError("learning_rate must be > 0");
  if (!(hp.subsample > 0 && hp.subsample <= 1)) {
    throw CalibrationError("subsample must be in (0, 1]");
  }
  if (hp.max_depth < 0) throw CalibrationError("max_depth must be >= 0");
  if (!(hp.l2_leaf_reg >= 0)) throw CalibrationError("l2_leaf_reg must be >= 0");
  if (!(hp.min_child_weight >= 0)) throw CalibrationError("min_child_weight must be >= 0");
}

double Tree::Leaf(const std::vector<double>& x) const {
  int i = 0;
  while (nodes[i].feature >= 0) {
    i = x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
  }
  return nodes[i].weight;
}

double GbdtModel::Logit(const std::vector<double>& x) const {
  if (x.size() != feature_dim) {
    throw CalibrationError("model expects " + std::to_string(feature_dim) + " features, got " +
                           std::to_string(x.size()));
  }
  double z = base_logit;
  for (const Tree& t : trees) z += hyperparams.learning_rate * t.Leaf(x);
  return ClampLogit(z);
}

double GbdtModel::Predict(const std::vector<double>& x) const { return Sigmoid(Logit(x)); }

Json ToJson(const GbdtModel& model) {
  Json trees = Json::array();
  for (const Tree& t : model.trees) {
    Json nodes = Json::array();
    for (const TreeNode& n : t.nodes) {
      if (n.feature < 0) {
        nodes.push_back({{"leaf", n.weight}});
      } else {
        nodes.push_back(
            {{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  return Json{{"version", model.version},
              {"hyperparams", HyperparamsToJson(model.hyperparams)},
              {"feature_dim", model.feature_dim},
              {"base_logit", model.base_logit},
              {"trees", trees}};
}

GbdtModel GbdtModelFromJson(const Json& j) {
  GbdtModel m;
  try {
    m.version = j.at("version").get<int>();
    if (m.version != kModelVersion) {
      throw CalibrationError("unsupported model version " + std::to_string(m.version));
    }
    const Json& hp = j.at("hyperparams");
    m.hyperparams.rounds = hp.at("rounds").get<int>();
    m.hyperparams.learning_rate = hp.at("learning_rate").get<double>();
    m.hyperparams.subsample = hp.at("subsample").get<double>();
    m.hyperparams.max_depth = hp.at("max_depth").get<int>();
    m.hyperparams.l2_leaf_reg = hp.at("l2_leaf_reg").get<double>();
    m.hyperparams.min_child_weight = hp.at("min_child_weight").get<double>();
    m.hyperparams.seed = hp.at("seed").get<uint64_t>();
    m.feature_dim = j.at("feature_dim").get<size_t>();
    m.base_logit = j.at("base_logit").get<double>();
    for (const Json& jt : j.at("trees")) {
      Tree t;
      for (const Json& jn : jt) {
        TreeNode n;
        if (jn.contains("leaf")) {
          n.weight = jn.at("leaf").get<double>();
        } else {
          n.feature = jn.at("feature").get<int>();
          n.threshold = jn.at("threshold").get<double>();
          n.left = jn.at("left").get<int>();
          n.right = jn.at("right").get<int>();
        }
        t.nodes.push_back(n);
      }
      m.trees.push_back(std::move(t));
    }
  } catch (const Json::exception& e) {
    throw CalibrationError(std::string("malformed model: ") + e.what());
  }
  for (const Tree& t : m.trees) {
    if (t.nodes.empty()) throw CalibrationError("malformed model: empty tree");
    const int size = static_cast<int>(t.nodes.size());
    for (int i = 0; i < size; ++i) {
      const TreeNode& n = t.nodes[i];
      if (n.feature < 0) continue;
      if (static_cast<size_t>(n.feature) >= m.feature_dim || n.left <= i || n.right <= i ||
          n.left >= size || n.right >= size) {
        throw CalibrationError("malformed model: bad node " + std::to_string(i));
      }
    }
  }
  return m;
}

void SaveModel(const GbdtModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CalibrationError("cannot write " + path.string());
  out << ToJson(model).dump(1) << '\n';
}

GbdtModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CalibrationError("cannot read " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw CalibrationError(path.string() + ": " + e.what());
  }
  return GbdtModelFromJson(j);
}

double MeanLogisticLoss(const GbdtModel& model, const std::vector<CalibrationExample>& data) {
  double total = 0;
  for (const CalibrationExample& e : data) {
    const double z = model.Logit(e.features);
    total += Softplus(z) - e.label * z;
  }
  return total / static_cast<double>(data.size());
}

TrainResult Train(const std::vector<CalibrationExample>& data, const GbdtHyperparams& hp) {
  ValidateHyperparams(hp);
  CheckData(data);
  const size_t n = data.size();
  const size_t dim = data[0].features.size();

  TrainResult result;
  GbdtModel& model = result.model;
  model.hyperparams = hp;
  model.feature_dim = dim;
  const double positives = std::count_if(data.begin(), data.end(),
                                         [](const CalibrationExample& e) { return e.label == 1; });
  const double prior = positives / static_cast<double>(n);
  model.base_logit = std::log(prior / (1 - prior));

  std::vector<double> raw(n, model.base_logit);
  auto loss = [&] {
    double total = 0;
    for (size_t i = 0; i < n; ++i) {
      const double z = ClampLogit(raw[i]);
      total += Softplus(z) - data[i].label * z;
    }
    return total / static_cast<double>(n);
  };
  result.loss_history.push_back(loss());

  std::vector<int> all_rows(n), all_features(dim);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  std::iota(all_features.begin(), all_features.end(), 0);
  std::vector<double> grad(n), hess(n);
  Rng rng(hp.seed);
  for (int round = 0; round < hp.rounds; ++round) {
    for (size_t i = 0; i < n; ++i) {
      const double p = Sigmoid(ClampLogit(raw[i]));
      grad[i] = p - data[i].label;
      hess[i] = p * (1 - p);
    }
    const std::vector<int> rows = SampleSubset(rng, all_rows, hp.subsample);
    const std::vector<int> features = SampleSubset(rng, all_features, hp.subsample);
    TreeBuilder builder(data, grad, hess, hp, rng);
    Tree tree = builder.Build(rows, features);
    for (size_t i = 0; i < n; ++i) raw[i] += hp.learning_rate * tree.Leaf(data[i].features);
    model.trees.push_back(std::move(tree));
    result.loss_history.push_back(loss());
  }
  return result;
}

std::vector<double> AssembleFeatures(double gen_prob,
                                     const std::optional<std::vector<double>>& encoder,
                                     std::optional<size_t> expected_dim) {
  if (!(gen_prob >= 0 && gen_prob <= 1)) {
    throw CalibrationError("gen_prob " + std::to_string(gen_prob) + " outside [0, 1]");
  }
  std::vector<double> out = {gen_prob};
  if (encoder) out.insert(out.end(), encoder->begin(), encoder->end());
  if (expected_dim && out.size() != *expected_dim) {
    throw CalibrationError("feature vector has " + std::to_string(out.size()) +
                           " values, dataset uses " + std::to_string(*expected_dim));
  }
  return out;
}

double BinaryAccuracy(const std::vector<double>& scores, const std::vector<int>& labels,
                      double threshold) {
  if (scores.size() != labels.size()) throw CalibrationError("scores and labels differ in size");
  if (scores.empty()) throw CalibrationError("binary accuracy of an empty set");
  size_t right = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if ((scores[i] >= threshold) == (labels[i] == 1)) ++right;
  }
  return static_cast<double>(right) / static_cast<double>(scores.size());
}

double BinaryAccuracy(const GbdtModel& model, const std::vector<CalibrationExample>& data,
                      double threshold) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const CalibrationExample& e : data) {
    scores.push_back(model.Predict(e.features));
    labels.push_back(e.label);
  }
  return BinaryAccuracy(scores, labels, threshold);
}

double Auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw CalibrationError("scores and labels differ in size");
  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (double s : scores) {
    if (std::isnan(s)) throw CalibrationError("NaN score");
  }
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0;
  size_t positives = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2;
    for (size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetricError("AUROC needs both classes");
  }
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1) / 2) / (p * static_cast<double>(negatives));
}

std::vector<RiskCoveragePoint> RiskCoverage(const std::vector<double>& scores,
                                            const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw CalibrationError("scores and labels differ in size");
  if (scores.empty()) throw CalibrationError("risk-coverage of an empty set");
  std::vector<RiskCoveragePoint> out;
  for (int step = 0; step <= 20; ++step) {
    RiskCoveragePoint point;
    point.threshold = step / 20.0;
    size_t wrong = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] < point.threshold) continue;
      ++point.answered;
      if (labels[i] != 1) ++wrong;
    }
    point.coverage = static_cast<double>(point.answered) / static_cast<double>(scores.size());
    if (point.answered > 0) {
      point.risk = static_cast<double>(wrong) / static_cast<double>(point.answered);
    }
    out.push_back(point);
  }
  return out;
}

}  // namespace kconflict
