// Copyright 2026 The sparsecomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sparsecomp/recipe/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "sparsecomp/error.hpp"
#include "sparsecomp/random.hpp"

namespace sparsecomp::recipe {

namespace {

constexpr const char* kFormatName = "sparsecomp-forest";
constexpr int kFormatVersion = 1;

double gini(std::span<const std::uint32_t> counts, std::uint32_t total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

class TreeGrower {
 public:
  TreeGrower(std::span<const std::vector<int>> rows, std::span<const int> labels, int classes,
             const ForestParams& params, int features_per_split, Rng& rng)
      : rows_(rows), labels_(labels), classes_(classes), params_(params), mtry_(features_per_split), rng_(rng) {}

  DecisionTree grow(std::vector<int> samples) {
    DecisionTree tree;
    grow_node(tree, std::move(samples), 0);
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = INFINITY;
  };

  std::vector<std::uint32_t> class_counts(const std::vector<int>& samples) const {
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(classes_), 0);
    for (int s : samples) ++counts[static_cast<std::size_t>(labels_[static_cast<std::size_t>(s)])];
    return counts;
  }

  int feature_value(int sample, int feature) const {
    return rows_[static_cast<std::size_t>(sample)][static_cast<std::size_t>(feature)];
  }

  // Visits features in random order until `mtry_` non-constant ones have been
  // scored, so sparse nodes are not turned into leaves by unlucky draws.
  Split best_split(const std::vector<int>& samples) {
    const int feature_count = static_cast<int>(rows_.front().size());
    std::vector<int> order(static_cast<std::size_t>(feature_count));
    std::iota(order.begin(), order.end(), 0);
    for (int k = feature_count - 1; k > 0; --k) {
      std::swap(order[static_cast<std::size_t>(k)],
                order[static_cast<std::size_t>(uniform_index(rng_, static_cast<std::uint64_t>(k) + 1))]);
    }

    Split best;
    const auto n = static_cast<std::uint32_t>(samples.size());
    std::vector<std::pair<int, int>> column(samples.size());  // (value, label)
    std::vector<std::uint32_t> left(static_cast<std::size_t>(classes_));
    std::vector<std::uint32_t> right(static_cast<std::size_t>(classes_));
    int scored = 0;
    for (int f : order) {
      if (scored >= mtry_) break;
      for (std::size_t k = 0; k < samples.size(); ++k) {
        column[k] = {feature_value(samples[k], f), labels_[static_cast<std::size_t>(samples[k])]};
      }
      std::stable_sort(column.begin(), column.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      if (column.front().first == column.back().first) continue;
      ++scored;

      std::fill(left.begin(), left.end(), 0u);
      std::fill(right.begin(), right.end(), 0u);
      for (const auto& [v, label] : column) ++right[static_cast<std::size_t>(label)];
      for (std::uint32_t p = 0; p + 1 < n; ++p) {
        const auto label = static_cast<std::size_t>(column[p].second);
        ++left[label];
        --right[label];
        if (column[p].first == column[p + 1].first) continue;
        const std::uint32_t n_left = p + 1;
        const std::uint32_t n_right = n - n_left;
        if (n_left < static_cast<std::uint32_t>(params_.min_leaf) ||
            n_right < static_cast<std::uint32_t>(params_.min_leaf)) {
          continue;
        }
        const double impurity = (n_left * gini(left, n_left) + n_right * gini(right, n_right)) / n;
        if (impurity < best.impurity) {
          best = {f, 0.5 * (column[p].first + column[p + 1].first), impurity};
        }
      }
    }
    return best;
  }

  int grow_node(DecisionTree& tree, std::vector<int> samples, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    auto counts = class_counts(samples);
    const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
    const bool small = static_cast<int>(samples.size()) < 2 * params_.min_leaf;

    Split split;
    if (depth < params_.max_depth && !pure && !small) split = best_split(samples);
    if (split.feature < 0) {
      tree.nodes[static_cast<std::size_t>(id)].counts = std::move(counts);
      return id;
    }

    std::vector<int> left;
    std::vector<int> right;
    for (int s : samples) (feature_value(s, split.feature) <= split.threshold ? left : right).push_back(s);
    samples.clear();
    samples.shrink_to_fit();
    const int left_id = grow_node(tree, std::move(left), depth + 1);
    const int right_id = grow_node(tree, std::move(right), depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left_id;
    node.right = right_id;
    return id;
  }

  std::span<const std::vector<int>> rows_;
  std::span<const int> labels_;
  int classes_;
  const ForestParams& params_;
  int mtry_;
  Rng& rng_;
};

nlohmann::json node_to_json(const DecisionTree& tree, int id) {
  const auto& node = tree.nodes[static_cast<std::size_t>(id)];
  if (node.is_leaf()) return {{"counts", node.counts}};
  return {{"feature", node.feature},
          {"threshold", node.threshold},
          {"left", node_to_json(tree, node.left)},
          {"right", node_to_json(tree, node.right)}};
}

int node_from_json(const nlohmann::json& j, DecisionTree& tree) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("counts")) {
    tree.nodes[static_cast<std::size_t>(id)].counts = j.at("counts").get<std::vector<std::uint32_t>>();
    return id;
  }
  const int feature = j.at("feature").get<int>();
  const double threshold = j.at("threshold").get<double>();
  const int left = node_from_json(j.at("left"), tree);
  const int right = node_from_json(j.at("right"), tree);
  auto& node = tree.nodes[static_cast<std::size_t>(id)];
  node.feature = feature;
  node.threshold = threshold;
  node.left = left;
  node.right = right;
  return id;
}

double leaf_share(const TreeNode& leaf, int class_index) {
  std::uint64_t total = 0;
  for (auto c : leaf.counts) total += c;
  return static_cast<double>(leaf.counts[static_cast<std::size_t>(class_index)]) / static_cast<double>(total);
}

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const int> features) const {
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf()) {
    const int next = features[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right;
    node = &nodes[static_cast<std::size_t>(next)];
  }
  return *node;
}

ForestModel::ForestModel(std::vector<std::string> features, std::vector<std::string> classes, ForestParams params,
                         std::vector<DecisionTree> trees)
    : features_(std::move(features)), classes_(std::move(classes)), params_(params), trees_(std::move(trees)) {
  if (trees_.empty()) throw Error(ErrorCode::ModelFormat, "forest has no trees");
  if (classes_.size() < 2) throw Error(ErrorCode::DegenerateLabels, "forest needs at least two classes");
  const auto n_features = static_cast<int>(features_.size());
  for (const auto& tree : trees_) {
    if (tree.nodes.empty()) throw Error(ErrorCode::ModelFormat, "tree has no nodes");
    const auto n_nodes = static_cast<int>(tree.nodes.size());
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) {
        std::uint64_t total = 0;
        for (auto c : node.counts) total += c;
        if (node.counts.size() != classes_.size() || total == 0) {
          throw Error(ErrorCode::ModelFormat, "leaf class counts do not match the class vocabulary");
        }
      } else if (node.feature >= n_features || node.left <= 0 || node.right <= 0 || node.left >= n_nodes ||
                 node.right >= n_nodes || !std::isfinite(node.threshold)) {
        throw Error(ErrorCode::ModelFormat, "split node references are out of range");
      }
    }
  }
}

int ForestModel::class_index(std::string_view label) const {
  const auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) throw Error(ErrorCode::UnknownLabel, "unknown label '" + std::string(label) + "'");
  return static_cast<int>(it - classes_.begin());
}

std::vector<double> ForestModel::predict_proba(std::span<const int> features) const {
  if (features.size() != features_.size()) {
    throw Error(ErrorCode::VocabularyMismatch, "expected " + std::to_string(features_.size()) + " features, got " +
                                                   std::to_string(features.size()));
  }
  std::vector<double> probs(classes_.size(), 0.0);
  for (const auto& tree : trees_) {
    const auto& leaf = tree.leaf_for(features);
    std::uint64_t total = 0;
    for (auto c : leaf.counts) total += c;
    for (std::size_t k = 0; k < probs.size(); ++k) probs[k] += static_cast<double>(leaf.counts[k]) / total;
  }
  for (auto& p : probs) p /= static_cast<double>(trees_.size());
  return probs;
}

std::vector<double> ForestModel::predict_proba(const CompositionRatio& x) const { return predict_proba(x.values()); }

double ForestModel::predict_proba(const CompositionRatio& x, int class_index) const {
  if (x.size() != static_cast<int>(features_.size())) {
    throw Error(ErrorCode::VocabularyMismatch, "composition length does not match the forest's features");
  }
  double sum = 0.0;
  for (const auto& tree : trees_) sum += leaf_share(tree.leaf_for(x.values()), class_index);
  return sum / static_cast<double>(trees_.size());
}

void ForestModel::pair_scan(const CompositionRatio& x, int i, int j, int class_index, std::span<double> out) const {
  if (x.size() != static_cast<int>(features_.size())) {
    throw Error(ErrorCode::VocabularyMismatch, "composition length does not match the forest's features");
  }
  const int pooled = x[i] + x[j];
  if (i == j || out.size() != static_cast<std::size_t>(pooled) + 1) {
    throw Error(ErrorCode::InvalidArgument, "pair scan needs i != j and x_i + x_j + 1 outputs");
  }

  // Leaf shares are added over k-intervals through a difference array.
  thread_local std::vector<double> diff;
  thread_local std::vector<std::tuple<int, int, int>> stack;  // (node, lo, hi)
  diff.assign(static_cast<std::size_t>(pooled) + 2, 0.0);
  for (const auto& tree : trees_) {
    stack.clear();
    stack.emplace_back(0, 0, pooled);
    while (!stack.empty()) {
      const auto [id, lo, hi] = stack.back();
      stack.pop_back();
      const auto& node = tree.nodes[static_cast<std::size_t>(id)];
      if (node.is_leaf()) {
        const double v = leaf_share(node, class_index);
        diff[static_cast<std::size_t>(lo)] += v;
        diff[static_cast<std::size_t>(hi) + 1] -= v;
        continue;
      }
      if (node.feature == i) {
        // x_i = k <= t  <=>  k <= floor(t)
        const int cut = static_cast<int>(std::floor(node.threshold));
        if (lo <= std::min(hi, cut)) stack.emplace_back(node.left, lo, std::min(hi, cut));
        if (std::max(lo, cut + 1) <= hi) stack.emplace_back(node.right, std::max(lo, cut + 1), hi);
      } else if (node.feature == j) {
        // x_j = s - k <= t  <=>  k >= ceil(s - t)
        const int cut = static_cast<int>(std::ceil(pooled - node.threshold));
        if (std::max(lo, cut) <= hi) stack.emplace_back(node.left, std::max(lo, cut), hi);
        if (lo <= std::min(hi, cut - 1)) stack.emplace_back(node.right, lo, std::min(hi, cut - 1));
      } else {
        stack.emplace_back(x[node.feature] <= node.threshold ? node.left : node.right, lo, hi);
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(trees_.size());
  double running = 0.0;
  for (int k = 0; k <= pooled; ++k) {
    running += diff[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] = std::clamp(running * scale, 0.0, 1.0);
  }
}

void ForestModel::save(std::ostream& out) const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : trees_) trees.push_back(node_to_json(tree, 0));
  const nlohmann::json doc = {
      {"format", kFormatName},
      {"version", kFormatVersion},
      {"params",
       {{"trees", params_.trees},
        {"max_depth", params_.max_depth},
        {"min_leaf", params_.min_leaf},
        {"features_per_split", params_.features_per_split},
        {"bootstrap", params_.bootstrap},
        {"seed", params_.seed}}},
      {"features", features_},
      {"classes", classes_},
      {"trees", std::move(trees)},
  };
  out << doc.dump() << '\n';
}

void ForestModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write model file " + path.string());
  save(out);
}

ForestModel ForestModel::load(std::istream& in) {
  try {
    const auto doc = nlohmann::json::parse(in);
    if (doc.at("format").get<std::string>() != kFormatName) throw Error(ErrorCode::ModelFormat, "not a forest model");
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::ModelFormat, "unsupported model version " + doc.at("version").dump());
    }
    const auto& p = doc.at("params");
    ForestParams params;
    params.trees = p.at("trees").get<int>();
    params.max_depth = p.at("max_depth").get<int>();
    params.min_leaf = p.at("min_leaf").get<int>();
    params.features_per_split = p.at("features_per_split").get<int>();
    params.bootstrap = p.at("bootstrap").get<bool>();
    params.seed = p.at("seed").get<std::uint64_t>();
    std::vector<DecisionTree> trees;
    for (const auto& t : doc.at("trees")) {
      DecisionTree tree;
      node_from_json(t, tree);
      trees.push_back(std::move(tree));
    }
    return ForestModel(doc.at("features").get<std::vector<std::string>>(),
                       doc.at("classes").get<std::vector<std::string>>(), params, std::move(trees));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ModelFormat, std::string("malformed model: ") + e.what());
  }
}

ForestModel ForestModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open model file " + path.string());
  return load(in);
}

ForestModel train_forest(std::span<const std::vector<int>> rows, std::span<const int> labels,
                         std::vector<std::string> features, std::vector<std::string> classes,
                         const ForestParams& params) {
  if (rows.empty() || rows.size() != labels.size()) {
    throw Error(ErrorCode::InvalidArgument, "need one label per training row");
  }
  if (params.trees < 1 || params.max_depth < 0 || params.min_leaf < 1 || params.features_per_split < 0) {
    throw Error(ErrorCode::InvalidArgument, "forest parameters out of range");
  }
  for (const auto& row : rows) {
    if (row.size() != features.size()) throw Error(ErrorCode::VocabularyMismatch, "training row has wrong length");
  }
  std::vector<int> seen(classes.size(), 0);
  for (int label : labels) {
    if (label < 0 || label >= static_cast<int>(classes.size())) {
      throw Error(ErrorCode::InvalidArgument, "label index out of range");
    }
    seen[static_cast<std::size_t>(label)] = 1;
  }
  if (std::accumulate(seen.begin(), seen.end(), 0) < 2) {
    throw Error(ErrorCode::DegenerateLabels, "training labels contain a single class");
  }

  const int n_features = static_cast<int>(features.size());
  const int mtry = params.features_per_split > 0
                       ? std::min(params.features_per_split, n_features)
                       : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_features))));
  const auto n = rows.size();

  std::vector<DecisionTree> trees(static_cast<std::size_t>(params.trees));
  std::vector<std::exception_ptr> errors(trees.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int b = next++; b < params.trees; b = next++) {
      try {
        Rng rng(chain_seed(params.seed, static_cast<std::uint64_t>(b)));
        std::vector<int> sample(n);
        if (params.bootstrap) {
          for (auto& s : sample) s = static_cast<int>(uniform_index(rng, n));
        } else {
          std::iota(sample.begin(), sample.end(), 0);
        }
        TreeGrower grower(rows, labels, static_cast<int>(classes.size()), params, mtry, rng);
        trees[static_cast<std::size_t>(b)] = grower.grow(std::move(sample));
      } catch (...) {
        errors[static_cast<std::size_t>(b)] = std::current_exception();
      }
    }
  };
  const int workers = std::min(params.trees, static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return ForestModel(std::move(features), std::move(classes), params, std::move(trees));
}

namespace {

const std::string& label_of(const Recipe& r, LabelKind kind) { return kind == LabelKind::Taste ? r.taste : r.timing; }

}  // namespace

ForestModel train_forest(const RecipeDataset& dataset, LabelKind kind, const ForestParams& params) {
  const auto& classes = kind == LabelKind::Taste ? dataset.taste_labels() : dataset.timing_labels();
  std::vector<std::vector<int>> rows;
  std::vector<int> labels;
  rows.reserve(dataset.size());
  for (const auto& r : dataset.recipes()) {
    rows.push_back(r.composition.to_vector());
    const auto it = std::find(classes.begin(), classes.end(), label_of(r, kind));
    labels.push_back(static_cast<int>(it - classes.begin()));
  }
  return train_forest(rows, labels, dataset.ingredients(), classes, params);
}

double training_accuracy(const ForestModel& model, const RecipeDataset& dataset, LabelKind kind) {
  std::size_t correct = 0;
  for (const auto& r : dataset.recipes()) {
    const auto probs = model.predict_proba(r.composition);
    const auto best = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    correct += model.classes()[best] == label_of(r, kind) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

PropertyCondition label_condition(std::shared_ptr<const ForestModel> model, std::string_view label,
                                  double priority) {
  if (!model) throw Error(ErrorCode::InvalidArgument, "label condition needs a model");
  const int c = model->class_index(label);
  PropertyCondition condition([model, c](const CompositionRatio& x) { return model->predict_proba(x, c); }, priority,
                              1e-9, std::string(label));
  condition.with_pair_scorer([model, c](const CompositionRatio& x, int i, int j, std::span<double> out) {
    model->pair_scan(x, i, j, c, out);
  });
  return condition;
}

}  // namespace sparsecomp::recipe
