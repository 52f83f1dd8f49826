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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparsecomp/composition.hpp"
#include "sparsecomp/recipe/dataset.hpp"
#include "sparsecomp/target.hpp"

namespace sparsecomp::recipe {

struct ForestParams {
  int trees = 100;
  int max_depth = 8;
  int min_leaf = 1;
  int features_per_split = 0;  // 0 means ceil(sqrt(feature count))
  bool bootstrap = true;       // off: every tree sees the full training set
  std::uint64_t seed = 0;      // tree b draws from chain_seed(seed, b)

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

/// Flat binary tree. Internal nodes send x[feature] <= threshold left.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<std::uint32_t> counts;  // leaves only: training samples per class

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const int> features) const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

class ForestModel {
 public:
  ForestModel(std::vector<std::string> features, std::vector<std::string> classes, ForestParams params,
              std::vector<DecisionTree> trees);

  const std::vector<std::string>& features() const noexcept { return features_; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  const ForestParams& params() const noexcept { return params_; }
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

  /// Throws UnknownLabel.
  int class_index(std::string_view label) const;

  /// Mean over trees of the leaf's class proportions. Throws VocabularyMismatch.
  std::vector<double> predict_proba(const CompositionRatio& x) const;
  std::vector<double> predict_proba(std::span<const int> features) const;
  double predict_proba(const CompositionRatio& x, int class_index) const;

  /// out[k] = probability of the class after setting x_i = k and
  /// x_j = (x_i + x_j) - k, for every split at once. Each tree is walked with
  /// an interval of k instead of a point.
  void pair_scan(const CompositionRatio& x, int i, int j, int class_index, std::span<double> out) const;

  /// Versioned JSON with params, vocabularies and nested split/leaf records.
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static ForestModel load(std::istream& in);
  static ForestModel load(const std::filesystem::path& path);

  friend bool operator==(const ForestModel&, const ForestModel&) = default;

 private:
  std::vector<std::string> features_;
  std::vector<std::string> classes_;
  ForestParams params_;
  std::vector<DecisionTree> trees_;
};

/// Grows a forest on an integer feature matrix (rows = samples). Labels index
/// into `classes`. Throws DegenerateLabels when fewer than two classes occur.
ForestModel train_forest(std::span<const std::vector<int>> rows, std::span<const int> labels,
                         std::vector<std::string> features, std::vector<std::string> classes,
                         const ForestParams& params);

enum class LabelKind { Taste, Timing };

/// Features are the raw per-mille amounts.
ForestModel train_forest(const RecipeDataset& dataset, LabelKind kind, const ForestParams& params);

/// Share of dataset recipes whose most probable class matches their label.
double training_accuracy(const ForestModel& model, const RecipeDataset& dataset, LabelKind kind);

/// Property condition scoring x by the forest's probability of `label`.
/// Throws UnknownLabel.
PropertyCondition label_condition(std::shared_ptr<const ForestModel> model, std::string_view label,
                                  double priority = 1.0);

}  // namespace sparsecomp::recipe
