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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sparsecomp/recipe/dataset.hpp"
#include "sparsecomp/recipe/forest.hpp"
#include "sparsecomp/samplers.hpp"

namespace sparsecomp::recipe {

struct DemoConfig {
  std::string taste_label = "Fresh";
  std::string timing_label = "All day";
  double taste_priority = 1.0;
  double timing_priority = 1.0;
  ChainConfig chain{.iterations = 100'000, .burn_in = 10'000, .seed = 0, .record_trace = false, .kernel = {}};
  int histogram_bins = 20;
  std::size_t neighbours = 3;  // nearest dataset recipes kept per generated recipe
};

struct DemoModels {
  std::shared_ptr<const ForestModel> taste;
  std::shared_ptr<const ForestModel> timing;
};

DemoModels train_demo_models(const RecipeDataset& dataset, const ForestParams& params);

/// A distinct composition visited by the chain.
struct GeneratedRecipe {
  CompositionRatio composition;
  double taste_score = 0.0;
  double timing_score = 0.0;
  double joint_score = 0.0;  // taste_score * timing_score
  std::uint64_t visits = 0;  // retained samples equal to this composition
  std::vector<Neighbour> nearest;
};

/// Equal-width bins over [0, 1]; a score of exactly 1 goes to the last bin.
struct ScoreHistogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  double mean = 0.0;
};

ScoreHistogram score_histogram(std::span<const double> scores, int bins);

struct DemoResult {
  std::vector<double> mcmc_scores;      // joint score per retained sample, in chain order
  std::vector<double> baseline_scores;  // joint score per prior draw
  ScoreHistogram mcmc;
  ScoreHistogram baseline;
  double tail_threshold = 0.0;  // baseline 90th percentile of the joint score
  double mcmc_tail_mass = 0.0;  // share of samples scoring >= tail_threshold
  double baseline_tail_mass = 0.0;
  double accepted_rate = 0.0;
  double updated_rate = 0.0;
  std::vector<GeneratedRecipe> recipes;  // distinct, best joint score first
};

/// Targets the empirical sparsity prior times the two label conditions and
/// runs the accelerated sampler from a prior draw. The baseline is an equal
/// number of independent prior draws (support size redrawn every time) from
/// the stream chain_seed(seed, 1).
DemoResult run_demo(const RecipeDataset& dataset, const DemoModels& models, const DemoConfig& config);

}  // namespace sparsecomp::recipe
