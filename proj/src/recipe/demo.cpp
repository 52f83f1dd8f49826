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

#include "sparsecomp/recipe/demo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sparsecomp/error.hpp"
#include "sparsecomp/random.hpp"

namespace sparsecomp::recipe {

DemoModels train_demo_models(const RecipeDataset& dataset, const ForestParams& params) {
  ForestParams timing_params = params;
  timing_params.seed = chain_seed(params.seed, 1'000'003);  // keep the two forests on separate streams
  return {std::make_shared<const ForestModel>(train_forest(dataset, LabelKind::Taste, params)),
          std::make_shared<const ForestModel>(train_forest(dataset, LabelKind::Timing, timing_params))};
}

ScoreHistogram score_histogram(std::span<const double> scores, int bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  ScoreHistogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) h.edges[static_cast<std::size_t>(b)] = static_cast<double>(b) / bins;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  double sum = 0.0;
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::OutOfRange, "joint score outside [0, 1]");
    const int b = std::min(bins - 1, static_cast<int>(s * bins));
    ++h.counts[static_cast<std::size_t>(b)];
    sum += s;
  }
  h.mean = scores.empty() ? 0.0 : sum / static_cast<double>(scores.size());
  return h;
}

namespace {

struct Scores {
  double taste;
  double timing;
};

class ScoreCache {
 public:
  ScoreCache(const DemoModels& models, int taste_class, int timing_class)
      : models_(models), taste_class_(taste_class), timing_class_(timing_class) {}

  const Scores& operator()(const CompositionRatio& x) {
    auto [it, inserted] = cache_.try_emplace(x.to_vector());
    if (inserted) {
      it->second = {models_.taste->predict_proba(x, taste_class_), models_.timing->predict_proba(x, timing_class_)};
    }
    return it->second;
  }

 private:
  const DemoModels& models_;
  int taste_class_;
  int timing_class_;
  std::map<std::vector<int>, Scores> cache_;
};

double tail_threshold(std::vector<double> scores) {
  const auto k = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(scores.size())));
  std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k), scores.end());
  return scores[k];
}

double mass_at_or_above(std::span<const double> scores, double threshold) {
  const auto hits = std::count_if(scores.begin(), scores.end(), [&](double s) { return s >= threshold; });
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

}  // namespace

DemoResult run_demo(const RecipeDataset& dataset, const DemoModels& models, const DemoConfig& config) {
  if (!models.taste || !models.timing) throw Error(ErrorCode::InvalidArgument, "demo needs both models");
  if (models.taste->features() != dataset.ingredients() || models.timing->features() != dataset.ingredients()) {
    throw Error(ErrorCode::VocabularyMismatch, "models were trained on a different ingredient vocabulary");
  }
  const auto space = dataset.space();
  const auto prior = empirical_sparsity_prior(dataset);
  TargetDistribution target(space, prior,
                            {label_condition(models.taste, config.taste_label, config.taste_priority),
                             label_condition(models.timing, config.timing_label, config.timing_priority)});

  ScoreCache score(models, models.taste->class_index(config.taste_label),
                   models.timing->class_index(config.timing_label));
  DemoResult result;
  result.mcmc_scores.reserve(static_cast<std::size_t>(config.chain.iterations));

  std::map<std::vector<int>, std::size_t> seen;  // composition -> index in result.recipes
  Rng rng(config.chain.seed);
  auto x0 = sample_initial(prior, space, rng);
  ChainConfig chain = config.chain;
  chain.record_trace = false;
  const auto stats = run_chain(SamplerKind::Accelerated, target, chain, std::move(x0), rng,
                               [&](const CompositionRatio& x) {
                                 const auto& s = score(x);
                                 result.mcmc_scores.push_back(s.taste * s.timing);
                                 auto [it, inserted] = seen.try_emplace(x.to_vector(), result.recipes.size());
                                 if (inserted) {
                                   result.recipes.push_back({x, s.taste, s.timing, s.taste * s.timing, 0, {}});
                                 }
                                 ++result.recipes[it->second].visits;
                               });
  result.accepted_rate = stats.accepted_rate;
  result.updated_rate = stats.updated_rate;

  Rng baseline_rng(chain_seed(config.chain.seed, 1));
  result.baseline_scores.reserve(result.mcmc_scores.size());
  for (std::size_t k = 0; k < result.mcmc_scores.size(); ++k) {
    const auto& s = score(sample_initial(prior, space, baseline_rng));
    result.baseline_scores.push_back(s.taste * s.timing);
  }

  result.mcmc = score_histogram(result.mcmc_scores, config.histogram_bins);
  result.baseline = score_histogram(result.baseline_scores, config.histogram_bins);
  result.tail_threshold = tail_threshold(result.baseline_scores);
  result.mcmc_tail_mass = mass_at_or_above(result.mcmc_scores, result.tail_threshold);
  result.baseline_tail_mass = mass_at_or_above(result.baseline_scores, result.tail_threshold);

  std::stable_sort(result.recipes.begin(), result.recipes.end(),
                   [](const GeneratedRecipe& a, const GeneratedRecipe& b) { return a.joint_score > b.joint_score; });
  const auto k = std::min(config.neighbours, dataset.size());
  if (k > 0) {
    for (auto& r : result.recipes) r.nearest = nearest_recipes(r.composition, dataset, k);
  }
  return result;
}

}  // namespace sparsecomp::recipe
