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

#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sparsecomp/composition.hpp"
#include "sparsecomp/random.hpp"

namespace sparsecomp {

inline constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

/// Categorical prior over the number of nonzero entries n.
///
/// Weights are normalized at construction. Every key must be a feasible
/// support size in [1, min(N, M)]; anything else is rejected rather than
/// silently dropped.
class SparsityCondition {
 public:
  static SparsityCondition make(const std::map<int, double>& weights, const SpaceParams& space,
                                double priority = 1.0);

  /// Normalized probability of support size n (0 outside the prior's support).
  double weight(int n) const;
  double priority() const noexcept { return priority_; }
  int max_support() const noexcept { return static_cast<int>(weights_.size()) - 1; }

  /// Weights indexed by n = 0..min(N, M); entry 0 is always zero.
  std::span<const double> weights() const noexcept { return weights_; }

  /// Sizes with positive weight, ascending.
  std::vector<int> support() const;

 private:
  std::vector<double> weights_;
  double priority_ = 1.0;
};

/// Goodness-of-fit scorer turned into an energy -c log(max(score, floor)).
class PropertyCondition {
 public:
  using Scorer = std::function<double(const CompositionRatio&)>;
  /// Fills scores[k] with the score of x after setting x_i = k and
  /// x_j = (x_i + x_j) - k, for k = 0..x_i + x_j. Optional fast path.
  using PairScorer = std::function<void(const CompositionRatio&, int, int, std::span<double>)>;

  explicit PropertyCondition(Scorer scorer, double priority = 1.0, double floor = 1e-9,
                             std::string name = "property");

  PropertyCondition& with_pair_scorer(PairScorer pair_scorer);

  /// Disables the floor clamp so that a zero score means infinite energy.
  PropertyCondition& unclamped();

  double priority() const noexcept { return priority_; }
  double floor() const noexcept { return floor_; }
  bool clamped() const noexcept { return clamped_; }
  const std::string& name() const noexcept { return name_; }

  /// Scorer output, checked to be finite and nonnegative (ScorerFailure otherwise).
  double score(const CompositionRatio& x) const;

  /// Scores for every split of x_i + x_j between i and j.
  void pair_scores(const CompositionRatio& x, int i, int j, std::span<double> scores) const;

  double energy_from_score(double score) const;

 private:
  Scorer scorer_;
  PairScorer pair_scorer_;
  double priority_;
  double floor_;
  bool clamped_ = true;
  std::string name_;
};

/// P(x | Y) proportional to exp(-(E_sparse(x) + sum_k E_k(x))). Immutable.
class TargetDistribution {
 public:
  TargetDistribution(SpaceParams space, SparsityCondition sparsity,
                     std::vector<PropertyCondition> properties = {});

  const SpaceParams& space() const noexcept { return space_; }
  const SparsityCondition& sparsity() const noexcept { return sparsity_; }
  const std::vector<PropertyCondition>& properties() const noexcept { return properties_; }

  /// Sparsity energy of any state with n nonzero entries (+inf off the prior's support).
  double sparsity_energy_for(int n) const;

 private:
  SpaceParams space_;
  SparsityCondition sparsity_;
  std::vector<PropertyCondition> properties_;
  std::vector<double> sparsity_energy_;  // indexed by n
};

double sparsity_energy(const CompositionRatio& x, const TargetDistribution& target);
double property_energy(const CompositionRatio& x, const PropertyCondition& condition);
double total_energy(const CompositionRatio& x, const TargetDistribution& target);

/// log P(x2) / P(x) = E(x) - E(x2); -inf whenever x2 has infinite energy.
double log_prob_ratio(const CompositionRatio& x, const CompositionRatio& x2, const TargetDistribution& target);

/// Target restricted to the s + 1 ways of splitting s = x_i + x_j between i
/// and j with every other coordinate fixed. Index k means x_i = k, x_j = s - k.
struct PairConditional {
  int i = 0;
  int j = 0;
  int pooled = 0;                 // s
  std::vector<double> energies;   // total energy per split (+inf allowed)
  std::vector<double> weights;    // exp(min_energy - energy), so the largest is 1
  std::vector<double> scratch;    // scorer buffer

  std::size_t splits() const noexcept { return weights.size(); }
};

/// Fills `out` for the pair (i, j). With stride d > 1 only every d-th split,
/// the two extremes and the current split are considered (an approximation).
/// Throws AllZeroWeights if every split has zero probability.
void pair_conditional(const CompositionRatio& x, int i, int j, const TargetDistribution& target,
                      PairConditional& out, int stride = 1);

PairConditional pair_conditional(const CompositionRatio& x, int i, int j, const TargetDistribution& target);

std::vector<double> pair_conditional_weights(const CompositionRatio& x, int i, int j,
                                             const TargetDistribution& target);

/// Categorical draw of a split index proportional to `weights`.
int sample_pair_conditional(std::span<const double> weights, Rng& rng);

/// Draws n from the prior, then a uniform state with exactly n nonzero entries.
CompositionRatio sample_initial(const SparsityCondition& prior, const SpaceParams& space, Rng& rng);

}  // namespace sparsecomp
