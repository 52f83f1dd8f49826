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

#include "sparsecomp/target.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsecomp/error.hpp"

namespace sparsecomp {

SparsityCondition SparsityCondition::make(const std::map<int, double>& weights, const SpaceParams& space,
                                          double priority) {
  if (!(priority >= 0.0) || !std::isfinite(priority)) {
    throw Error(ErrorCode::InvalidPrior, "sparsity priority must be a finite nonnegative number");
  }
  const int top = space.max_support();
  SparsityCondition condition;
  condition.priority_ = priority;
  condition.weights_.assign(static_cast<std::size_t>(top) + 1, 0.0);
  double total = 0.0;
  for (const auto& [n, w] : weights) {
    if (n < 1 || n > top) {
      throw Error(ErrorCode::InvalidPrior, "prior assigns n = " + std::to_string(n) +
                                               ", outside the feasible range [1, " + std::to_string(top) + "]");
    }
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidPrior, "prior weights must be finite and nonnegative");
    }
    condition.weights_[static_cast<std::size_t>(n)] = w;
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidPrior, "prior needs at least one positive weight");
  for (auto& w : condition.weights_) w /= total;
  return condition;
}

double SparsityCondition::weight(int n) const {
  if (n < 0 || n > max_support()) return 0.0;
  return weights_[static_cast<std::size_t>(n)];
}

std::vector<int> SparsityCondition::support() const {
  std::vector<int> out;
  for (int n = 1; n <= max_support(); ++n) {
    if (weights_[static_cast<std::size_t>(n)] > 0.0) out.push_back(n);
  }
  return out;
}

PropertyCondition::PropertyCondition(Scorer scorer, double priority, double floor, std::string name)
    : scorer_(std::move(scorer)), priority_(priority), floor_(floor), name_(std::move(name)) {
  if (!scorer_) throw Error(ErrorCode::InvalidArgument, "property condition needs a scorer");
  if (!(priority >= 0.0) || !std::isfinite(priority)) {
    throw Error(ErrorCode::InvalidArgument, "property priority must be a finite nonnegative number");
  }
  if (!(floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "score floor must be positive");
}

PropertyCondition& PropertyCondition::with_pair_scorer(PairScorer pair_scorer) {
  pair_scorer_ = std::move(pair_scorer);
  return *this;
}

PropertyCondition& PropertyCondition::unclamped() {
  clamped_ = false;
  return *this;
}

namespace {

double checked_score(double value, const std::string& name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw Error(ErrorCode::ScorerFailure, "scorer '" + name + "' returned " + std::to_string(value));
  }
  return value;
}

}  // namespace

double PropertyCondition::score(const CompositionRatio& x) const {
  double value = 0.0;
  try {
    value = scorer_(x);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ScorerFailure, "scorer '" + name_ + "' failed: " + e.what());
  }
  return checked_score(value, name_);
}

void PropertyCondition::pair_scores(const CompositionRatio& x, int i, int j, std::span<double> scores) const {
  if (pair_scorer_) {
    try {
      pair_scorer_(x, i, j, scores);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ScorerFailure, "scorer '" + name_ + "' failed: " + e.what());
    }
    for (double& s : scores) s = checked_score(s, name_);
    return;
  }
  CompositionRatio probe = x;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    probe.set_pair(i, j, static_cast<int>(k));
    scores[k] = score(probe);
  }
}

double PropertyCondition::energy_from_score(double score) const {
  if (priority_ == 0.0) return 0.0;
  if (clamped_) return -priority_ * std::log(std::max(score, floor_));
  if (score == 0.0) return kInfiniteEnergy;
  return -priority_ * std::log(score);
}

TargetDistribution::TargetDistribution(SpaceParams space, SparsityCondition sparsity,
                                       std::vector<PropertyCondition> properties)
    : space_(space), sparsity_(std::move(sparsity)), properties_(std::move(properties)) {
  const int top = space_.max_support();
  if (sparsity_.max_support() != top) {
    throw Error(ErrorCode::InvalidArgument, "sparsity condition was built for a different space");
  }
  // log count_states(n) accumulated through the closed-form neighbour ratios,
  // starting from count_states(1) = N.
  sparsity_energy_.assign(static_cast<std::size_t>(top) + 1, kInfiniteEnergy);
  double log_count = std::log(static_cast<double>(space_.bins()));
  const double c = sparsity_.priority();
  for (int n = 1; n <= top; ++n) {
    if (n > 1) log_count -= log_count_ratio(n - 1, n, space_);
    const double w = sparsity_.weight(n);
    // A zero priority disables the condition outright, gaps in the prior included.
    if (c == 0.0) {
      sparsity_energy_[static_cast<std::size_t>(n)] = 0.0;
    } else if (w > 0.0) {
      sparsity_energy_[static_cast<std::size_t>(n)] = -c * (std::log(w) - log_count);
    }
  }
}

double TargetDistribution::sparsity_energy_for(int n) const {
  if (n < 1 || n >= static_cast<int>(sparsity_energy_.size())) return kInfiniteEnergy;
  return sparsity_energy_[static_cast<std::size_t>(n)];
}

double sparsity_energy(const CompositionRatio& x, const TargetDistribution& target) {
  return target.sparsity_energy_for(l0_norm(x));
}

double property_energy(const CompositionRatio& x, const PropertyCondition& condition) {
  if (condition.priority() == 0.0) return 0.0;
  return condition.energy_from_score(condition.score(x));
}

double total_energy(const CompositionRatio& x, const TargetDistribution& target) {
  double energy = sparsity_energy(x, target);
  if (std::isinf(energy)) return energy;
  for (const auto& condition : target.properties()) {
    energy += property_energy(x, condition);
    if (std::isinf(energy)) return energy;
  }
  return energy;
}

double log_prob_ratio(const CompositionRatio& x, const CompositionRatio& x2, const TargetDistribution& target) {
  const double to = total_energy(x2, target);
  if (std::isinf(to)) return -kInfiniteEnergy;
  const double from = total_energy(x, target);
  return from - to;
}

void pair_conditional(const CompositionRatio& x, int i, int j, const TargetDistribution& target,
                      PairConditional& out, int stride) {
  if (i == j) throw Error(ErrorCode::InvalidArgument, "pair conditional needs two distinct indices");
  const int xi = x[i];
  const int xj = x[j];
  const int pooled = xi + xj;
  const auto splits = static_cast<std::size_t>(pooled) + 1;
  out.i = i;
  out.j = j;
  out.pooled = pooled;
  out.energies.assign(splits, 0.0);
  out.weights.assign(splits, 0.0);

  // Support size outside the pair is fixed; each split adds [k > 0] + [s - k > 0].
  const int others = l0_norm(x) - (xi > 0 ? 1 : 0) - (xj > 0 ? 1 : 0);
  auto considered = [&](int k) { return stride <= 1 || k % stride == 0 || k == pooled || k == xi; };
  for (int k = 0; k <= pooled; ++k) {
    const int n = others + (k > 0 ? 1 : 0) + (pooled - k > 0 ? 1 : 0);
    out.energies[static_cast<std::size_t>(k)] =
        considered(k) ? target.sparsity_energy_for(n) : kInfiniteEnergy;
  }

  if (!target.properties().empty()) {
    out.scratch.assign(splits, 0.0);
    for (const auto& condition : target.properties()) {
      if (condition.priority() == 0.0) continue;
      if (stride <= 1) {
        condition.pair_scores(x, i, j, out.scratch);
      } else {
        CompositionRatio probe = x;
        for (int k = 0; k <= pooled; ++k) {
          if (std::isinf(out.energies[static_cast<std::size_t>(k)])) continue;
          probe.set_pair(i, j, k);
          out.scratch[static_cast<std::size_t>(k)] = condition.score(probe);
        }
      }
      for (std::size_t k = 0; k < splits; ++k) {
        if (std::isinf(out.energies[k])) continue;
        out.energies[k] += condition.energy_from_score(out.scratch[k]);
      }
    }
  }

  const double lowest = *std::min_element(out.energies.begin(), out.energies.end());
  if (std::isinf(lowest)) {
    throw Error(ErrorCode::AllZeroWeights, "every split of pair (" + std::to_string(i) + ", " +
                                               std::to_string(j) + ") has zero probability");
  }
  for (std::size_t k = 0; k < splits; ++k) out.weights[k] = std::exp(lowest - out.energies[k]);
}

PairConditional pair_conditional(const CompositionRatio& x, int i, int j, const TargetDistribution& target) {
  PairConditional out;
  pair_conditional(x, i, j, target, out);
  return out;
}

std::vector<double> pair_conditional_weights(const CompositionRatio& x, int i, int j,
                                             const TargetDistribution& target) {
  return pair_conditional(x, i, j, target).weights;
}

int sample_pair_conditional(std::span<const double> weights, Rng& rng) {
  return static_cast<int>(sample_categorical(weights, rng));
}

CompositionRatio sample_initial(const SparsityCondition& prior, const SpaceParams& space, Rng& rng) {
  if (prior.max_support() != space.max_support()) {
    throw Error(ErrorCode::InvalidArgument, "prior was built for a different space");
  }
  const int n = static_cast<int>(sample_categorical(prior.weights(), rng));
  return sample_state_with_support(space, n, rng);
}

}  // namespace sparsecomp
