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
#include <span>
#include <vector>

#include "sparsecomp/composition.hpp"
#include "sparsecomp/samplers.hpp"
#include "sparsecomp/target.hpp"

namespace sparsecomp::oracle {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;
inline constexpr std::size_t kDefaultTransitionCap = 500;

/// Every state of a small space, in ascending lexicographic order.
class EnumeratedSpace {
 public:
  const SpaceParams& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return size_; }

  std::span<const std::uint16_t> raw(std::size_t k) const;
  CompositionRatio state(std::size_t k) const;
  int nonzero_count(std::size_t k) const;

  /// Position of a member state (lexicographic rank). Throws OutOfRange for non-members.
  std::size_t index_of(std::span<const int> values) const;

 private:
  friend EnumeratedSpace enumerate_space(const SpaceParams& space, std::uint64_t cap);
  explicit EnumeratedSpace(SpaceParams space) : space_(space) {}

  SpaceParams space_;
  std::size_t size_ = 0;
  std::vector<std::uint16_t> cells_;           // size_ * N entries, row-major
  std::vector<std::uint64_t> weak_compositions_;  // [r * (N + 1) + m] = #ways to put r balls in m bins
};

/// Throws SpaceTooLarge when C(M+N-1, N-1) exceeds `cap`.
EnumeratedSpace enumerate_space(const SpaceParams& space, std::uint64_t cap = kDefaultEnumerationCap);

struct ExactDistribution {
  std::vector<double> probs;     // aligned with the enumerated states
  std::vector<double> energies;  // total energy per state
  double log_partition = 0.0;
};

/// Normalizes exp(-total_energy) over the whole space. Throws DegenerateTarget.
ExactDistribution exact_distribution(const EnumeratedSpace& space, const TargetDistribution& target);

/// Marginal of the support size, indexed by n = 0..min(N, M).
std::vector<double> exact_n_marginal(const ExactDistribution& dist, const EnumeratedSpace& space);

class TransitionMatrix {
 public:
  explicit TransitionMatrix(std::size_t size) : size_(size), entries_(size * size, 0.0) {}

  std::size_t size() const noexcept { return size_; }
  double operator()(std::size_t from, std::size_t to) const { return entries_[from * size_ + to]; }
  double& at(std::size_t from, std::size_t to) { return entries_[from * size_ + to]; }
  std::span<const double> row(std::size_t from) const { return {entries_.data() + from * size_, size_}; }

 private:
  std::size_t size_;
  std::vector<double> entries_;
};

struct TransitionOptions {
  double acceptance_scale = 1.0;  // mirrors KernelOptions::acceptance_scale
  std::size_t cap = kDefaultTransitionCap;
};

/// One-step transition probabilities of a kernel, assembled by enumerating
/// every random choice it makes. Pair fibers are scored with full energies and
/// acceptance uses alpha_ij by its definition, independently of the sampler's
/// shortcuts. Rows of zero-probability states whose fiber has no mass stay put.
TransitionMatrix transition_matrix(SamplerKind kind, const EnumeratedSpace& space, const TargetDistribution& target,
                                   const TransitionOptions& options = {});

/// max over rows of |sum_b pi(a, b) - 1|.
double row_sum_residual(const TransitionMatrix& matrix);

/// max over pairs of |P(a) pi(a, b) - P(b) pi(b, a)|.
double detailed_balance_residual(const TransitionMatrix& matrix, std::span<const double> probs);

/// max over states of |(P pi)(b) - P(b)|.
double stationarity_residual(const TransitionMatrix& matrix, std::span<const double> probs);

/// Left eigenvector for eigenvalue 1 by power iteration on the lazy chain
/// (I + pi) / 2, started from `initial` (uniform when empty). Starting on the
/// target's support keeps mass out of zero-probability states whose moves all
/// lead to other zero-probability states.
std::vector<double> stationary_distribution(const TransitionMatrix& matrix, std::span<const double> initial = {},
                                            double tolerance = 1e-15, int max_iterations = 1'000'000);

/// Uniform weights on the states with positive probability.
std::vector<double> uniform_on_support(std::span<const double> probs);

/// Half the L1 distance after normalizing both inputs. Throws SupportMismatch
/// when the lengths differ.
double total_variation(std::span<const double> p, std::span<const double> q);

double max_abs_difference(std::span<const double> p, std::span<const double> q);

/// Empirical state frequencies of one chain, aligned with `space`. The chain
/// starts from a prior draw on the stream seeded with config.seed, like chain 0
/// of run_chains.
std::vector<double> chain_state_frequencies(const EnumeratedSpace& space, SamplerKind kind,
                                            const TargetDistribution& target, const ChainConfig& config);

}  // namespace sparsecomp::oracle
