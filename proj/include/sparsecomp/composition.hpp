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

#include <boost/multiprecision/cpp_int.hpp>

#include "sparsecomp/random.hpp"

namespace sparsecomp {

/// Exact nonnegative integer used for state counts.
using BigCount = boost::multiprecision::cpp_int;

/// N bins holding M balls. N >= 2, M >= 1.
class SpaceParams {
 public:
  static SpaceParams make(int bins, int total);

  int bins() const noexcept { return bins_; }
  int total() const noexcept { return total_; }

  /// Largest feasible number of nonzero entries, min(N, M).
  int max_support() const noexcept { return bins_ < total_ ? bins_ : total_; }

  friend bool operator==(const SpaceParams&, const SpaceParams&) = default;

 private:
  SpaceParams(int bins, int total) : bins_(bins), total_(total) {}

  int bins_;
  int total_;
};

/// A nonnegative integer vector of length N summing to M.
///
/// The only mutation is `set_pair`, which moves balls between two bins and so
/// keeps the sum fixed. The set of nonzero indices is tracked incrementally so
/// that l0_norm and uniform draws from the support are O(1).
class CompositionRatio {
 public:
  std::span<const int> values() const noexcept { return values_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  int total() const noexcept { return total_; }
  int operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

  int nonzero_count() const noexcept { return static_cast<int>(support_.size()); }

  /// Indices of the nonzero entries, in no particular order.
  std::span<const int> support() const noexcept { return support_; }

  /// Sets x_i = new_i and x_j = (x_i + x_j) - new_i. Requires i != j and
  /// 0 <= new_i <= x_i + x_j.
  void set_pair(int i, int j, int new_i);

  /// Overwrites all entries. `values` must already satisfy the invariants.
  void assign_unchecked(std::span<const int> values);

  /// Recomputes sum, sign and support bookkeeping; throws InvariantViolation.
  void check_invariants() const;

  std::vector<int> to_vector() const { return values_; }

  friend bool operator==(const CompositionRatio& a, const CompositionRatio& b) {
    return a.values_ == b.values_;
  }

  /// Trusted construction for code that builds states which are valid by
  /// construction (samplers, enumeration). Use validate() for external input.
  static CompositionRatio from_trusted(std::vector<int> values, int total);

 private:
  CompositionRatio(std::vector<int> values, int total);
  void rebuild_support();
  void update_membership(int index);

  std::vector<int> values_;
  std::vector<int> support_;
  std::vector<int> slot_;  // position of an index in support_, -1 if absent
  int total_ = 0;
};

/// Number of strictly positive entries.
int l0_norm(const CompositionRatio& x);

/// Checks membership in the state space; throws WrongLength, NegativeEntry or SumMismatch.
CompositionRatio validate(std::span<const int> values, const SpaceParams& space);

/// Exact binomial coefficient C(n, k); zero when k < 0 or k > n.
BigCount binomial(int n, int k);

/// Number of states with exactly n nonzero entries: C(N, n) * C(M-1, M-n).
BigCount count_states(const SpaceParams& space, int n);

/// Total number of states, C(M+N-1, N-1).
BigCount count_all_states(const SpaceParams& space);

/// Natural log of an exact count.
double log_big(const BigCount& value);

/// log(count_states(n) / count_states(n_next)) for |n_next - n| <= 1, without
/// forming either count.
double log_count_ratio(int n, int n_next, const SpaceParams& space);

/// Uniform draw from the whole state space by the stars-and-bars bijection.
CompositionRatio sample_uniform_state(const SpaceParams& space, Rng& rng);

/// In-place variant reusing the storage of `out` (which must have length N).
void sample_uniform_state(const SpaceParams& space, Rng& rng, CompositionRatio& out);

/// Uniform draw among the states with exactly n nonzero entries.
CompositionRatio sample_state_with_support(const SpaceParams& space, int n, Rng& rng);

}  // namespace sparsecomp
