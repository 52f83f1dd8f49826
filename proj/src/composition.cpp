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

#include "sparsecomp/composition.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "sparsecomp/error.hpp"

namespace sparsecomp {

SpaceParams SpaceParams::make(int bins, int total) {
  if (bins < 2) throw Error(ErrorCode::InvalidArgument, "number of bins N must be at least 2");
  if (total < 1) throw Error(ErrorCode::InvalidArgument, "total M must be at least 1");
  return SpaceParams(bins, total);
}

CompositionRatio::CompositionRatio(std::vector<int> values, int total)
    : values_(std::move(values)), total_(total) {
  rebuild_support();
}

CompositionRatio CompositionRatio::from_trusted(std::vector<int> values, int total) {
  return CompositionRatio(std::move(values), total);
}

void CompositionRatio::rebuild_support() {
  support_.clear();
  slot_.assign(values_.size(), -1);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (values_[k] > 0) {
      slot_[k] = static_cast<int>(support_.size());
      support_.push_back(static_cast<int>(k));
    }
  }
}

void CompositionRatio::update_membership(int index) {
  const auto k = static_cast<std::size_t>(index);
  const bool present = slot_[k] >= 0;
  if (values_[k] > 0 && !present) {
    slot_[k] = static_cast<int>(support_.size());
    support_.push_back(index);
  } else if (values_[k] == 0 && present) {
    // Swap-remove keeps the support list dense.
    const int pos = slot_[k];
    const int moved = support_.back();
    support_[static_cast<std::size_t>(pos)] = moved;
    slot_[static_cast<std::size_t>(moved)] = pos;
    support_.pop_back();
    slot_[k] = -1;
  }
}

void CompositionRatio::set_pair(int i, int j, int new_i) {
  auto& xi = values_[static_cast<std::size_t>(i)];
  auto& xj = values_[static_cast<std::size_t>(j)];
  const int pooled = xi + xj;
  xi = new_i;
  xj = pooled - new_i;
  update_membership(i);
  update_membership(j);
}

void CompositionRatio::assign_unchecked(std::span<const int> values) {
  values_.assign(values.begin(), values.end());
  rebuild_support();
}

void CompositionRatio::check_invariants() const {
  long long sum = 0;
  int nonzero = 0;
  for (int v : values_) {
    if (v < 0) throw Error(ErrorCode::InvariantViolation, "negative entry in state");
    sum += v;
    nonzero += v > 0 ? 1 : 0;
  }
  if (sum != total_) throw Error(ErrorCode::InvariantViolation, "state no longer sums to M");
  if (nonzero != nonzero_count()) throw Error(ErrorCode::InvariantViolation, "support bookkeeping out of sync");
}

int l0_norm(const CompositionRatio& x) { return x.nonzero_count(); }

CompositionRatio validate(std::span<const int> values, const SpaceParams& space) {
  if (static_cast<int>(values.size()) != space.bins()) {
    throw Error(ErrorCode::WrongLength, "expected " + std::to_string(space.bins()) + " entries, got " +
                                            std::to_string(values.size()));
  }
  long long sum = 0;
  for (int v : values) {
    if (v < 0) throw Error(ErrorCode::NegativeEntry, "entries must be nonnegative");
    sum += v;
  }
  if (sum != space.total()) {
    throw Error(ErrorCode::SumMismatch,
                "entries sum to " + std::to_string(sum) + ", expected " + std::to_string(space.total()));
  }
  return CompositionRatio::from_trusted(std::vector<int>(values.begin(), values.end()), space.total());
}

BigCount binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigCount result = 1;
  for (int step = 1; step <= k; ++step) {
    result *= n - k + step;
    result /= step;
  }
  return result;
}

BigCount count_states(const SpaceParams& space, int n) {
  if (n < 1 || n > space.max_support()) {
    throw Error(ErrorCode::OutOfRange, "n = " + std::to_string(n) + " outside [1, min(N, M)]");
  }
  const int m = space.total();
  return binomial(space.bins(), n) * binomial(m - 1, m - n);
}

BigCount count_all_states(const SpaceParams& space) {
  return binomial(space.total() + space.bins() - 1, space.bins() - 1);
}

double log_big(const BigCount& value) {
  if (value <= 0) return -INFINITY;
  const auto bits = boost::multiprecision::msb(value);
  if (bits < 1000) return std::log(value.convert_to<double>());
  const auto shift = bits - 900;
  const BigCount head = value >> shift;
  return std::log(head.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

double log_count_ratio(int n, int n_next, const SpaceParams& space) {
  const int top = space.max_support();
  if (n < 1 || n > top || n_next < 1 || n_next > top) {
    throw Error(ErrorCode::OutOfRange, "support sizes must lie in [1, min(N, M)]");
  }
  const double big_n = space.bins();
  const double big_m = space.total();
  const double nd = n;
  if (n_next == n + 1) return std::log(nd * (nd + 1.0) / ((big_n - nd) * (big_m - nd)));
  if (n_next == n - 1) return std::log((big_n - nd + 1.0) * (big_m - nd + 1.0) / (nd * (nd - 1.0)));
  if (n_next == n) return 0.0;
  throw Error(ErrorCode::StepTooLarge, "support sizes differ by more than one");
}

void sample_uniform_state(const SpaceParams& space, Rng& rng, CompositionRatio& out) {
  const int bins = space.bins();
  const int total = space.total();
  const int slots = total + bins - 1;
  std::vector<int> values(static_cast<std::size_t>(bins), 0);
  if (total <= bins - 1) {
    // Pick the star slots; a star at slot s preceded by t stars sits in bin s - t.
    const auto stars = sample_sorted_subset(slots, total, rng);
    for (std::size_t t = 0; t < stars.size(); ++t) ++values[static_cast<std::size_t>(stars[t]) - t];
  } else {
    const auto bars = sample_sorted_subset(slots, bins - 1, rng);
    int previous = -1;
    for (std::size_t b = 0; b < bars.size(); ++b) {
      values[b] = bars[b] - previous - 1;
      previous = bars[b];
    }
    values.back() = slots - 1 - previous;
  }
  out.assign_unchecked(values);
}

CompositionRatio sample_uniform_state(const SpaceParams& space, Rng& rng) {
  auto out = CompositionRatio::from_trusted(std::vector<int>(static_cast<std::size_t>(space.bins()), 0),
                                            space.total());
  sample_uniform_state(space, rng, out);
  return out;
}

CompositionRatio sample_state_with_support(const SpaceParams& space, int n, Rng& rng) {
  if (n < 1 || n > space.max_support()) {
    throw Error(ErrorCode::OutOfRange, "cannot place " + std::to_string(n) + " positive parts in N = " +
                                           std::to_string(space.bins()) + ", M = " +
                                           std::to_string(space.total()));
  }
  const int total = space.total();
  const auto bins = sample_sorted_subset(space.bins(), n, rng);
  // A composition of M into n positive parts is a choice of n - 1 cuts among M - 1 gaps.
  const auto cuts = sample_sorted_subset(total - 1, n - 1, rng);
  std::vector<int> values(static_cast<std::size_t>(space.bins()), 0);
  int previous = 0;
  for (int part = 0; part < n; ++part) {
    const int end = part + 1 < n ? cuts[static_cast<std::size_t>(part)] + 1 : total;
    values[static_cast<std::size_t>(bins[static_cast<std::size_t>(part)])] = end - previous;
    previous = end;
  }
  return CompositionRatio::from_trusted(std::move(values), total);
}

}  // namespace sparsecomp
