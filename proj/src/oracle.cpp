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

#include "sparsecomp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsecomp/error.hpp"

namespace sparsecomp::oracle {

std::span<const std::uint16_t> EnumeratedSpace::raw(std::size_t k) const {
  const auto bins = static_cast<std::size_t>(space_.bins());
  return {cells_.data() + k * bins, bins};
}

CompositionRatio EnumeratedSpace::state(std::size_t k) const {
  const auto cells = raw(k);
  return CompositionRatio::from_trusted(std::vector<int>(cells.begin(), cells.end()), space_.total());
}

int EnumeratedSpace::nonzero_count(std::size_t k) const {
  const auto cells = raw(k);
  return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](std::uint16_t v) { return v > 0; }));
}

std::size_t EnumeratedSpace::index_of(std::span<const int> values) const {
  const int bins = space_.bins();
  if (static_cast<int>(values.size()) != bins) throw Error(ErrorCode::OutOfRange, "state has the wrong length");
  const auto stride = static_cast<std::size_t>(bins) + 1;
  int remaining = space_.total();
  std::uint64_t rank = 0;
  for (int k = 0; k + 1 < bins; ++k) {
    const int v = values[static_cast<std::size_t>(k)];
    if (v < 0 || v > remaining) throw Error(ErrorCode::OutOfRange, "state is not a member of the space");
    // States with a smaller entry at k come first; count them.
    const auto bins_after = static_cast<std::size_t>(bins - k - 1);
    for (int smaller = 0; smaller < v; ++smaller) {
      rank += weak_compositions_[static_cast<std::size_t>(remaining - smaller) * stride + bins_after];
    }
    remaining -= v;
  }
  if (values.back() != remaining) throw Error(ErrorCode::OutOfRange, "state is not a member of the space");
  return static_cast<std::size_t>(rank);
}

EnumeratedSpace enumerate_space(const SpaceParams& space, std::uint64_t cap) {
  const BigCount size = count_all_states(space);
  if (size > BigCount(cap)) {
    throw Error(ErrorCode::SpaceTooLarge, "space has " + size.str() + " states, above the enumeration cap of " +
                                              std::to_string(cap));
  }
  if (space.total() > 65535) throw Error(ErrorCode::SpaceTooLarge, "M too large for enumeration");

  EnumeratedSpace out(space);
  const int bins = space.bins();
  const int total = space.total();
  out.size_ = static_cast<std::size_t>(size.convert_to<std::uint64_t>());

  const auto stride = static_cast<std::size_t>(bins) + 1;
  out.weak_compositions_.assign(static_cast<std::size_t>(total + 1) * stride, 0);
  for (int r = 0; r <= total; ++r) {
    for (int m = 1; m <= bins; ++m) {
      // Bounded by the full space size, which already fits under the cap.
      out.weak_compositions_[static_cast<std::size_t>(r) * stride + static_cast<std::size_t>(m)] =
          binomial(r + m - 1, m - 1).convert_to<std::uint64_t>();
    }
  }

  out.cells_.reserve(out.size_ * static_cast<std::size_t>(bins));
  std::vector<std::uint16_t> current(static_cast<std::size_t>(bins), 0);
  auto fill = [&](auto&& self, int k, int remaining) -> void {
    if (k == bins - 1) {
      current[static_cast<std::size_t>(k)] = static_cast<std::uint16_t>(remaining);
      out.cells_.insert(out.cells_.end(), current.begin(), current.end());
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      current[static_cast<std::size_t>(k)] = static_cast<std::uint16_t>(v);
      self(self, k + 1, remaining - v);
    }
  };
  fill(fill, 0, total);
  return out;
}

ExactDistribution exact_distribution(const EnumeratedSpace& space, const TargetDistribution& target) {
  if (!(space.space() == target.space())) {
    throw Error(ErrorCode::InvalidArgument, "target and enumerated space disagree on (N, M)");
  }
  ExactDistribution dist;
  dist.energies.resize(space.size());
  for (std::size_t k = 0; k < space.size(); ++k) dist.energies[k] = total_energy(space.state(k), target);

  const double lowest = *std::min_element(dist.energies.begin(), dist.energies.end());
  if (std::isinf(lowest)) throw Error(ErrorCode::DegenerateTarget, "every state has infinite energy");
  double z = 0.0;
  for (double e : dist.energies) z += std::exp(lowest - e);
  dist.log_partition = std::log(z) - lowest;
  dist.probs.resize(space.size());
  for (std::size_t k = 0; k < space.size(); ++k) dist.probs[k] = std::exp(-dist.energies[k] - dist.log_partition);
  return dist;
}

std::vector<double> exact_n_marginal(const ExactDistribution& dist, const EnumeratedSpace& space) {
  std::vector<double> marginal(static_cast<std::size_t>(space.space().max_support()) + 1, 0.0);
  for (std::size_t k = 0; k < space.size(); ++k) {
    marginal[static_cast<std::size_t>(space.nonzero_count(k))] += dist.probs[k];
  }
  return marginal;
}

namespace {

struct Fiber {
  std::vector<std::size_t> states;
  std::vector<double> probs;  // normalized; empty when the whole fiber has zero mass
};

Fiber enumerate_fiber(const EnumeratedSpace& space, const std::vector<double>& energies,
                      std::span<const std::uint16_t> from, int i, int j) {
  std::vector<int> values(from.begin(), from.end());
  const int pooled = values[static_cast<std::size_t>(i)] + values[static_cast<std::size_t>(j)];
  Fiber fiber;
  for (int k = 0; k <= pooled; ++k) {
    values[static_cast<std::size_t>(i)] = k;
    values[static_cast<std::size_t>(j)] = pooled - k;
    fiber.states.push_back(space.index_of(values));
  }
  double lowest = INFINITY;
  for (auto s : fiber.states) lowest = std::min(lowest, energies[s]);
  if (std::isinf(lowest)) return fiber;
  double sum = 0.0;
  for (auto s : fiber.states) {
    fiber.probs.push_back(std::exp(lowest - energies[s]));
    sum += fiber.probs.back();
  }
  for (auto& p : fiber.probs) p /= sum;
  return fiber;
}

}  // namespace

TransitionMatrix transition_matrix(SamplerKind kind, const EnumeratedSpace& space, const TargetDistribution& target,
                                   const TransitionOptions& options) {
  const std::size_t size = space.size();
  if (size > options.cap) {
    throw Error(ErrorCode::SpaceTooLarge, "transition matrix limited to " + std::to_string(options.cap) + " states");
  }
  std::vector<double> energies(size);
  for (std::size_t k = 0; k < size; ++k) energies[k] = total_energy(space.state(k), target);

  const int bins = space.space().bins();
  TransitionMatrix matrix(size);
  for (std::size_t a = 0; a < size; ++a) {
    const auto from = space.raw(a);
    switch (kind) {
      case SamplerKind::NaiveMH: {
        const double proposal = 1.0 / static_cast<double>(size);
        for (std::size_t b = 0; b < size; ++b) {
          double acceptance = 0.0;
          if (std::isinf(energies[b])) {
            acceptance = 0.0;
          } else if (std::isinf(energies[a])) {
            acceptance = 1.0;
          } else {
            acceptance = std::min(1.0, options.acceptance_scale * std::exp(energies[a] - energies[b]));
          }
          matrix.at(a, b) += proposal * acceptance;
          matrix.at(a, a) += proposal * (1.0 - acceptance);
        }
        break;
      }
      case SamplerKind::GibbsPair: {
        const double pair_prob = 2.0 / (static_cast<double>(bins) * (bins - 1));
        for (int i = 0; i < bins; ++i) {
          for (int j = i + 1; j < bins; ++j) {
            if (from[static_cast<std::size_t>(i)] + from[static_cast<std::size_t>(j)] == 0) {
              matrix.at(a, a) += pair_prob;
              continue;
            }
            const auto fiber = enumerate_fiber(space, energies, from, i, j);
            if (fiber.probs.empty()) {
              matrix.at(a, a) += pair_prob;
              continue;
            }
            for (std::size_t k = 0; k < fiber.states.size(); ++k) matrix.at(a, fiber.states[k]) += pair_prob * fiber.probs[k];
          }
        }
        break;
      }
      case SamplerKind::Accelerated: {
        const auto x = space.state(a);
        const double choice = 1.0 / (static_cast<double>(l0_norm(x)) * (bins - 1));
        for (int i = 0; i < bins; ++i) {
          if (from[static_cast<std::size_t>(i)] == 0) continue;
          for (int j = 0; j < bins; ++j) {
            if (j == i) continue;
            const auto fiber = enumerate_fiber(space, energies, from, i, j);
            if (fiber.probs.empty()) {
              matrix.at(a, a) += choice;
              continue;
            }
            const double alpha_from = pair_selection_probability(x, i, j);
            for (std::size_t k = 0; k < fiber.states.size(); ++k) {
              const double q = choice * fiber.probs[k];
              const auto b = fiber.states[k];
              if (b == a) {
                matrix.at(a, a) += q;
                continue;
              }
              const double alpha_to = pair_selection_probability(space.state(b), i, j);
              const double acceptance = std::min(1.0, options.acceptance_scale * alpha_to / alpha_from);
              matrix.at(a, b) += q * acceptance;
              matrix.at(a, a) += q * (1.0 - acceptance);
            }
          }
        }
        break;
      }
    }
  }
  return matrix;
}

double row_sum_residual(const TransitionMatrix& matrix) {
  double worst = 0.0;
  for (std::size_t a = 0; a < matrix.size(); ++a) {
    double sum = 0.0;
    for (double p : matrix.row(a)) sum += p;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double detailed_balance_residual(const TransitionMatrix& matrix, std::span<const double> probs) {
  double worst = 0.0;
  for (std::size_t a = 0; a < matrix.size(); ++a) {
    for (std::size_t b = a + 1; b < matrix.size(); ++b) {
      worst = std::max(worst, std::abs(probs[a] * matrix(a, b) - probs[b] * matrix(b, a)));
    }
  }
  return worst;
}

namespace {

std::vector<double> left_multiply(std::span<const double> v, const TransitionMatrix& matrix) {
  std::vector<double> out(matrix.size(), 0.0);
  for (std::size_t a = 0; a < matrix.size(); ++a) {
    if (v[a] == 0.0) continue;
    const auto row = matrix.row(a);
    for (std::size_t b = 0; b < matrix.size(); ++b) out[b] += v[a] * row[b];
  }
  return out;
}

}  // namespace

double stationarity_residual(const TransitionMatrix& matrix, std::span<const double> probs) {
  const auto moved = left_multiply(probs, matrix);
  return max_abs_difference(moved, probs);
}

std::vector<double> uniform_on_support(std::span<const double> probs) {
  const auto support = std::count_if(probs.begin(), probs.end(), [](double p) { return p > 0.0; });
  if (support == 0) throw Error(ErrorCode::DegenerateTarget, "no state has positive probability");
  std::vector<double> v(probs.size(), 0.0);
  for (std::size_t k = 0; k < probs.size(); ++k) v[k] = probs[k] > 0.0 ? 1.0 / static_cast<double>(support) : 0.0;
  return v;
}

std::vector<double> stationary_distribution(const TransitionMatrix& matrix, std::span<const double> initial,
                                            double tolerance, int max_iterations) {
  const std::size_t size = matrix.size();
  std::vector<double> v(size, 1.0 / static_cast<double>(size));
  if (!initial.empty()) {
    if (initial.size() != size) throw Error(ErrorCode::SupportMismatch, "initial vector has the wrong length");
    v.assign(initial.begin(), initial.end());
  }
  for (int it = 0; it < max_iterations; ++it) {
    auto next = left_multiply(v, matrix);
    double sum = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      next[k] = 0.5 * (next[k] + v[k]);
      sum += next[k];
    }
    for (auto& p : next) p /= sum;
    const double change = max_abs_difference(next, v);
    v = std::move(next);
    if (change < tolerance) break;
  }
  return v;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::SupportMismatch, "distributions have different supports");
  double sp = 0.0;
  double sq = 0.0;
  for (double v : p) sp += v;
  for (double v : q) sq += v;
  if (!(sp > 0.0) || !(sq > 0.0)) throw Error(ErrorCode::InvalidArgument, "cannot normalize an all-zero histogram");
  double l1 = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) l1 += std::abs(p[k] / sp - q[k] / sq);
  return 0.5 * l1;
}

double max_abs_difference(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::SupportMismatch, "vectors have different lengths");
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) worst = std::max(worst, std::abs(p[k] - q[k]));
  return worst;
}

std::vector<double> chain_state_frequencies(const EnumeratedSpace& space, SamplerKind kind,
                                            const TargetDistribution& target, const ChainConfig& config) {
  std::vector<double> counts(space.size(), 0.0);
  Rng rng(config.seed);
  auto x0 = sample_initial(target.sparsity(), target.space(), rng);
  run_chain(kind, target, config, std::move(x0), rng,
            [&](const CompositionRatio& x) { counts[space.index_of(x.values())] += 1.0; });
  for (auto& c : counts) c /= static_cast<double>(config.iterations);
  return counts;
}

}  // namespace sparsecomp::oracle
