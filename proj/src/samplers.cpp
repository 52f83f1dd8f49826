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

#include "sparsecomp/samplers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "sparsecomp/error.hpp"

namespace sparsecomp {

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::NaiveMH: return "naive";
    case SamplerKind::GibbsPair: return "gibbs";
    case SamplerKind::Accelerated: return "accelerated";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  if (name == "naive") return SamplerKind::NaiveMH;
  if (name == "gibbs") return SamplerKind::GibbsPair;
  if (name == "accelerated") return SamplerKind::Accelerated;
  throw Error(ErrorCode::InvalidArgument, "unknown sampler '" + std::string(name) + "'");
}

void AcceptanceAudit::merge(const AcceptanceAudit& other) {
  proposals += other.proposals;
  general_checked += other.general_checked;
  off_table += other.off_table;
  max_formula_gap = std::max(max_formula_gap, other.max_formula_gap);
  min_ratio = std::min(min_ratio, other.min_ratio);
}

double pair_selection_probability(const CompositionRatio& x, int i, int j) {
  const int n = l0_norm(x);
  const double denom = static_cast<double>(n) * (x.size() - 1);
  const bool nonzero_i = x[i] > 0;
  const bool nonzero_j = x[j] > 0;
  if (nonzero_i && nonzero_j) return 2.0 / denom;
  if (nonzero_i || nonzero_j) return 1.0 / denom;
  return 0.0;
}

double accelerated_acceptance_ratio(int n, int n_next) {
  const double nd = n;
  if (n_next == n + 1) return 2.0 / (1.0 + 1.0 / nd);
  if (n_next == n - 1) return 1.0 / (2.0 * (1.0 - 1.0 / nd));
  if (n_next == n) return 1.0;
  throw Error(ErrorCode::StepTooLarge, "pair moves change the support size by at most one");
}

namespace {

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

bool matches_closed_form(double ratio, int n) {
  constexpr double kTol = 1e-9;
  const double nd = n;
  if (relative_gap(ratio, 1.0) <= kTol) return true;
  if (relative_gap(ratio, 2.0 * nd / (nd + 1.0)) <= kTol) return true;
  return n >= 2 && relative_gap(ratio, nd / (2.0 * (nd - 1.0))) <= kTol;
}

double current_energy(const CompositionRatio& x, const TargetDistribution& target, StepWorkspace& ws) {
  const auto values = x.values();
  if (!ws.cached_state.empty() && std::equal(values.begin(), values.end(), ws.cached_state.begin(),
                                              ws.cached_state.end())) {
    return ws.cached_energy;
  }
  ws.cached_energy = total_energy(x, target);
  ws.cached_state.assign(values.begin(), values.end());
  return ws.cached_energy;
}

int other_index(Rng& rng, int bins, int i) {
  const int r = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(bins - 1)));
  return r < i ? r : r + 1;
}

}  // namespace

StepOutcome naive_mh_step(CompositionRatio& x, const TargetDistribution& target, Rng& rng, StepWorkspace& ws,
                          const KernelOptions& options) {
  const auto& space = target.space();
  if (!ws.proposal || ws.proposal->size() != space.bins()) {
    ws.proposal = CompositionRatio::from_trusted(std::vector<int>(static_cast<std::size_t>(space.bins()), 0),
                                                 space.total());
  }
  sample_uniform_state(space, rng, *ws.proposal);
  const double from = current_energy(x, target, ws);
  const double to = total_energy(*ws.proposal, target);

  // The uniform proposal is symmetric, so only the target ratio enters.
  double log_ratio = 0.0;
  if (std::isinf(to)) {
    log_ratio = -kInfiniteEnergy;
  } else if (std::isinf(from)) {
    log_ratio = kInfiniteEnergy;
  } else {
    log_ratio = from - to;
  }
  const double ratio = options.acceptance_scale * std::exp(std::min(log_ratio, 700.0));
  const double acceptance = std::min(1.0, ratio);

  StepOutcome outcome;
  if (uniform01(rng) < acceptance) {
    outcome.accepted = true;
    outcome.updated = !(*ws.proposal == x);
    std::swap(x, *ws.proposal);
    ws.cached_energy = to;
    ws.cached_state.assign(x.values().begin(), x.values().end());
  }
  return outcome;
}

StepOutcome gibbs_pair_step(CompositionRatio& x, const TargetDistribution& target, Rng& rng, StepWorkspace& ws,
                            const KernelOptions& options) {
  const int bins = target.space().bins();
  const int i = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(bins)));
  const int j = other_index(rng, bins, i);
  StepOutcome outcome{true, false};
  // Two empty bins: the fiber is the current state alone.
  if (x[i] + x[j] == 0) return outcome;

  pair_conditional(x, i, j, target, ws.pair, options.split_stride);
  const int split = sample_pair_conditional(ws.pair.weights, rng);
  if (split != x[i]) {
    x.set_pair(i, j, split);
    outcome.updated = true;
  }
  return outcome;
}

StepOutcome accelerated_step(CompositionRatio& x, const TargetDistribution& target, Rng& rng, StepWorkspace& ws,
                             const KernelOptions& options) {
  const int bins = target.space().bins();
  const int n = l0_norm(x);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "accelerated kernel needs a nonzero entry");
  const auto support = x.support();
  const int i = support[uniform_index(rng, static_cast<std::size_t>(n))];
  const int j = other_index(rng, bins, i);

  auto& pc = ws.pair;
  pair_conditional(x, i, j, target, pc, options.split_stride);
  const int split = sample_pair_conditional(pc.weights, rng);
  const int current = x[i];
  const int pooled = pc.pooled;
  const int n_next = n - (current > 0 ? 1 : 0) - (x[j] > 0 ? 1 : 0) + (split > 0 ? 1 : 0) +
                     (pooled - split > 0 ? 1 : 0);
  const double closed_form = accelerated_acceptance_ratio(n, n_next);

  if (options.verify) {
    auto& audit = ws.audit;
    ++audit.proposals;
    audit.min_ratio = std::min(audit.min_ratio, closed_form);
    if (!(closed_form > 0.5)) {
      throw Error(ErrorCode::InvariantViolation, "accelerated acceptance ratio not above 1/2");
    }
    const double energy_from = total_energy(x, target);
    if (options.split_stride <= 1 && std::isfinite(energy_from)) {
      // General ratio P(x')Q(x', x) / (P(x)Q(x, x')) with Q = alpha * conditional,
      // using full energies instead of the incremental ones in the conditional.
      if (!ws.proposal || ws.proposal->size() != bins) ws.proposal = x;
      ws.proposal->assign_unchecked(x.values());
      ws.proposal->set_pair(i, j, split);
      const double energy_to = total_energy(*ws.proposal, target);
      const double alpha_from = pair_selection_probability(x, i, j);
      const double alpha_to = pair_selection_probability(*ws.proposal, i, j);
      // log of the conditional weight ratio w(current) / w(split), taken from energies.
      const double log_weights = pc.energies[static_cast<std::size_t>(split)] -
                                 pc.energies[static_cast<std::size_t>(current)];
      const double log_general =
          (energy_from - energy_to) + std::log(alpha_to) - std::log(alpha_from) + log_weights;
      const double general = std::exp(log_general);
      ++audit.general_checked;
      const double gap = relative_gap(general, closed_form);
      audit.max_formula_gap = std::max(audit.max_formula_gap, gap);
      if (!matches_closed_form(general, n)) ++audit.off_table;
      if (gap > 1e-9) {
        throw Error(ErrorCode::InvariantViolation,
                    "general acceptance " + std::to_string(general) + " disagrees with closed form " +
                        std::to_string(closed_form));
      }
    }
  }

  const double acceptance = std::min(1.0, options.acceptance_scale * closed_form);
  StepOutcome outcome;
  if (uniform01(rng) < acceptance) {
    outcome.accepted = true;
    if (split != current) {
      x.set_pair(i, j, split);
      outcome.updated = true;
    }
  }
  return outcome;
}

StepOutcome step(SamplerKind kind, CompositionRatio& x, const TargetDistribution& target, Rng& rng,
                 StepWorkspace& ws, const KernelOptions& options) {
  switch (kind) {
    case SamplerKind::NaiveMH: return naive_mh_step(x, target, rng, ws, options);
    case SamplerKind::GibbsPair: return gibbs_pair_step(x, target, rng, ws, options);
    case SamplerKind::Accelerated: return accelerated_step(x, target, rng, ws, options);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown sampler kind");
}

ChainResult run_chain(SamplerKind kind, const TargetDistribution& target, const ChainConfig& config,
                      CompositionRatio x0, Rng& rng, const SampleObserver& observer) {
  const auto& space = target.space();
  if (config.iterations < 1) throw Error(ErrorCode::InvalidArgument, "chain needs at least one iteration");
  if (config.burn_in < 0) throw Error(ErrorCode::InvalidArgument, "burn-in must be nonnegative");
  if (x0.size() != space.bins() || x0.total() != space.total()) {
    throw Error(ErrorCode::WrongLength, "initial state does not belong to the target's space");
  }
  x0.check_invariants();

  ChainResult result{{}, 0.0, 0.0, {}, std::move(x0), {}};
  auto& x = result.final_state;
  result.n_histogram.assign(static_cast<std::size_t>(space.max_support()) + 1, 0);
  if (config.record_trace) result.samples.reserve(static_cast<std::size_t>(config.iterations));

  StepWorkspace ws;
  std::int64_t iteration = 0;
  std::uint64_t accepted = 0;
  std::uint64_t updated = 0;
  try {
    for (; iteration < config.burn_in; ++iteration) step(kind, x, target, rng, ws, config.kernel);
    for (std::int64_t t = 0; t < config.iterations; ++t, ++iteration) {
      const auto outcome = step(kind, x, target, rng, ws, config.kernel);
      accepted += outcome.accepted ? 1 : 0;
      updated += outcome.updated ? 1 : 0;
      if (config.kernel.verify) x.check_invariants();
      ++result.n_histogram[static_cast<std::size_t>(l0_norm(x))];
      if (config.record_trace) result.samples.push_back(x.to_vector());
      if (observer) observer(x);
    }
  } catch (const Error& e) {
    throw e.at_iteration(iteration + 1);
  }
  const auto recorded = static_cast<double>(config.iterations);
  result.accepted_rate = static_cast<double>(accepted) / recorded;
  result.updated_rate = static_cast<double>(updated) / recorded;
  result.audit = ws.audit;
  return result;
}

ChainResult run_chain(SamplerKind kind, const TargetDistribution& target, const ChainConfig& config,
                      CompositionRatio x0, const SampleObserver& observer) {
  Rng rng(config.seed);
  return run_chain(kind, target, config, std::move(x0), rng, observer);
}

std::vector<ChainResult> run_chains(SamplerKind kind, const TargetDistribution& target, const ChainConfig& config,
                                    int chains, const std::function<SampleObserver(int)>& observer_for) {
  if (chains < 1) throw Error(ErrorCode::InvalidArgument, "chain count must be at least 1");
  std::vector<SampleObserver> observers(static_cast<std::size_t>(chains));
  if (observer_for) {
    for (int c = 0; c < chains; ++c) observers[static_cast<std::size_t>(c)] = observer_for(c);
  }
  std::vector<std::optional<ChainResult>> slots(static_cast<std::size_t>(chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
  std::atomic<int> next{0};

  auto worker = [&] {
    for (int c = next++; c < chains; c = next++) {
      const auto slot = static_cast<std::size_t>(c);
      try {
        Rng rng(chain_seed(config.seed, static_cast<std::uint64_t>(c)));
        auto x0 = sample_initial(target.sparsity(), target.space(), rng);
        slots[slot] = run_chain(kind, target, config, std::move(x0), rng, observers[slot]);
      } catch (...) {
        errors[slot] = std::current_exception();
      }
    }
  };

  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const int workers = std::min(chains, static_cast<int>(hardware));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }

  std::vector<ChainResult> results;
  results.reserve(slots.size());
  for (std::size_t c = 0; c < slots.size(); ++c) {
    if (errors[c]) std::rethrow_exception(errors[c]);
    results.push_back(std::move(*slots[c]));
  }
  return results;
}

std::vector<double> n_marginal(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw Error(ErrorCode::EmptyChain, "histogram is empty");
  std::vector<double> out(counts.size());
  for (std::size_t n = 0; n < counts.size(); ++n) out[n] = static_cast<double>(counts[n]) / static_cast<double>(total);
  return out;
}

std::vector<double> n_marginal(const ChainResult& result) { return n_marginal(result.n_histogram); }

}  // namespace sparsecomp
