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
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "sparsecomp/composition.hpp"
#include "sparsecomp/random.hpp"
#include "sparsecomp/target.hpp"

namespace sparsecomp {

enum class SamplerKind { NaiveMH, GibbsPair, Accelerated };

/// "naive", "gibbs" or "accelerated".
std::string_view to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(std::string_view name);

#ifdef NDEBUG
inline constexpr bool kVerifyByDefault = false;
#else
inline constexpr bool kVerifyByDefault = true;
#endif

struct KernelOptions {
  /// Evaluate only every d-th split of the pair conditional. Values above 1
  /// perturb the proposal and therefore the invariant distribution.
  int split_stride = 1;
  /// Re-derive every accelerated acceptance from the general Metropolis-Hastings
  /// ratio and check state invariants after every recorded step.
  bool verify = kVerifyByDefault;
  /// Test hook: multiplies the naive and accelerated acceptance ratios.
  double acceptance_scale = 1.0;
};

/// Bookkeeping filled by accelerated steps when KernelOptions::verify is set.
struct AcceptanceAudit {
  std::uint64_t proposals = 0;         // accelerated proposals seen
  std::uint64_t general_checked = 0;   // proposals compared against the general formula
  std::uint64_t off_table = 0;         // general ratios matching none of the three closed forms
  double max_formula_gap = 0.0;        // max relative |general - closed form|
  double min_ratio = std::numeric_limits<double>::infinity();

  void merge(const AcceptanceAudit& other);
};

struct StepOutcome {
  bool accepted = false;
  bool updated = false;
};

/// Reusable per-chain scratch space. Not shareable between concurrent chains.
struct StepWorkspace {
  PairConditional pair;
  std::optional<CompositionRatio> proposal;
  std::vector<int> cached_state;  // state whose total energy is cached (naive kernel)
  double cached_energy = 0.0;
  AcceptanceAudit audit;
};

/// alpha_ij(x): probability that the accelerated kernel selects the unordered
/// pair {i, j}. 2/(n(N-1)) when both entries are nonzero, 1/(n(N-1)) when
/// exactly one is, 0 otherwise.
double pair_selection_probability(const CompositionRatio& x, int i, int j);

/// alpha_ij(x') / alpha_ij(x) when a pair move takes the support size from n
/// to n_next: 2n/(n+1), n/(2(n-1)) or 1.
double accelerated_acceptance_ratio(int n, int n_next);

/// Naive Metropolis-Hastings: independent uniform proposal over the whole space.
StepOutcome naive_mh_step(CompositionRatio& x, const TargetDistribution& target, Rng& rng, StepWorkspace& ws,
                          const KernelOptions& options = {});

/// Gibbs pair move: uniform unordered pair, exact pair conditional, never rejects.
StepOutcome gibbs_pair_step(CompositionRatio& x, const TargetDistribution& target, Rng& rng, StepWorkspace& ws,
                            const KernelOptions& options = {});

/// Accelerated pair move: i uniform on the support, j uniform elsewhere,
/// split from the pair conditional, accepted with min{1, alpha(x')/alpha(x)}.
StepOutcome accelerated_step(CompositionRatio& x, const TargetDistribution& target, Rng& rng, StepWorkspace& ws,
                             const KernelOptions& options = {});

StepOutcome step(SamplerKind kind, CompositionRatio& x, const TargetDistribution& target, Rng& rng,
                 StepWorkspace& ws, const KernelOptions& options = {});

struct ChainConfig {
  std::int64_t iterations = 1;   // T recorded steps
  std::int64_t burn_in = 10000;  // discarded steps before recording
  std::uint64_t seed = 0;
  bool record_trace = false;
  KernelOptions kernel;
};

struct ChainResult {
  std::vector<std::vector<int>> samples;  // empty unless record_trace
  double accepted_rate = 0.0;
  double updated_rate = 0.0;
  std::vector<std::uint64_t> n_histogram;  // indexed by n = 0..min(N, M), sums to T
  CompositionRatio final_state;
  AcceptanceAudit audit;
};

using SampleObserver = std::function<void(const CompositionRatio&)>;

/// Runs burn_in discarded steps and then T recorded ones from x0, drawing
/// randomness from `rng`. Rates and the histogram cover recorded steps only.
/// Errors are rethrown annotated with the 1-based iteration index.
ChainResult run_chain(SamplerKind kind, const TargetDistribution& target, const ChainConfig& config,
                      CompositionRatio x0, Rng& rng, const SampleObserver& observer = {});

/// Same, with the random source seeded from config.seed.
ChainResult run_chain(SamplerKind kind, const TargetDistribution& target, const ChainConfig& config,
                      CompositionRatio x0, const SampleObserver& observer = {});

/// Runs `chains` independent chains. Chain c seeds its generator with
/// chain_seed(config.seed, c), draws x0 with sample_initial from the target's
/// sparsity prior and continues on the same stream. Chains run concurrently;
/// results come back in chain order. `observer_for(c)`, when given, supplies
/// the observer of chain c; it is called on the calling thread before any chain
/// starts.
std::vector<ChainResult> run_chains(SamplerKind kind, const TargetDistribution& target, const ChainConfig& config,
                                    int chains, const std::function<SampleObserver(int)>& observer_for = {});

/// Recorded n-histogram normalized to sum 1. Throws EmptyChain.
std::vector<double> n_marginal(const ChainResult& result);

/// Normalized histogram from raw counts indexed by n. Throws EmptyChain.
std::vector<double> n_marginal(const std::vector<std::uint64_t>& counts);

}  // namespace sparsecomp
