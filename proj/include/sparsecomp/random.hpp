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

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sparsecomp {

/// The library-wide random source. Any seeded 64-bit engine would do; chains
/// are reproducible bit-for-bit within one build for a given seed.
using Rng = std::mt19937_64;

/// Uniform integer in [0, n). Requires n > 0.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Uniform real in [0, 1).
double uniform01(Rng& rng);

/// Seed of chain `index` when several chains are derived from one base seed.
constexpr std::uint64_t chain_seed(std::uint64_t base, std::uint64_t index) { return base + index; }

/// Draws k distinct values from [0, n) (Floyd's algorithm) and returns them sorted.
std::vector<int> sample_sorted_subset(int n, int k, Rng& rng);

/// Categorical draw proportional to nonnegative `weights`; at least one must be positive.
std::size_t sample_categorical(std::span<const double> weights, Rng& rng);

}  // namespace sparsecomp
