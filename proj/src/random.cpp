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

#include "sparsecomp/random.hpp"

#include <algorithm>

#include "sparsecomp/error.hpp"

namespace sparsecomp {

std::size_t uniform_index(Rng& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(rng);
}

double uniform01(Rng& rng) { return std::generate_canonical<double, 53>(rng); }

std::vector<int> sample_sorted_subset(int n, int k, Rng& rng) {
  if (k < 0 || k > n) throw Error(ErrorCode::OutOfRange, "subset size outside [0, n]");
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  for (int upper = n - k; upper < n; ++upper) {
    const int candidate = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(upper) + 1));
    auto pos = std::lower_bound(chosen.begin(), chosen.end(), candidate);
    if (pos != chosen.end() && *pos == candidate) {
      pos = std::lower_bound(chosen.begin(), chosen.end(), upper);
      chosen.insert(pos, upper);
    } else {
      chosen.insert(pos, candidate);
    }
  }
  return chosen;
}

std::size_t sample_categorical(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw Error(ErrorCode::AllZeroWeights, "categorical weights sum to zero");
  const double target = uniform01(rng) * total;
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    running += weights[k];
    last_positive = k;
    if (target < running) return k;
  }
  // Rounding can leave target == total; fall back to the last positive weight.
  return last_positive;
}

}  // namespace sparsecomp
