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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sparsecomp/composition.hpp"
#include "sparsecomp/target.hpp"

namespace sparsecomp {

/// Textual sparsity prior, as accepted on the command line:
///
///   {2:13,3:29,4:24,5:3}          explicit (unnormalized) table
///   uniform{lo,hi}                 equal weight on lo..hi
///   unimodal{center,scale}         exp(-scale (n - center)^2)
///   bimodal{c1,s1,w1,c2,s2,w2}     w1 exp(-s1 (n - c1)^2) + w2 exp(-s2 (n - c2)^2)
///   exponential{rate,coef}         coef exp(-rate n)
///
/// Families are evaluated on every feasible n in [1, min(N, M)].
struct PriorSpec {
  enum class Family { Table, Uniform, Unimodal, Bimodal, Exponential };

  Family family = Family::Table;
  std::vector<double> params;
  std::map<int, double> table;

  std::string to_string() const;
};

PriorSpec parse_prior_spec(std::string_view text);

/// Unnormalized weights of the spec over the feasible support sizes of `space`.
std::map<int, double> prior_weights(const PriorSpec& spec, const SpaceParams& space);

SparsityCondition make_sparsity_condition(const PriorSpec& spec, const SpaceParams& space,
                                          double priority = 1.0);

}  // namespace sparsecomp
