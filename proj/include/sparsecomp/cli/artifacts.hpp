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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsecomp/recipe/demo.hpp"
#include "sparsecomp/samplers.hpp"
#include "sparsecomp/target.hpp"

// Writers and matching readers for everything the command-line tool emits.
// Floating-point values are written in shortest round-trip form, so reading an
// artifact back yields exactly the numbers that were written.
namespace sparsecomp::cli {

/// One row of stats.csv: `row` is a chain index, "mean" or "stdev".
struct StatsRow {
  std::string sampler;
  std::string row;
  double accepted_rate = 0.0;
  double updated_rate = 0.0;

  friend bool operator==(const StatsRow&, const StatsRow&) = default;
};

/// Per-chain rows followed by mean and sample standard deviation rows.
std::vector<StatsRow> summarize_rates(std::string_view sampler, std::span<const ChainResult> chains);
void write_stats_csv(std::ostream& out, std::span<const StatsRow> rows);
std::vector<StatsRow> read_stats_csv(std::istream& in);

/// Support-size histogram of several chains next to the prior it targets.
struct NHistogramTable {
  std::vector<int> n;
  std::vector<double> target;                // normalized prior weight of n
  std::vector<double> mean;                  // mean over chains of the empirical frequency
  std::vector<double> stdev;                 // sample standard deviation over chains
  std::vector<std::vector<double>> chains;   // chains[c][row]

  friend bool operator==(const NHistogramTable&, const NHistogramTable&) = default;
};

NHistogramTable make_n_histogram_table(const SparsityCondition& prior, std::span<const ChainResult> chains);
void write_n_histogram_csv(std::ostream& out, const NHistogramTable& table);
NHistogramTable read_n_histogram_csv(std::istream& in);

/// Trace lines are sparse: {"chain":c,"t":t,"nonzero":[[index,value],...]}.
struct TraceRecord {
  int chain = 0;
  std::int64_t t = 0;
  std::vector<std::pair<int, int>> nonzero;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

std::string trace_line(int chain, std::int64_t t, const CompositionRatio& x);
std::vector<TraceRecord> read_trace_jsonl(std::istream& in);

struct ScoreHistogramRow {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t mcmc = 0;
  std::uint64_t baseline = 0;

  friend bool operator==(const ScoreHistogramRow&, const ScoreHistogramRow&) = default;
};

void write_score_histogram_csv(std::ostream& out, const recipe::ScoreHistogram& mcmc,
                               const recipe::ScoreHistogram& baseline);
std::vector<ScoreHistogramRow> read_score_histogram_csv(std::istream& in);

struct RecipeRecord {
  std::size_t rank = 0;
  std::vector<std::pair<std::string, int>> ingredients;  // nonzero entries, vocabulary order
  double taste_score = 0.0;
  double timing_score = 0.0;
  double joint_score = 0.0;
  std::uint64_t visits = 0;
  std::vector<std::pair<std::string, double>> nearest;  // dataset recipe name, overlap

  friend bool operator==(const RecipeRecord&, const RecipeRecord&) = default;
};

std::string recipe_json_line(const recipe::GeneratedRecipe& r, std::size_t rank, const recipe::RecipeDataset& dataset);
std::vector<RecipeRecord> read_recipes_jsonl(std::istream& in);

/// Fixed-width report of the best recipes with their nearest dataset recipes.
void write_top_report(std::ostream& out, std::span<const recipe::GeneratedRecipe> recipes,
                      const recipe::RecipeDataset& dataset, std::size_t count);

}  // namespace sparsecomp::cli
