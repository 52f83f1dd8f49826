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

#include "sparsecomp/cli/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "sparsecomp/error.hpp"
#include "sparsecomp/recipe/dataset.hpp"

namespace sparsecomp::cli {

namespace {

using recipe::split_csv_record;

double parse_double(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::MalformedRow, "not a number: '" + text + "'");
  }
  return v;
}

template <typename Int>
Int parse_integer(const std::string& text) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::MalformedRow, "not an integer: '" + text + "'");
  }
  return v;
}

// Reads the header and the data records of a CSV stream.
std::vector<std::vector<std::string>> read_csv(std::istream& in, std::vector<std::string>& header) {
  std::vector<std::vector<std::string>> records;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_record(line);
    if (first) {
      header = std::move(fields);
      first = false;
      continue;
    }
    if (fields.size() != header.size()) throw Error(ErrorCode::MalformedRow, "CSV record has the wrong field count");
    records.push_back(std::move(fields));
  }
  if (first) throw Error(ErrorCode::MalformedRow, "CSV stream is empty");
  return records;
}

void expect_header(const std::vector<std::string>& header, std::span<const char* const> expected) {
  bool ok = header.size() >= expected.size();
  for (std::size_t k = 0; ok && k < expected.size(); ++k) ok = header[k] == expected[k];
  if (!ok) throw Error(ErrorCode::MalformedRow, "unexpected CSV header");
}

std::pair<double, double> mean_and_stdev(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace

std::vector<StatsRow> summarize_rates(std::string_view sampler, std::span<const ChainResult> chains) {
  if (chains.empty()) throw Error(ErrorCode::EmptyChain, "no chains to summarize");
  std::vector<StatsRow> rows;
  std::vector<double> accepted;
  std::vector<double> updated;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    rows.push_back({std::string(sampler), std::to_string(c), chains[c].accepted_rate, chains[c].updated_rate});
    accepted.push_back(chains[c].accepted_rate);
    updated.push_back(chains[c].updated_rate);
  }
  const auto [am, as] = mean_and_stdev(accepted);
  const auto [um, us] = mean_and_stdev(updated);
  rows.push_back({std::string(sampler), "mean", am, um});
  rows.push_back({std::string(sampler), "stdev", as, us});
  return rows;
}

void write_stats_csv(std::ostream& out, std::span<const StatsRow> rows) {
  out << "sampler,row,accepted_rate,updated_rate\n";
  for (const auto& r : rows) out << fmt::format("{},{},{},{}\n", r.sampler, r.row, r.accepted_rate, r.updated_rate);
}

std::vector<StatsRow> read_stats_csv(std::istream& in) {
  std::vector<std::string> header;
  const auto records = read_csv(in, header);
  static constexpr const char* kHeader[] = {"sampler", "row", "accepted_rate", "updated_rate"};
  expect_header(header, kHeader);
  std::vector<StatsRow> rows;
  for (const auto& f : records) rows.push_back({f[0], f[1], parse_double(f[2]), parse_double(f[3])});
  return rows;
}

NHistogramTable make_n_histogram_table(const SparsityCondition& prior, std::span<const ChainResult> chains) {
  if (chains.empty()) throw Error(ErrorCode::EmptyChain, "no chains to tabulate");
  NHistogramTable table;
  const int max_n = prior.max_support();
  std::vector<std::vector<double>> marginals;
  for (const auto& chain : chains) marginals.push_back(n_marginal(chain));
  table.chains.assign(chains.size(), {});
  for (int n = 1; n <= max_n; ++n) {
    const auto idx = static_cast<std::size_t>(n);
    table.n.push_back(n);
    table.target.push_back(prior.weight(n));
    std::vector<double> column;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      column.push_back(marginals[c][idx]);
      table.chains[c].push_back(marginals[c][idx]);
    }
    const auto [m, s] = mean_and_stdev(column);
    table.mean.push_back(m);
    table.stdev.push_back(s);
  }
  return table;
}

void write_n_histogram_csv(std::ostream& out, const NHistogramTable& table) {
  out << "n,target,mean,stdev";
  for (std::size_t c = 0; c < table.chains.size(); ++c) out << ",chain_" << c;
  out << '\n';
  for (std::size_t r = 0; r < table.n.size(); ++r) {
    out << fmt::format("{},{},{},{}", table.n[r], table.target[r], table.mean[r], table.stdev[r]);
    for (const auto& chain : table.chains) out << fmt::format(",{}", chain[r]);
    out << '\n';
  }
}

NHistogramTable read_n_histogram_csv(std::istream& in) {
  std::vector<std::string> header;
  const auto records = read_csv(in, header);
  static constexpr const char* kHeader[] = {"n", "target", "mean", "stdev"};
  expect_header(header, kHeader);
  NHistogramTable table;
  table.chains.assign(header.size() - 4, {});
  for (const auto& f : records) {
    table.n.push_back(parse_integer<int>(f[0]));
    table.target.push_back(parse_double(f[1]));
    table.mean.push_back(parse_double(f[2]));
    table.stdev.push_back(parse_double(f[3]));
    for (std::size_t c = 0; c < table.chains.size(); ++c) table.chains[c].push_back(parse_double(f[4 + c]));
  }
  return table;
}

std::string trace_line(int chain, std::int64_t t, const CompositionRatio& x) {
  std::string line = fmt::format("{{\"chain\":{},\"t\":{},\"nonzero\":[", chain, t);
  bool first = true;
  for (int k = 0; k < x.size(); ++k) {
    if (x[k] == 0) continue;
    line += fmt::format("{}[{},{}]", first ? "" : ",", k, x[k]);
    first = false;
  }
  line += "]}";
  return line;
}

std::vector<TraceRecord> read_trace_jsonl(std::istream& in) {
  std::vector<TraceRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TraceRecord r;
      r.chain = j.at("chain").get<int>();
      r.t = j.at("t").get<std::int64_t>();
      for (const auto& pair : j.at("nonzero")) r.nonzero.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedRow, std::string("bad trace line: ") + e.what());
    }
  }
  return records;
}

void write_score_histogram_csv(std::ostream& out, const recipe::ScoreHistogram& mcmc,
                               const recipe::ScoreHistogram& baseline) {
  if (mcmc.counts.size() != baseline.counts.size()) {
    throw Error(ErrorCode::SupportMismatch, "score histograms use different bins");
  }
  out << "bin_lo,bin_hi,mcmc,baseline\n";
  for (std::size_t b = 0; b < mcmc.counts.size(); ++b) {
    out << fmt::format("{},{},{},{}\n", mcmc.edges[b], mcmc.edges[b + 1], mcmc.counts[b], baseline.counts[b]);
  }
}

std::vector<ScoreHistogramRow> read_score_histogram_csv(std::istream& in) {
  std::vector<std::string> header;
  const auto records = read_csv(in, header);
  static constexpr const char* kHeader[] = {"bin_lo", "bin_hi", "mcmc", "baseline"};
  expect_header(header, kHeader);
  std::vector<ScoreHistogramRow> rows;
  for (const auto& f : records) {
    rows.push_back({parse_double(f[0]), parse_double(f[1]), parse_integer<std::uint64_t>(f[2]),
                    parse_integer<std::uint64_t>(f[3])});
  }
  return rows;
}

std::string recipe_json_line(const recipe::GeneratedRecipe& r, std::size_t rank, const recipe::RecipeDataset& dataset) {
  nlohmann::ordered_json j;
  j["rank"] = rank;
  auto ingredients = nlohmann::ordered_json::array();
  for (int k = 0; k < r.composition.size(); ++k) {
    if (r.composition[k] > 0) ingredients.push_back({dataset.ingredients()[static_cast<std::size_t>(k)], r.composition[k]});
  }
  j["ingredients"] = std::move(ingredients);
  j["taste_score"] = r.taste_score;
  j["timing_score"] = r.timing_score;
  j["joint_score"] = r.joint_score;
  j["visits"] = r.visits;
  auto nearest = nlohmann::ordered_json::array();
  for (const auto& nb : r.nearest) nearest.push_back({dataset[nb.index].name, nb.overlap});
  j["nearest"] = std::move(nearest);
  return j.dump();
}

std::vector<RecipeRecord> read_recipes_jsonl(std::istream& in) {
  std::vector<RecipeRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      RecipeRecord r;
      r.rank = j.at("rank").get<std::size_t>();
      for (const auto& p : j.at("ingredients")) r.ingredients.emplace_back(p.at(0).get<std::string>(), p.at(1).get<int>());
      r.taste_score = j.at("taste_score").get<double>();
      r.timing_score = j.at("timing_score").get<double>();
      r.joint_score = j.at("joint_score").get<double>();
      r.visits = j.at("visits").get<std::uint64_t>();
      for (const auto& p : j.at("nearest")) r.nearest.emplace_back(p.at(0).get<std::string>(), p.at(1).get<double>());
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedRow, std::string("bad recipe line: ") + e.what());
    }
  }
  return records;
}

void write_top_report(std::ostream& out, std::span<const recipe::GeneratedRecipe> recipes,
                      const recipe::RecipeDataset& dataset, std::size_t count) {
  const auto shown = std::min(count, recipes.size());
  for (std::size_t r = 0; r < shown; ++r) {
    const auto& g = recipes[r];
    out << fmt::format("#{:<3} joint {:.4f}  (taste {:.4f}, timing {:.4f}, visited {} times)\n", r + 1,
                       g.joint_score, g.taste_score, g.timing_score, g.visits);
    for (int k = 0; k < g.composition.size(); ++k) {
      if (g.composition[k] == 0) continue;
      out << fmt::format("       {:>5.1f}%  {}\n", g.composition[k] / 10.0,
                         dataset.ingredients()[static_cast<std::size_t>(k)]);
    }
    for (const auto& nb : g.nearest) {
      const auto& d = dataset[nb.index];
      out << fmt::format("       ~ {:.3f}  {} [{} / {}]\n", nb.overlap, d.name, d.taste, d.timing);
    }
    out << '\n';
  }
}

}  // namespace sparsecomp::cli
