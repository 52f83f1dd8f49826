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

#include "sparsecomp/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "sparsecomp/cli/artifacts.hpp"
#include "sparsecomp/error.hpp"
#include "sparsecomp/oracle.hpp"
#include "sparsecomp/prior_spec.hpp"
#include "sparsecomp/recipe/demo.hpp"
#include "sparsecomp/recipe/synthetic.hpp"

namespace sparsecomp::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kCheckFailed = 1;
constexpr int kUsageError = 2;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

std::vector<SamplerKind> parse_samplers(const std::vector<std::string>& names) {
  std::vector<SamplerKind> kinds;
  for (const auto& name : names) {
    const auto kind = parse_sampler_kind(name);
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) kinds.push_back(kind);
  }
  return kinds;
}

struct CoreOptions {
  int bins = 10;
  int total = 5;
  std::vector<std::string> priors;
  std::vector<std::string> samplers{"naive", "gibbs", "accelerated"};
  std::int64_t iters = 50'000;
  std::int64_t burn_in = 10'000;
  int chains = 10;
  std::uint64_t seed = 0;
  std::string out;
  bool trace = false;
  bool verify = false;
};

void add_core_options(CLI::App* cmd, CoreOptions& o) {
  cmd->add_option("--bins", o.bins, "Number of entries N")->capture_default_str();
  cmd->add_option("--total", o.total, "Sum M of every state")->capture_default_str();
  cmd->add_option("--sampler", o.samplers, "naive, gibbs or accelerated (repeatable or comma-separated)")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--iters", o.iters, "Recorded iterations T per chain")->capture_default_str();
  cmd->add_option("--burn-in", o.burn_in, "Discarded iterations before recording")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Base seed; chain c uses seed + c")->capture_default_str();
  cmd->add_flag("--verify", o.verify, "Check state invariants and acceptance algebra on every step");
}

ChainConfig chain_config(const CoreOptions& o) {
  ChainConfig config;
  config.iterations = o.iters;
  config.burn_in = o.burn_in;
  config.seed = o.seed;
  config.kernel.verify = o.verify;
  return config;
}

// ---------------------------------------------------------------- sample

int cmd_sample(const CoreOptions& o, std::ostream& out) {
  const auto space = SpaceParams::make(o.bins, o.total);
  const auto kinds = parse_samplers(o.samplers);
  if (o.chains < 1) throw Error(ErrorCode::InvalidArgument, "--chains must be at least 1");
  if (o.trace && o.out.empty()) throw Error(ErrorCode::InvalidArgument, "--trace needs --out");

  std::vector<PriorSpec> specs;
  for (const auto& text : o.priors) specs.push_back(parse_prior_spec(text));
  // Validate every prior before running anything.
  std::vector<SparsityCondition> priors;
  for (const auto& spec : specs) priors.push_back(make_sparsity_condition(spec, space));

  const auto config = chain_config(o);
  out << fmt::format("{:<28} {:<12} {:>20} {:>20}\n", "prior", "sampler", "accepted % (sd)", "updated % (sd)");
  for (std::size_t p = 0; p < specs.size(); ++p) {
    std::optional<fs::path> dir;
    if (!o.out.empty()) {
      dir = specs.size() > 1 ? fs::path(o.out) / fmt::format("prior_{}", p) : fs::path(o.out);
      make_dir(*dir);
      open_output(*dir / "prior.txt") << specs[p].to_string() << '\n';
    }
    const TargetDistribution target(space, priors[p]);
    std::vector<StatsRow> stats;
    for (const auto kind : kinds) {
      const std::string name(to_string(kind));
      std::vector<std::unique_ptr<std::ofstream>> traces;
      std::function<SampleObserver(int)> observer_for;
      if (o.trace) {
        for (int c = 0; c < o.chains; ++c) {
          traces.push_back(std::make_unique<std::ofstream>(open_output(*dir / fmt::format("trace_{}_chain{}.jsonl", name, c))));
        }
        observer_for = [&traces](int c) -> SampleObserver {
          return [stream = traces[static_cast<std::size_t>(c)].get(), c, t = std::int64_t{0}](
                     const CompositionRatio& x) mutable { *stream << trace_line(c, ++t, x) << '\n'; };
        };
      }
      const auto results = run_chains(kind, target, config, o.chains, observer_for);
      const auto rows = summarize_rates(name, results);
      stats.insert(stats.end(), rows.begin(), rows.end());
      const auto& mean = rows[rows.size() - 2];
      const auto& sd = rows.back();
      out << fmt::format("{:<28} {:<12} {:>11.2f} ({:>6.2f}) {:>11.2f} ({:>6.2f})\n", specs[p].to_string(), name,
                         100 * mean.accepted_rate, 100 * sd.accepted_rate, 100 * mean.updated_rate,
                         100 * sd.updated_rate);
      if (dir) {
        auto hist = open_output(*dir / fmt::format("hist_{}.csv", name));
        write_n_histogram_csv(hist, make_n_histogram_table(priors[p], results));
      }
    }
    if (dir) {
      auto stats_out = open_output(*dir / "stats.csv");
      write_stats_csv(stats_out, stats);
    }
  }
  return 0;
}

// ---------------------------------------------------------- oracle-check

struct OracleOptions {
  CoreOptions core;
  std::string prior;
  double corrupt_acceptance = 1.0;
  double balance_tolerance = 1e-10;
  double stationary_tolerance = 1e-8;
  double tv_tolerance = 0.02;
};

int cmd_oracle_check(const OracleOptions& o, std::ostream& out) {
  const auto space = SpaceParams::make(o.core.bins, o.core.total);
  const auto spec = parse_prior_spec(o.prior.empty() ? fmt::format("uniform{{1,{}}}", space.max_support()) : o.prior);
  const TargetDistribution target(space, make_sparsity_condition(spec, space));
  const auto es = oracle::enumerate_space(space);
  const auto exact = oracle::exact_distribution(es, target);
  const auto start = oracle::uniform_on_support(exact.probs);

  struct Check {
    std::string name;
    std::string sampler;
    double value;
    double tolerance;
    bool pass() const { return value <= tolerance; }
  };
  std::vector<Check> checks;
  auto config = chain_config(o.core);
  config.kernel.acceptance_scale = o.corrupt_acceptance;
  for (const auto kind : parse_samplers(o.core.samplers)) {
    const std::string name(to_string(kind));
    const auto matrix = oracle::transition_matrix(kind, es, target, {.acceptance_scale = o.corrupt_acceptance});
    checks.push_back({"row-sums", name, oracle::row_sum_residual(matrix), 1e-12});
    checks.push_back({"detailed-balance", name, oracle::detailed_balance_residual(matrix, exact.probs),
                      o.balance_tolerance});
    const auto stationary = oracle::stationary_distribution(matrix, start);
    checks.push_back({"stationary-vector", name, oracle::max_abs_difference(stationary, exact.probs),
                      o.stationary_tolerance});
    const auto empirical = oracle::chain_state_frequencies(es, kind, target, config);
    checks.push_back({"chain-tv", name, oracle::total_variation(empirical, exact.probs), o.tv_tolerance});
  }

  out << fmt::format("space N={} M={} ({} states), prior {}\n", space.bins(), space.total(), es.size(),
                     spec.to_string());
  bool all = true;
  for (const auto& c : checks) {
    out << fmt::format("{}  {:<18} {:<12} value={:.3e} tol={:.1e}\n", c.pass() ? "PASS" : "FAIL", c.name, c.sampler,
                       c.value, c.tolerance);
    all = all && c.pass();
  }
  if (!o.core.out.empty()) {
    make_dir(o.core.out);
    auto report = open_output(fs::path(o.core.out) / "oracle_report.csv");
    report << "check,sampler,value,tolerance,pass\n";
    for (const auto& c : checks) {
      report << fmt::format("{},{},{},{},{}\n", c.name, c.sampler, c.value, c.tolerance, c.pass() ? 1 : 0);
    }
  }
  return all ? 0 : kCheckFailed;
}

// ------------------------------------------------------------------ demo

struct DemoOptions {
  std::string data;
  std::string units;
  std::string models;
  bool synthetic = false;
  std::string taste = "Fresh";
  std::string timing = "All day";
  double taste_priority = 1.0;
  double timing_priority = 1.0;
  int trees = 100;
  int depth = 8;
  int min_leaf = 1;
  std::int64_t iters = 100'000;
  std::int64_t burn_in = 10'000;
  std::uint64_t seed = 0;
  int histogram_bins = 20;
  std::size_t neighbours = 3;
  std::size_t top = 10;
  std::string out;
};

recipe::RecipeDataset demo_dataset(const DemoOptions& o) {
  const auto units = o.units.empty() ? recipe::UnitTable::defaults() : recipe::UnitTable::load(o.units);
  if (o.synthetic == !o.data.empty()) throw Error(ErrorCode::InvalidArgument, "pass exactly one of --data and --synthetic");
  return o.synthetic ? recipe::synthetic_dataset(o.seed, units) : recipe::load_recipes(o.data, units);
}

int cmd_demo(const DemoOptions& o, std::ostream& out) {
  const auto dataset = demo_dataset(o);
  const fs::path dir(o.out);
  make_dir(dir);

  recipe::DemoModels models;
  if (!o.models.empty()) {
    models.taste = std::make_shared<const recipe::ForestModel>(recipe::ForestModel::load(fs::path(o.models) / "taste_model.json"));
    models.timing = std::make_shared<const recipe::ForestModel>(recipe::ForestModel::load(fs::path(o.models) / "timing_model.json"));
  } else {
    recipe::ForestParams params;
    params.trees = o.trees;
    params.max_depth = o.depth;
    params.min_leaf = o.min_leaf;
    params.seed = o.seed;
    models = recipe::train_demo_models(dataset, params);
  }
  models.taste->save(dir / "taste_model.json");
  models.timing->save(dir / "timing_model.json");
  {
    auto data_out = open_output(dir / "dataset.csv");
    recipe::write_recipes(data_out, dataset);
  }

  recipe::DemoConfig config;
  config.taste_label = o.taste;
  config.timing_label = o.timing;
  config.taste_priority = o.taste_priority;
  config.timing_priority = o.timing_priority;
  config.chain.iterations = o.iters;
  config.chain.burn_in = o.burn_in;
  config.chain.seed = o.seed;
  config.histogram_bins = o.histogram_bins;
  config.neighbours = o.neighbours;
  const auto result = recipe::run_demo(dataset, models, config);

  {
    auto recipes_out = open_output(dir / "recipes.jsonl");
    for (std::size_t r = 0; r < result.recipes.size(); ++r) {
      recipes_out << recipe_json_line(result.recipes[r], r + 1, dataset) << '\n';
    }
  }
  {
    auto hist_out = open_output(dir / "joint_score_hist.csv");
    write_score_histogram_csv(hist_out, result.mcmc, result.baseline);
  }
  {
    auto report = open_output(dir / "top_recipes.txt");
    write_top_report(report, result.recipes, dataset, o.top);
  }

  const double taste_acc = recipe::training_accuracy(*models.taste, dataset, recipe::LabelKind::Taste);
  const double timing_acc = recipe::training_accuracy(*models.timing, dataset, recipe::LabelKind::Timing);
  nlohmann::ordered_json summary;
  summary["recipes_in_dataset"] = dataset.size();
  summary["ingredients"] = dataset.ingredients().size();
  summary["taste_label"] = o.taste;
  summary["timing_label"] = o.timing;
  summary["taste_priority"] = o.taste_priority;
  summary["timing_priority"] = o.timing_priority;
  summary["seed"] = o.seed;
  summary["iterations"] = o.iters;
  summary["burn_in"] = o.burn_in;
  summary["taste_training_accuracy"] = taste_acc;
  summary["timing_training_accuracy"] = timing_acc;
  summary["accepted_rate"] = result.accepted_rate;
  summary["updated_rate"] = result.updated_rate;
  summary["distinct_recipes"] = result.recipes.size();
  summary["mcmc_mean_joint_score"] = result.mcmc.mean;
  summary["baseline_mean_joint_score"] = result.baseline.mean;
  summary["tail_threshold"] = result.tail_threshold;
  summary["mcmc_tail_mass"] = result.mcmc_tail_mass;
  summary["baseline_tail_mass"] = result.baseline_tail_mass;
  open_output(dir / "summary.json") << summary.dump(2) << '\n';

  out << fmt::format("dataset: {} recipes over {} ingredients; training accuracy taste {:.3f}, timing {:.3f}\n",
                     dataset.size(), dataset.ingredients().size(), taste_acc, timing_acc);
  out << fmt::format("chain: accepted {:.2f}%, updated {:.2f}%, {} distinct recipes\n", 100 * result.accepted_rate,
                     100 * result.updated_rate, result.recipes.size());
  out << fmt::format("mean joint score: mcmc {:.4f} vs baseline {:.4f}\n", result.mcmc.mean, result.baseline.mean);
  out << fmt::format("mass at or above the baseline 90th percentile ({:.4f}): mcmc {:.4f} vs baseline {:.4f}\n",
                     result.tail_threshold, result.mcmc_tail_mass, result.baseline_tail_mass);
  out << "\n";
  write_top_report(out, result.recipes, dataset, std::min<std::size_t>(o.top, 3));
  return 0;
}

// ------------------------------------------------------------ synth-data

int cmd_synth_data(std::uint64_t seed, const std::string& out_dir, std::ostream& out) {
  const fs::path dir(out_dir);
  make_dir(dir);
  const auto csv = recipe::synthetic_recipes_csv(seed);
  open_output(dir / "recipes.csv") << csv;
  {
    auto units = open_output(dir / "units.txt");
    units << "# unit=milliliters\n";
    const auto defaults = recipe::UnitTable::defaults();
    for (const auto& [name, ml] : defaults.factors()) units << fmt::format("{}={}\n", name, ml);
  }
  std::istringstream in(csv);
  const auto dataset = recipe::parse_recipes(in, recipe::UnitTable::defaults());
  out << fmt::format("wrote {} recipes over {} ingredients to {}\n", dataset.size(), dataset.ingredients().size(),
                     (dir / "recipes.csv").string());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sampling of sparse composition ratios with prior and property conditions", "sparsecomp"};
  app.require_subcommand(1);

  CoreOptions sample_opts;
  auto* sample = app.add_subcommand("sample", "Run chains and write rate and support-size statistics");
  add_core_options(sample, sample_opts);
  sample->add_option("--prior", sample_opts.priors, "Sparsity prior; repeat for several targets")->required();
  sample->add_option("--chains", sample_opts.chains, "Independent chains")->capture_default_str();
  sample->add_option("--out", sample_opts.out, "Output directory");
  sample->add_flag("--trace", sample_opts.trace, "Write every recorded state as JSON lines");

  OracleOptions oracle_opts;
  oracle_opts.core.bins = 3;
  oracle_opts.core.total = 3;
  oracle_opts.core.iters = 200'000;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare kernels with exact enumeration on a small space");
  add_core_options(oracle_cmd, oracle_opts.core);
  oracle_cmd->add_option("--prior", oracle_opts.prior, "Sparsity prior (default: uniform on 1..min(N, M))");
  oracle_cmd->add_option("--out", oracle_opts.core.out, "Directory for oracle_report.csv");
  oracle_cmd->add_option("--balance-tol", oracle_opts.balance_tolerance)->capture_default_str();
  oracle_cmd->add_option("--stationary-tol", oracle_opts.stationary_tolerance)->capture_default_str();
  oracle_cmd->add_option("--tv-tol", oracle_opts.tv_tolerance)->capture_default_str();
  oracle_cmd->add_option("--corrupt-acceptance", oracle_opts.corrupt_acceptance,
                         "Test hook: multiply every acceptance ratio by this factor")
      ->capture_default_str();

  DemoOptions demo_opts;
  auto* demo = app.add_subcommand("demo", "Generate recipes conditioned on taste and timing labels");
  demo->add_option("--data", demo_opts.data, "Recipe CSV (name,taste,timing,ingredient,amount,unit)");
  demo->add_option("--units", demo_opts.units, "Unit table overrides (name=milliliters per line)");
  demo->add_flag("--synthetic", demo_opts.synthetic, "Use the bundled synthetic dataset generated from --seed");
  demo->add_option("--models", demo_opts.models, "Load taste_model.json and timing_model.json from this directory");
  demo->add_option("--taste", demo_opts.taste)->capture_default_str();
  demo->add_option("--timing", demo_opts.timing)->capture_default_str();
  demo->add_option("--taste-priority", demo_opts.taste_priority)->capture_default_str();
  demo->add_option("--timing-priority", demo_opts.timing_priority)->capture_default_str();
  demo->add_option("--trees", demo_opts.trees)->capture_default_str();
  demo->add_option("--depth", demo_opts.depth)->capture_default_str();
  demo->add_option("--min-leaf", demo_opts.min_leaf)->capture_default_str();
  demo->add_option("--iters", demo_opts.iters, "Recorded iterations")->capture_default_str();
  demo->add_option("--burn-in", demo_opts.burn_in)->capture_default_str();
  demo->add_option("--seed", demo_opts.seed)->capture_default_str();
  demo->add_option("--hist-bins", demo_opts.histogram_bins)->capture_default_str();
  demo->add_option("--neighbours", demo_opts.neighbours)->capture_default_str();
  demo->add_option("--top", demo_opts.top)->capture_default_str();
  demo->add_option("--out", demo_opts.out, "Output directory")->required();

  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth-data", "Write the synthetic recipe dataset and default unit table");
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--out", synth_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (sample->parsed()) return cmd_sample(sample_opts, out);
    if (oracle_cmd->parsed()) return cmd_oracle_check(oracle_opts, out);
    if (demo->parsed()) return cmd_demo(demo_opts, out);
    if (synth->parsed()) return cmd_synth_data(synth_seed, synth_out, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace sparsecomp::cli
