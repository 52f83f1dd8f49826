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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "sparsecomp/cli/commands.hpp"
#include "sparsecomp/composition.hpp"
#include "sparsecomp/error.hpp"
#include "sparsecomp/oracle.hpp"
#include "sparsecomp/prior_spec.hpp"
#include "sparsecomp/recipe/synthetic.hpp"
#include "sparsecomp/samplers.hpp"
#include "sparsecomp/target.hpp"

namespace py = pybind11;
using namespace sparsecomp;

namespace {

TargetDistribution make_target(int bins, int total, const std::string& prior) {
  const auto space = SpaceParams::make(bins, total);
  return TargetDistribution(space, make_sparsity_condition(parse_prior_spec(prior), space));
}

py::dict chain_summary(const ChainResult& r) {
  py::dict d;
  d["accepted_rate"] = r.accepted_rate;
  d["updated_rate"] = r.updated_rate;
  d["n_histogram"] = r.n_histogram;
  d["final_state"] = r.final_state.to_vector();
  d["samples"] = r.samples;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse composition-ratio MCMC samplers";

  static py::exception<Error> error_type(m, "SparsecompError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  m.def(
      "count_states",
      [](int bins, int total, int n) {
        // Exact, so hand Python the decimal string and let it build an int.
        return py::int_(py::str(count_states(SpaceParams::make(bins, total), n).str()));
      },
      py::arg("bins"), py::arg("total"), py::arg("n"));
  m.def(
      "log_count_ratio",
      [](int bins, int total, int n, int n_next) { return log_count_ratio(n, n_next, SpaceParams::make(bins, total)); },
      py::arg("bins"), py::arg("total"), py::arg("n"), py::arg("n_next"));
  m.def(
      "prior_weights",
      [](const std::string& prior, int bins, int total) {
        return prior_weights(parse_prior_spec(prior), SpaceParams::make(bins, total));
      },
      py::arg("prior"), py::arg("bins"), py::arg("total"));
  m.def(
      "sample_uniform_state",
      [](int bins, int total, std::uint64_t seed) {
        Rng rng(seed);
        return sample_uniform_state(SpaceParams::make(bins, total), rng).to_vector();
      },
      py::arg("bins"), py::arg("total"), py::arg("seed") = 0);
  m.def(
      "run_chains",
      [](const std::string& sampler, int bins, int total, const std::string& prior, std::int64_t iterations,
         std::int64_t burn_in, int chains, std::uint64_t seed, bool record_trace) {
        const auto target = make_target(bins, total, prior);
        ChainConfig config;
        config.iterations = iterations;
        config.burn_in = burn_in;
        config.seed = seed;
        config.record_trace = record_trace;
        std::vector<ChainResult> results;
        {
          py::gil_scoped_release release;
          results = run_chains(parse_sampler_kind(sampler), target, config, chains);
        }
        py::list out;
        for (const auto& r : results) out.append(chain_summary(r));
        return out;
      },
      py::arg("sampler"), py::arg("bins"), py::arg("total"), py::arg("prior"), py::arg("iterations") = 50'000,
      py::arg("burn_in") = 10'000, py::arg("chains") = 1, py::arg("seed") = 0, py::arg("record_trace") = false);
  m.def(
      "exact_distribution",
      [](int bins, int total, const std::string& prior) {
        const auto target = make_target(bins, total, prior);
        const auto es = oracle::enumerate_space(target.space());
        const auto dist = oracle::exact_distribution(es, target);
        std::vector<std::vector<int>> states;
        for (std::size_t k = 0; k < es.size(); ++k) states.push_back(es.state(k).to_vector());
        return py::make_tuple(states, dist.probs);
      },
      py::arg("bins"), py::arg("total"), py::arg("prior"));
  m.def(
      "detailed_balance_residual",
      [](const std::string& sampler, int bins, int total, const std::string& prior) {
        const auto target = make_target(bins, total, prior);
        const auto es = oracle::enumerate_space(target.space());
        const auto dist = oracle::exact_distribution(es, target);
        return oracle::detailed_balance_residual(
            oracle::transition_matrix(parse_sampler_kind(sampler), es, target), dist.probs);
      },
      py::arg("sampler"), py::arg("bins"), py::arg("total"), py::arg("prior"));
  m.def("synthetic_recipes_csv", &recipe::synthetic_recipes_csv, py::arg("seed") = 0);
  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "sparsecomp");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
