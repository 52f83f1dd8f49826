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

#include <doctest.h>

#include <cmath>
#include <map>

#include "reference.hpp"
#include "sparsecomp/error.hpp"
#include "sparsecomp/oracle.hpp"
#include "sparsecomp/prior_spec.hpp"

using namespace sparsecomp;
using namespace sparsecomp::oracle;

namespace {

constexpr SamplerKind kAllKinds[] = {SamplerKind::NaiveMH, SamplerKind::GibbsPair, SamplerKind::Accelerated};

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("enumeration order and ranking") {
    const auto es = enumerate_space(SpaceParams::make(2, 2));
    REQUIRE(es.size() == 3);
    CHECK(es.state(0).to_vector() == std::vector<int>{0, 2});
    CHECK(es.state(1).to_vector() == std::vector<int>{1, 1});
    CHECK(es.state(2).to_vector() == std::vector<int>{2, 0});

    const auto space = SpaceParams::make(5, 4);
    const auto big = enumerate_space(space);
    const auto expected = ref::compositions(5, 4);
    REQUIRE(big.size() == expected.size());
    for (std::size_t k = 0; k < big.size(); ++k) {
      CHECK(big.state(k).to_vector() == expected[k]);
      CHECK(big.index_of(expected[k]) == k);
    }
    CHECK_THROWS_AS(big.index_of(std::vector<int>{1, 1, 1, 1, 1}), Error);
  }

  TEST_CASE("the table space is enumerable and the paper-scale space is not") {
    const auto es = enumerate_space(SpaceParams::make(50, 5), 4'000'000);
    CHECK(es.size() == 50u + 4900u + 117600u + 921200u + 2118760u);
    try {
      enumerate_space(SpaceParams::make(2000, 100));
      FAIL("expected SpaceTooLarge");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SpaceTooLarge);
    }
  }

  TEST_CASE("exact distribution: N=3, M=2 with a uniform size prior") {
    const auto space = SpaceParams::make(3, 2);
    const TargetDistribution target(space, make_sparsity_condition(parse_prior_spec("uniform{1,2}"), space));
    const auto es = enumerate_space(space);
    const auto d = exact_distribution(es, target);
    for (double p : d.probs) CHECK(p == doctest::Approx(1.0 / 6));
  }

  TEST_CASE("exact marginals reproduce the prior") {
    const auto space = SpaceParams::make(5, 5);
    const auto es = enumerate_space(space);
    for (const char* spec : {"uniform{2,4}", "unimodal{3,0.25}", "{2:1}", "exponential{0.7,1}"}) {
      const auto prior = make_sparsity_condition(parse_prior_spec(spec), space);
      const auto marginal = exact_n_marginal(exact_distribution(es, TargetDistribution(space, prior)), es);
      for (int n = 0; n <= 5; ++n) CHECK(marginal[static_cast<std::size_t>(n)] == doctest::Approx(prior.weight(n)).epsilon(1e-12));
    }
  }

  TEST_CASE("exact distribution matches brute force with a property") {
    const auto space = SpaceParams::make(3, 4);
    const std::map<int, double> prior{{1, 2.0}, {2, 1.0}, {3, 1.0}};
    auto score = [](const std::vector<int>& x) { return 1.0 + x[0] * x[0]; };
    const TargetDistribution target(
        space, SparsityCondition::make(prior, space),
        {PropertyCondition([&](const CompositionRatio& x) { return score(x.to_vector()); })});
    const auto es = enumerate_space(space);
    const auto d = exact_distribution(es, target);
    const auto expected = ref::target_probs(ref::compositions(3, 4), prior, score, 1.0);
    for (std::size_t k = 0; k < es.size(); ++k) CHECK(d.probs[k] == doctest::Approx(expected[k]).epsilon(1e-10));
    // An asymmetric property moves the size marginal away from the prior.
    const auto marginal = exact_n_marginal(d, es);
    CHECK(std::abs(marginal[1] - 0.5) > 1e-3);
  }

  TEST_CASE("all-infinite targets are degenerate") {
    const auto space = SpaceParams::make(3, 2);
    const TargetDistribution target(space, SparsityCondition::make({{1, 1.0}}, space),
                                    {PropertyCondition([](const CompositionRatio&) { return 0.0; }).unclamped()});
    CHECK_THROWS_AS(exact_distribution(enumerate_space(space), target), Error);
  }

  TEST_CASE("every kernel satisfies detailed balance and stationarity") {
    struct Case {
      int bins;
      int total;
      const char* prior;
      bool with_property;
    };
    for (const auto& c : {Case{3, 2, "uniform{1,2}", false}, Case{3, 3, "uniform{1,3}", false},
                          Case{4, 3, "unimodal{2,0.5}", false}, Case{5, 4, "uniform{2,3}", false},
                          Case{4, 5, "bimodal{1,1,1,4,1,2}", true}, Case{6, 3, "exponential{0.5,0.5}", true}}) {
      const auto space = SpaceParams::make(c.bins, c.total);
      std::vector<PropertyCondition> props;
      if (c.with_property) {
        props.emplace_back([](const CompositionRatio& x) { return 0.05 + x[0] * x[0] + 0.5 * x[1]; }, 0.7);
      }
      const TargetDistribution target(space, make_sparsity_condition(parse_prior_spec(c.prior), space), props);
      const auto es = enumerate_space(space);
      const auto d = exact_distribution(es, target);
      for (auto kind : kAllKinds) {
        CAPTURE(c.bins);
        CAPTURE(c.total);
        CAPTURE(c.prior);
        CAPTURE(to_string(kind));
        const auto m = transition_matrix(kind, es, target);
        CHECK(row_sum_residual(m) < 1e-12);
        CHECK(detailed_balance_residual(m, d.probs) < 1e-10);
        CHECK(stationarity_residual(m, d.probs) < 1e-8);
        CHECK(max_abs_difference(stationary_distribution(m, uniform_on_support(d.probs)), d.probs) < 1e-8);
      }
    }
  }

  TEST_CASE("a corrupted acceptance breaks detailed balance") {
    const auto space = SpaceParams::make(3, 3);
    const TargetDistribution target(space, make_sparsity_condition(parse_prior_spec("uniform{1,3}"), space));
    const auto es = enumerate_space(space);
    const auto d = exact_distribution(es, target);
    for (auto kind : {SamplerKind::NaiveMH, SamplerKind::Accelerated}) {
      const auto m = transition_matrix(kind, es, target, {.acceptance_scale = 1.1});
      CHECK(row_sum_residual(m) < 1e-12);
      CHECK(detailed_balance_residual(m, d.probs) > 1e-4);
    }
  }

  TEST_CASE("transition assembly refuses large spaces") {
    const auto space = SpaceParams::make(8, 6);  // 1716 states
    const TargetDistribution target(space, make_sparsity_condition(parse_prior_spec("uniform{1,6}"), space));
    CHECK_THROWS_AS(transition_matrix(SamplerKind::GibbsPair, enumerate_space(space), target), Error);
  }

  TEST_CASE("total variation") {
    const std::vector<double> p{0.2, 0.3, 0.5};
    CHECK(total_variation(p, p) == 0.0);
    CHECK(total_variation(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == doctest::Approx(1.0));
    CHECK(total_variation(std::vector<double>{2, 2}, std::vector<double>{1, 1}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(total_variation(p, std::vector<double>{1, 0}), Error);
  }

  TEST_CASE("chains converge to the exact distribution") {
    const auto space = SpaceParams::make(4, 4);
    const TargetDistribution target(space, make_sparsity_condition(parse_prior_spec("unimodal{2,0.5}"), space));
    const auto es = enumerate_space(space);
    const auto d = exact_distribution(es, target);
    for (auto kind : kAllKinds) {
      ChainConfig c;
      c.iterations = 200000;
      c.burn_in = 1000;
      c.seed = 77;
      c.kernel.verify = false;
      CAPTURE(to_string(kind));
      CHECK(total_variation(chain_state_frequencies(es, kind, target, c), d.probs) < 0.02);
    }
  }
}
