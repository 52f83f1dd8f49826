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
#include <set>

#include "reference.hpp"
#include "sparsecomp/composition.hpp"
#include "sparsecomp/error.hpp"

using namespace sparsecomp;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("composition") {
  TEST_CASE("space parameters reject degenerate shapes") {
    CHECK(code_of([] { SpaceParams::make(1, 5); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { SpaceParams::make(3, 0); }) == ErrorCode::InvalidArgument);
    CHECK(SpaceParams::make(2000, 100).max_support() == 100);
    CHECK(SpaceParams::make(10, 50).max_support() == 10);
  }

  TEST_CASE("l0 norm") {
    const auto space = SpaceParams::make(10, 100);
    CHECK(l0_norm(validate(std::vector<int>{90, 10, 0, 0, 0, 0, 0, 0, 0, 0}, space)) == 2);
    CHECK(l0_norm(validate(std::vector<int>{0, 0, 0, 100, 0, 0, 0, 0, 0, 0}, space)) == 1);
    CHECK(l0_norm(validate(std::vector<int>{1, 1, 1, 1, 1}, SpaceParams::make(5, 5))) == 5);
  }

  TEST_CASE("validate") {
    const auto space = SpaceParams::make(2, 5);
    CHECK(validate(std::vector<int>{2, 3}, space).total() == 5);
    CHECK(code_of([&] { validate(std::vector<int>{2, 2}, space); }) == ErrorCode::SumMismatch);
    CHECK(code_of([&] { validate(std::vector<int>{-1, 6}, space); }) == ErrorCode::NegativeEntry);
    CHECK(code_of([&] { validate(std::vector<int>{1, 1, 3}, space); }) == ErrorCode::WrongLength);
  }

  TEST_CASE("counts reproduce the N=50, M=5 table") {
    const auto space = SpaceParams::make(50, 5);
    CHECK(count_states(space, 1) == 50);
    CHECK(count_states(space, 2) == 4900);
    CHECK(count_states(space, 3) == 117600);
    CHECK(count_states(space, 4) == 921200);
    CHECK(count_states(space, 5) == 2118760);
    CHECK(count_all_states(space) == BigCount(50 + 4900 + 117600 + 921200 + 2118760));
    CHECK(code_of([&] { count_states(space, 6); }) == ErrorCode::OutOfRange);
    CHECK(code_of([&] { count_states(space, 0); }) == ErrorCode::OutOfRange);
  }

  TEST_CASE("counts agree with brute-force enumeration") {
    for (int bins = 2; bins <= 5; ++bins) {
      for (int total = 1; total <= 5; ++total) {
        const auto space = SpaceParams::make(bins, total);
        std::map<int, std::uint64_t> by_size;
        const auto states = ref::compositions(bins, total);
        for (const auto& x : states) ++by_size[ref::nonzero(x)];
        for (const auto& [n, c] : by_size) CHECK(count_states(space, n) == c);
        CHECK(count_all_states(space) == states.size());
      }
    }
  }

  TEST_CASE("sizes add up to the total count") {
    for (auto [bins, total] : {std::pair{2000, 100}, std::pair{100, 1000}, std::pair{65, 1000}, std::pair{7, 3}}) {
      const auto space = SpaceParams::make(bins, total);
      BigCount sum = 0;
      for (int n = 1; n <= space.max_support(); ++n) sum += count_states(space, n);
      CHECK(sum == count_all_states(space));
      CHECK(count_all_states(space) == binomial(total + bins - 1, bins - 1));
    }
  }

  TEST_CASE("log count ratio") {
    const auto table = SpaceParams::make(50, 5);
    CHECK(log_count_ratio(3, 4, table) == doctest::Approx(std::log(117600.0 / 921200.0)).epsilon(1e-12));
    CHECK(log_count_ratio(3, 4, table) == doctest::Approx(std::log(12.0 / 94.0)).epsilon(1e-12));
    CHECK(log_count_ratio(4, 4, table) == 0.0);
    const auto small = SpaceParams::make(10, 5);
    CHECK(log_count_ratio(2, 1, small) == doctest::Approx(std::log(18.0)).epsilon(1e-12));
    CHECK(code_of([&] { log_count_ratio(2, 4, small); }) == ErrorCode::StepTooLarge);
    CHECK(code_of([&] { log_count_ratio(5, 6, small); }) == ErrorCode::OutOfRange);

    // Against exact big-integer ratios on a space whose counts overflow 64 bits.
    const auto big = SpaceParams::make(2000, 100);
    for (int n = 1; n < 100; ++n) {
      const double exact = log_big(count_states(big, n)) - log_big(count_states(big, n + 1));
      CHECK(log_count_ratio(n, n + 1, big) == doctest::Approx(exact).epsilon(1e-9));
      CHECK(log_count_ratio(n + 1, n, big) == doctest::Approx(-exact).epsilon(1e-9));
    }
  }

  TEST_CASE("uniform states: N=2, M=1 is a fair coin") {
    const auto space = SpaceParams::make(2, 1);
    Rng rng(11);
    int first = 0;
    const int draws = 20000;
    for (int t = 0; t < draws; ++t) first += sample_uniform_state(space, rng)[0];
    CHECK(std::abs(first / static_cast<double>(draws) - 0.5) < 4 * std::sqrt(0.25 / draws));
  }

  TEST_CASE("uniform states pass a chi-square test on N=3, M=2") {
    const auto space = SpaceParams::make(3, 2);
    const auto states = ref::compositions(3, 2);
    REQUIRE(states.size() == 6);
    std::map<std::vector<int>, int> counts;
    Rng rng(5);
    const int draws = 60000;
    for (int t = 0; t < draws; ++t) ++counts[sample_uniform_state(space, rng).to_vector()];
    double chi2 = 0.0;
    const double expected = draws / 6.0;
    for (const auto& x : states) chi2 += std::pow(counts[x] - expected, 2) / expected;
    CHECK(counts.size() == 6);
    CHECK(chi2 < 20.515);  // chi-square(5) quantile at 0.999
  }

  TEST_CASE("uniform states converge in total variation") {
    for (auto [bins, total] : {std::pair{4, 5}, std::pair{6, 2}}) {
      const auto space = SpaceParams::make(bins, total);
      const auto states = ref::compositions(bins, total);
      std::map<std::vector<int>, double> counts;
      Rng rng(17);
      const int draws = 1'000'000;
      CompositionRatio x = sample_uniform_state(space, rng);
      for (int t = 0; t < draws; ++t) {
        sample_uniform_state(space, rng, x);
        counts[x.to_vector()] += 1.0;
      }
      std::vector<double> empirical;
      for (const auto& s : states) empirical.push_back(counts[s] / draws);
      CHECK(ref::tv(empirical, std::vector<double>(states.size(), 1.0 / states.size())) < 0.02);
    }
  }

  TEST_CASE("states with a fixed support size") {
    const auto space = SpaceParams::make(5, 3);
    Rng rng(3);
    std::map<std::set<int>, int> supports;
    const int draws = 50000;
    for (int t = 0; t < draws; ++t) {
      const auto x = sample_state_with_support(space, 3, rng);
      std::set<int> s;
      for (int k = 0; k < 5; ++k) {
        if (x[k] > 0) {
          CHECK(x[k] == 1);
          s.insert(k);
        }
      }
      ++supports[s];
    }
    CHECK(supports.size() == 10);
    double chi2 = 0.0;
    for (const auto& [s, c] : supports) chi2 += std::pow(c - draws / 10.0, 2) / (draws / 10.0);
    CHECK(chi2 < 27.877);  // chi-square(9) quantile at 0.999

    const auto single = sample_state_with_support(space, 1, rng);
    CHECK(l0_norm(single) == 1);
    CHECK(*std::max_element(single.values().begin(), single.values().end()) == 3);
    CHECK(code_of([&] { sample_state_with_support(space, 4, rng); }) == ErrorCode::OutOfRange);
  }

  TEST_CASE("support-size draws are uniform within the fiber") {
    const auto space = SpaceParams::make(4, 5);
    const auto states = ref::compositions(4, 5);
    Rng rng(23);
    for (int n = 1; n <= 4; ++n) {
      std::map<std::vector<int>, double> counts;
      const int draws = 100000;
      for (int t = 0; t < draws; ++t) counts[sample_state_with_support(space, n, rng).to_vector()] += 1.0;
      std::vector<double> empirical;
      std::vector<double> exact;
      const double fiber = static_cast<double>(count_states(space, n));
      for (const auto& s : states) {
        empirical.push_back(counts[s] / draws);
        exact.push_back(ref::nonzero(s) == n ? 1.0 / fiber : 0.0);
      }
      CHECK(ref::tv(empirical, exact) < 0.02);
    }
  }

  TEST_CASE("pair updates keep the invariants") {
    const auto space = SpaceParams::make(8, 20);
    Rng rng(9);
    auto x = sample_uniform_state(space, rng);
    for (int t = 0; t < 20000; ++t) {
      const int i = static_cast<int>(uniform_index(rng, 8));
      int j = static_cast<int>(uniform_index(rng, 7));
      if (j >= i) ++j;
      const int s = x[i] + x[j];
      x.set_pair(i, j, static_cast<int>(uniform_index(rng, static_cast<std::size_t>(s) + 1)));
      CHECK_NOTHROW(x.check_invariants());
      int sum = 0;
      int n = 0;
      for (int v : x.values()) {
        sum += v;
        n += v > 0;
        CHECK(v >= 0);
      }
      CHECK(sum == 20);
      CHECK(x.nonzero_count() == n);
    }
  }
}
