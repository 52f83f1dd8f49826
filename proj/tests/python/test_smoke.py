# Copyright 2026 The sparsecomp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import pytest

import sparsecomp as sc


def test_counts_are_exact_python_ints():
    assert [sc.count_states(50, 5, n) for n in range(1, 6)] == [50, 4900, 117600, 921200, 2118760]
    big = sc.count_states(2000, 100, 50)
    assert big == math.comb(2000, 50) * math.comb(99, 49)


def test_log_count_ratio_matches_counts():
    got = sc.log_count_ratio(2000, 100, 20, 21)
    want = math.log(sc.count_states(2000, 100, 20)) - math.log(sc.count_states(2000, 100, 21))
    assert got == pytest.approx(want, rel=1e-9)


def test_uniform_state_sums_to_total():
    x = sc.sample_uniform_state(30, 12, seed=5)
    assert len(x) == 30 and sum(x) == 12 and min(x) >= 0


def test_chains_are_seeded_and_rates_are_fractions():
    a = sc.run_chains("accelerated", 10, 5, "uniform{2,5}", iterations=2000, burn_in=200, chains=2, seed=1)
    b = sc.run_chains("accelerated", 10, 5, "uniform{2,5}", iterations=2000, burn_in=200, chains=2, seed=1)
    assert a == b
    for chain in a:
        assert 0.0 <= chain["updated_rate"] <= chain["accepted_rate"] <= 1.0
        assert sum(chain["n_histogram"]) == 2000
        assert all(c == 0 for n, c in enumerate(chain["n_histogram"]) if n < 2)


def test_exact_distribution_and_balance():
    states, probs = sc.exact_distribution(3, 2, "uniform{1,2}")
    assert len(states) == 6
    assert probs == pytest.approx([1 / 6] * 6)
    for kernel in ("naive", "gibbs", "accelerated"):
        assert sc.detailed_balance_residual(kernel, 4, 3, "unimodal{2,0.5}") < 1e-12


def test_errors_carry_their_code():
    with pytest.raises(sc.SparsecompError, match="InvalidPrior"):
        sc.prior_weights("uniform{0,9}", 5, 5)


def test_cli_entry_point(tmp_path):
    code, out, err = sc.run_cli(["synth-data", "--seed", "2", "--out", str(tmp_path)])
    assert code == 0, err
    assert (tmp_path / "recipes.csv").read_text() == sc.synthetic_recipes_csv(2)
