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

"""Sparse composition-ratio MCMC samplers (Python bindings)."""

from ._core import (
    SparsecompError,
    count_states,
    detailed_balance_residual,
    exact_distribution,
    log_count_ratio,
    prior_weights,
    run_chains,
    run_cli,
    sample_uniform_state,
    synthetic_recipes_csv,
)

__all__ = [
    "SparsecompError",
    "count_states",
    "detailed_balance_residual",
    "exact_distribution",
    "log_count_ratio",
    "prior_weights",
    "run_chains",
    "run_cli",
    "sample_uniform_state",
    "synthetic_recipes_csv",
]
