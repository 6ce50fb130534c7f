# Copyright 2026 The dpmarket Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python bindings for the dpmarket C++ core."""

import json

from ._core import (
    Contract,
    Error,
    advantage_sweep,
    attacker_advantage,
    derive_key,
    encode_truth,
    estimate_counts,
    hash,
    map_guess_success_probability,
    randomize,
    verify_transcript,
)
from . import _core

__all__ = [
    "Contract",
    "Error",
    "advantage_sweep",
    "attacker_advantage",
    "accuracy_experiment",
    "attacker_experiment",
    "derive_key",
    "encode_truth",
    "estimate_counts",
    "hash",
    "map_guess_success_probability",
    "randomize",
    "run_session",
    "verify_transcript",
]


def run_session(n=20, price=1000, required_responses=5, providers=10, f=0.5,
                seed=1, predicate="all", inject_wrong_reveal=False,
                inject_tamper=False):
    """Runs one session; returns (transcript dict, failure code or None)."""
    text, failure = _core.run_session_json(
        n, price, required_responses, providers, f, seed, predicate,
        inject_wrong_reveal, inject_tamper)
    return json.loads(text), (failure or None)


def accuracy_experiment(n=20, provider_counts=(500, 1000, 5000, 10000),
                        mean=10.0, sd=2.0, f=0.5, seed=1):
    return json.loads(_core.accuracy_experiment_json(
        n, list(provider_counts), mean, sd, f, seed))


def attacker_experiment(mode, providers=1000, n=20, mean=10.0, sd=2.0, f=0.5,
                        seed=1):
    return json.loads(_core.attacker_experiment_json(
        mode, providers, n, mean, sd, f, seed))
