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
"""Smoke tests for the dpmarket Python bindings."""

import math

import pytest

import dpmarket


def test_encode_and_randomize():
    assert dpmarket.encode_truth(4, 2) == [False, False, True, False]
    truth = dpmarket.encode_truth(20, 5)
    assert dpmarket.randomize(truth, 1.0, seed=3) == truth
    noisy = dpmarket.randomize(truth, 0.5, seed=3)
    assert len(noisy) == 20
    assert noisy == dpmarket.randomize(truth, 0.5, seed=3)


def test_estimate_counts():
    est = dpmarket.estimate_counts([2750] * 20, 10000, 0.5)
    assert est["raw"] == pytest.approx([500.0] * 20)
    assert est["total"] == 10000


def test_advantage():
    assert dpmarket.attacker_advantage(4, 0.5)["advantage"] == pytest.approx(2.0)
    rows = dpmarket.advantage_sweep([1, 1000000], [0.5, 0.2])
    assert [r["n"] for r in rows] == [1, 1000000, 1, 1000000]
    assert 2.99 <= rows[1]["advantage"] <= 3.0
    assert 1.499 <= rows[3]["advantage"] <= 1.5
    assert dpmarket.map_guess_success_probability(20, 0.5) == pytest.approx(0.14957717, abs=1e-7)


def test_hash_and_key():
    assert dpmarket.hash(b"").hex() == (
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855")
    a, b = b"\x01" * 32, b"\x02" * 32
    assert dpmarket.derive_key(a, b) == dpmarket.hash(a + b)
    assert dpmarket.derive_key(a, b) != dpmarket.derive_key(b, a)


def test_contract_lifecycle():
    s2 = b"\x07" * 32
    c = dpmarket.Contract.deploy(dpmarket.hash(b"q"), dpmarket.hash(s2), 1000, 2)
    assert c.gas_used == 660809
    for i in range(3):
        c.record_response_hash(bytes([i]) * 20, dpmarket.hash(bytes([i])))
    c.record_filter_hash(dpmarket.hash(b"F"), 2)
    c.make_deposit(1000)
    with pytest.raises(dpmarket.Error, match="reveal"):
        c.reveal_and_settle(b"\x08" * 32, b"\x09" * 20)
    assert c.deposit_balance == 1000
    c.reveal_and_settle(s2, b"\x09" * 20)
    assert c.phase == "Settled"
    assert c.gas_used == 784029 + 3 * 74537
    assert "reveal_rejected" in c.events_jsonl()


def test_run_session_and_verify():
    import json

    transcript, failure = dpmarket.run_session(providers=5, required_responses=5, seed=1)
    assert failure is None
    assert transcript["contract"]["gas_used"] == 1156714
    text = json.dumps(transcript)
    assert dpmarket.verify_transcript(text, "filter")
    addr = transcript["submissions"][0]["address"]
    assert dpmarket.verify_transcript(text, "response:" + addr)

    _, failure = dpmarket.run_session(providers=3, required_responses=5, seed=1)
    assert failure == "threshold_not_met"
    bad, failure = dpmarket.run_session(providers=6, seed=2, inject_wrong_reveal=True)
    assert failure == "reveal_mismatch"
    assert bad["contract"]["deposit_balance"] == 1000


def test_experiments():
    report = dpmarket.accuracy_experiment(provider_counts=[1000], seed=4)
    result = report["results"][0]
    assert len(result["z_scores"]) == 20
    assert all(abs(z) <= 4 for z in result["z_scores"])
    plain = dpmarket.attacker_experiment("no_noise", providers=200)
    assert plain["exact_guess_rate"] == 1.0
    noisy = dpmarket.attacker_experiment("rappor", providers=2000)
    assert noisy["exact_guess_rate"] <= 0.25
    assert math.isclose(noisy["analytic_success"], 0.149577, abs_tol=1e-6)


def test_errors_map_to_python():
    with pytest.raises(dpmarket.Error, match="out_of_range"):
        dpmarket.encode_truth(4, 4)
    with pytest.raises(dpmarket.Error):
        dpmarket.attacker_advantage(0, 0.5)
