from fractions import Fraction

import numpy as np

from bsregen.codec import NodeStore, codec_new, encode
from bsregen.model import SystemParams
from bsregen.optimizer import mscr_point
from bsregen.simulator import ClusterState, Scenario, run, verify_durability


def test_scripted_pair_loss_costs_twice_the_newcomer_price():
    s = Scenario(4, 2, 2, 2, ("1.1", "1.7"), 4, script=[[2], [4]], file_size=256)
    trace = run(s)
    assert trace.error is None
    assert len(trace.records) == 1
    rec = trace.records[0]
    assert rec["failed"] == [2, 4]
    assert rec["cost"]["exact"] == "29/5"
    assert rec["cost_per_newcomer"]["exact"] == "29/10"
    assert rec["durable"] is True


def test_no_rounds_means_no_cost():
    trace = run(Scenario(6, 2, 2, 1, (1.5,), rounds=0))
    assert trace.records == [] and trace.state.ledger is None and trace.error is None


def test_seeded_rounds_have_constant_cost():
    w = ("1.5",)
    trace = run(Scenario(6, 2, 2, 1, w, 6, seed=3, rounds=12, file_size=300))
    assert trace.error is None and len(trace.records) == 12
    expected = mscr_point(SystemParams(6, 2, 2, 2, w, (1,), 6), (1,), 1).gamma
    assert {r["cost_per_newcomer"]["exact"] for r in trace.records} == {f"{expected.numerator}/{expected.denominator}"}
    assert all(r["durable"] for r in trace.records)


def test_same_seed_same_trace():
    s = Scenario(6, 2, 2, 1, (2,), seed=9, rounds=4, file_size=100)
    assert run(s).records == run(s).records


def test_too_many_pending_losses_reported():
    trace = run(Scenario(5, 2, 2, 0, script=[[1, 2, 3]], file_size=50))
    assert trace.error and "exceed" in trace.error


def test_departing_dead_node_reported():
    trace = run(Scenario(5, 2, 2, 0, script=[[1], [1]], file_size=50))
    assert trace.error


def _state(data=b"durable bytes" * 20):
    c = codec_new(5, 2, 2, 1)
    enc = encode(c, data)
    return ClusterState(c, data, dict(enc.nodes), enc.base_stations)


def test_fresh_encoding_is_durable():
    assert verify_durability(_state())


def test_flipped_byte_breaks_durability():
    state = _state()
    bad = state.alive[3].chunks.copy()
    bad[1, 2] ^= 0x40
    state.alive[3] = NodeStore(3, bad)
    assert not verify_durability(state)


def test_sampled_durability_check():
    state = _state()
    assert verify_durability(state, exhaustive=False, samples=3)


def test_verification_cadence():
    trace = run(Scenario(6, 2, 2, 1, (1,), seed=1, rounds=4, verify_every=2, file_size=64))
    assert ["durable" in r for r in trace.records] == [False, True, False, True]
