import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsregen import codec
from bsregen.gf import GF, Matrix, field

F4MB = 4


def encoded(n=4, k=2, t=2, rho=2, data=b"regenerate me " * 50):
    c = codec.codec_new(n, k, t, rho)
    return c, codec.encode(c, data), data


def test_chunk_sizes():
    assert codec.codec_new(4, 2, 2, 2).chunk_size(F4MB) == Fraction(1, 2)
    assert codec.codec_new(4, 2, 2, 1).chunk_size(F4MB) == Fraction(2, 3)


def test_rejects_too_few_survivors():
    with pytest.raises(codec.CodecError):
        codec.codec_new(4, 3, 2, 0)


def test_rejects_field_smaller_than_cluster():
    with pytest.raises(codec.CodecError):
        codec.codec_new(8, 2, 2, 0, GF(5, 1))


def test_systematic_prefix_stores_plain_chunks():
    f = field()
    G = Matrix.of(f, [[1, 0, 1, 1], [0, 1, 1, 2]])
    c = codec.codec_new(4, 2, 2, 1, f, [G] * 3)
    msg = np.arange(3 * 2 * 5).reshape(3, 2, 5)
    enc = codec.encode_symbols(c, msg)
    assert np.array_equal(enc.nodes[1].chunks, msg[:, 0])
    assert np.array_equal(enc.nodes[2].chunks, msg[:, 1])


def test_round_trip_every_pair():
    c, enc, data = encoded()
    for ids in itertools.combinations(range(1, 5), 2):
        assert codec.collect(c, [enc.nodes[j] for j in ids]) == data


def test_tampered_store_detected():
    c, enc, _ = encoded()
    bad = enc.nodes[3].chunks.copy()
    bad[0, 0] ^= 1
    stores = [enc.nodes[1], enc.nodes[2], codec.NodeStore(3, bad)]
    with pytest.raises(codec.CorruptionError):
        codec.collect(c, stores)


def test_collect_needs_k_distinct():
    c, enc, _ = encoded()
    with pytest.raises(codec.CodecError):
        codec.collect(c, [enc.nodes[1]])
    with pytest.raises(codec.CodecError):
        codec.collect(c, [enc.nodes[1], enc.nodes[1]])


def test_empty_file_rejected():
    with pytest.raises(codec.CodecError):
        codec.encode(codec.codec_new(4, 2, 2, 0), b"")


def test_small_field_cannot_carry_bytes():
    c = codec.codec_new(4, 2, 2, 0, GF(5, 1))
    with pytest.raises(codec.CodecError):
        codec.encode(c, b"abc")


def test_packet_example_over_gf5():
    f = GF(5, 1)
    row1 = Matrix.of(f, [[1, 0, 1, 2], [0, 1, 1, 1]])
    row2 = Matrix.of(f, [[1, 0, 2, 1], [0, 1, 1, 1]])
    c = codec.codec_new(4, 2, 2, 0, f, [row1, row2])
    A1, B1, A2, B2 = 1, 3, 4, 2
    msg = np.array([[[A1], [B1]], [[A2], [B2]]])
    enc = codec.encode_symbols(c, msg)
    assert enc.nodes[3].chunks.ravel().tolist() == [(A1 + B1) % 5, (2 * A2 + B2) % 5]
    assert enc.nodes[4].chunks.ravel().tolist() == [(2 * A1 + B1) % 5, (A2 + B2) % 5]
    session = codec.repair(c, {1: enc.nodes[1], 3: enc.nodes[3]}, (2, 4), ())
    assert session.stores[2] == enc.nodes[2]
    assert session.stores[4] == enc.nodes[4]
    for j in (2, 4):
        assert session.counts(j) == {"local": 2, "coop": 1, "bs": []}
    assert codec.ledger_cost(session, (), 4) == 3
    for ids in itertools.combinations(range(1, 5), 2):
        assert np.array_equal(codec.decode_symbols(c, [enc.nodes[j] for j in ids]), msg)


def test_two_layer_repair_cost_and_identity():
    c, enc, data = encoded()
    alive = {j: s for j, s in enc.nodes.items() if j not in (2, 4)}
    session = codec.repair(c, alive, (2, 4), enc.base_stations)
    assert session.stores[2] == enc.nodes[2] and session.stores[4] == enc.nodes[4]
    assert codec.ledger_cost(session, ("1.1", "1.7"), F4MB) == Fraction(29, 10)
    assert session.ledger(2, ("1.1", "1.7"), F4MB).data_moved == Fraction(5, 2)


@pytest.mark.parametrize("k, t, rho", [(2, 2, 0), (2, 2, 1), (2, 2, 2), (3, 1, 2), (2, 3, 1)])
def test_unit_weights_collapse(k, t, rho):
    c = codec.codec_new(k + t, k, t, rho)
    enc = codec.encode(c, bytes(range(200)))
    failed = tuple(range(1, t + 1))
    session = codec.repair(c, enc.nodes, failed, enc.base_stations)
    F = 12
    assert codec.ledger_cost(session, (1,) * rho, F) == Fraction(F * (k + t - 1 + rho), k * (t + rho))


def test_single_loss_without_layers_is_plain_mds_repair():
    c, enc, _ = encoded(n=5, k=3, t=1, rho=0)
    session = codec.repair(c, enc.nodes, (4,), ())
    assert session.counts(4) == {"local": 3, "coop": 0, "bs": []}
    assert session.stores[4] == enc.nodes[4]


def test_phase_order_irrelevant():
    c, enc, _ = encoded(n=5, rho=2)
    a = codec.repair(c, enc.nodes, (1, 5), enc.base_stations)
    b = codec.repair(c, enc.nodes, (1, 5), enc.base_stations, bs_first=True)
    assert a.stores == b.stores


@pytest.mark.parametrize("failed, helpers", [
    ((2,), None),
    ((2, 2), None),
    ((2, 4), {2: (1, 1), 4: (1, 3)}),
    ((2, 4), {2: (1, 4), 4: (1, 3)}),
])
def test_repair_preconditions(failed, helpers):
    c, enc, _ = encoded()
    with pytest.raises(codec.CodecError):
        codec.repair(c, enc.nodes, failed, enc.base_stations, helpers)


def test_repair_needs_every_base_station():
    c, enc, _ = encoded()
    with pytest.raises(codec.CodecError):
        codec.repair(c, enc.nodes, (2, 4), enc.base_stations[:1])


def test_serialisation_round_trip():
    c, enc, _ = encoded()
    for store in enc.nodes.values():
        header, back = codec.store_from_bytes(codec.node_to_bytes(c, store))
        assert header.kind == "node" and back == store
        assert header.codec().G == c.G
    for store in enc.base_stations:
        header, back = codec.store_from_bytes(codec.bs_to_bytes(c, store))
        assert header.kind == "bs" and back == store


def test_serialisation_wide_field():
    f = field(2, 16)
    c = codec.codec_new(4, 2, 2, 1, f)
    enc = codec.encode(c, b"wide symbols")
    header, back = codec.store_from_bytes(codec.node_to_bytes(c, enc.nodes[1]))
    assert header.width == 2 and back == enc.nodes[1]
    assert codec.collect(c, [enc.nodes[3], enc.nodes[4]]) == b"wide symbols"


@pytest.mark.parametrize("mangle", [
    lambda b: b"XXXX" + b[4:],
    lambda b: b[:10],
    lambda b: b[:-1],
])
def test_damaged_store_file(mangle):
    c, enc, _ = encoded()
    with pytest.raises(codec.CodecError):
        codec.store_from_bytes(mangle(codec.node_to_bytes(c, enc.nodes[1])))


@settings(max_examples=40, deadline=None)
@given(st.binary(min_size=1, max_size=300), st.integers(1, 3), st.integers(1, 2), st.integers(0, 2))
def test_any_bytes_survive_any_repair(data, k, t, rho):
    n = k + t + 1
    c = codec.codec_new(n, k, t, rho)
    enc = codec.encode(c, data)
    failed = tuple(range(n - t + 1, n + 1))
    session = codec.repair(c, enc.nodes, failed, enc.base_stations)
    for j in failed:
        assert session.stores[j] == enc.nodes[j]
    assert codec.collect(c, [session.stores[j] for j in failed[:k]] +
                         [enc.nodes[j] for j in range(1, k + 1 - min(k, t))]) == data
