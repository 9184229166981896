import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsregen.gf import GF, FieldError, Matrix, SingularMatrix, determinant, field, mat_inv, mat_mul, vandermonde


def test_prime_field_inverse():
    assert GF(7, 1).inv(3) == 5


def test_small_extension_multiplication():
    f = GF(2, 3, 0b1011)
    assert f.mul(0b010, 0b011) == 0b110


def test_additive_identity():
    f = field()
    assert all(f.add(a, 0) == a for a in f.elements())


def test_zero_has_no_inverse():
    with pytest.raises(FieldError):
        field().inv(0)


def test_rejects_reducible_polynomial():
    with pytest.raises(ValueError):
        GF(2, 2, 0b101)  # x^2 + 1 = (x + 1)^2


def test_rejects_non_prime_characteristic():
    with pytest.raises(ValueError):
        GF(4, 1)


@pytest.mark.parametrize("p, q", [(2, 1), (2, 4), (2, 8), (3, 2), (5, 1), (7, 2)])
def test_field_axioms_exhaustive(p, q):
    f = GF(p, q)
    els = list(f.elements())
    sample = els if len(els) <= 16 else els[:: max(1, len(els) // 16)]
    for a in els[1:]:
        assert f.mul(a, f.inv(a)) == 1
    for a, b in itertools.product(sample, repeat=2):
        assert f.mul(a, b) == f.slow_mul(a, b) == f.mul(b, a)
        assert f.sub(f.add(a, b), b) == a
        for c in sample[:4]:
            assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))


def test_multiplicative_group_is_cyclic():
    f = field(2, 8)
    assert f.pow(2, 255) == 1
    assert len({f.pow(3, e) for e in range(255)}) in (255, 85, 51, 17, 15, 5, 3, 1)


def test_vector_ops_match_scalar():
    f = field()
    rng = np.random.default_rng(0)
    a = rng.integers(0, 256, 64)
    b = rng.integers(0, 256, 64)
    assert list(f.vadd(a, b)) == [f.add(x, y) for x, y in zip(a, b)]
    assert list(f.vscale(29, a)) == [f.mul(29, x) for x in a]
    combo = f.combine([3, 7], np.stack([a, b]))
    assert list(combo) == [f.add(f.mul(3, x), f.mul(7, y)) for x, y in zip(a, b)]


def test_vandermonde_over_five():
    assert vandermonde(2, 4, GF(5, 1)).tolist() == [[1, 1, 1, 1], [0, 1, 2, 3]]


def test_square_vandermonde_is_invertible():
    f = field()
    V = vandermonde(5, 5, f)
    assert mat_mul(V, mat_inv(V)) == Matrix.identity(f, 5)
    assert determinant(V) != 0


def test_every_column_subset_of_vandermonde_is_invertible():
    f = field()
    G = vandermonde(3, 7, f)
    for cols in itertools.combinations(range(7), 3):
        sub = G.columns(list(cols))
        assert mat_mul(mat_inv(sub), sub) == Matrix.identity(f, 3)


def test_singular_matrix():
    f = field()
    with pytest.raises(SingularMatrix):
        mat_inv(Matrix.of(f, [[1, 2], [2, 4]]) if f.p != 2 else Matrix.of(f, [[1, 2], [1, 2]]))


def test_collector_identity_recovers_message():
    f = field()
    rng = np.random.default_rng(1)
    k, n = 3, 6
    G = vandermonde(k, n, f)
    M = Matrix.of(f, rng.integers(0, 256, (4, k)).tolist())
    stored = mat_mul(M, G)
    for cols in itertools.combinations(range(n), k):
        assert mat_mul(stored.columns(list(cols)), mat_inv(G.columns(list(cols)))) == M


def test_shape_mismatch():
    f = field()
    with pytest.raises(ValueError):
        mat_mul(Matrix.identity(f, 2), Matrix.identity(f, 3))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_gf256_ring_laws(a, b, c):
    f = field()
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    if b:
        assert f.mul(f.div(a, b), b) == a
