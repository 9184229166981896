"""Finite fields GF(p^q) with log/antilog tables, and dense matrices over them.

Elements are plain integers: the base-``p`` digits of an element are the
coefficients of its polynomial representative, lowest degree first.
Vector operations accept numpy integer arrays so whole chunks can be
combined at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_ORDER = 1 << 16


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _digits(x: int, p: int, q: int) -> list[int]:
    out = []
    for _ in range(q):
        out.append(x % p)
        x //= p
    return out


def _from_digits(ds: Sequence[int], p: int) -> int:
    x = 0
    for d in reversed(ds):
        x = x * p + d
    return x


def _poly_mulmod(a: int, b: int, p: int, q: int, poly: int) -> int:
    """Schoolbook multiply of two field representatives modulo the monic ``poly``."""
    da, db = _digits(a, p, q), _digits(b, p, q)
    prod = [0] * (2 * q - 1)
    for i, x in enumerate(da):
        if x:
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % p
    red = _digits(poly, p, q + 1)
    for deg in range(2 * q - 2, q - 1, -1):
        c = prod[deg]
        if c:
            for i in range(q + 1):
                prod[deg - q + i] = (prod[deg - q + i] - c * red[i]) % p
    return _from_digits(prod[:q], p)


def _poly_irreducible(poly: int, p: int, q: int) -> bool:
    """Trial division by every monic polynomial of degree 1..q//2."""
    coeffs = _digits(poly, p, q + 1)
    if coeffs[q] != 1:
        return False
    for deg in range(1, q // 2 + 1):
        for low in range(p ** deg):
            div = _digits(low, p, deg) + [1]
            rem = coeffs[:]
            for top in range(q, deg - 1, -1):
                c = rem[top]
                if c:
                    for i in range(deg + 1):
                        rem[top - deg + i] = (rem[top - deg + i] - c * div[i]) % p
            if not any(rem[:deg]):
                return False
    return True


def default_polynomial(p: int, q: int) -> int:
    if (p, q) == (2, 8):
        return 0x11D  # x^8 + x^4 + x^3 + x^2 + 1
    for low in range(p ** q):
        poly = low + p ** q
        if _poly_irreducible(poly, p, q):
            return poly
    raise ValueError(f"no irreducible polynomial of degree {q} over GF({p})")


class FieldError(ArithmeticError):
    pass


class GF:
    """The field GF(p^q).  ``poly`` is the monic reduction polynomial for ``q > 1``."""

    def __init__(self, p: int = 2, q: int = 8, poly: int | None = None):
        if not _is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if q < 1 or p ** q > MAX_ORDER:
            raise ValueError(f"GF({p}^{q}) outside supported orders (<= 2^16)")
        self.p, self.q = p, q
        self.order = p ** q
        if q == 1:
            self.poly = None
        else:
            self.poly = default_polynomial(p, q) if poly is None else poly
            if not _poly_irreducible(self.poly, p, q):
                raise ValueError(f"polynomial {self.poly:#x} is not irreducible over GF({p})")
        self._build_tables()

    def __repr__(self) -> str:
        if self.q == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.q}, poly={self.poly:#x})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and (self.p, self.q, self.poly) == (other.p, other.q, other.poly)

    def __hash__(self) -> int:
        return hash((self.p, self.q, self.poly))

    def slow_mul(self, a: int, b: int) -> int:
        if self.q == 1:
            return a * b % self.p
        return _poly_mulmod(a, b, self.p, self.q, self.poly)

    def _build_tables(self) -> None:
        n = self.order - 1
        gen = None
        for cand in range(2 if self.order > 2 else 1, self.order):
            x, seen = 1, 0
            for seen in range(1, n + 1):
                x = self.slow_mul(x, cand)
                if x == 1:
                    break
            if seen == n:
                gen = cand
                break
        assert gen is not None
        exp = np.zeros(2 * n, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = self.slow_mul(x, gen)
        exp[n:] = exp[:n]
        self._exp, self._log = exp, log
        self.generator = gen
        if self.p != 2 and self.q > 1:
            idx = np.arange(self.order)
            self._digit_table = np.stack([(idx // self.p ** i) % self.p for i in range(self.q)])
            self._weights = np.array([self.p ** i for i in range(self.q)], dtype=np.int64)

    # -- scalar ops -------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return int(self.vadd(np.int64(a), np.int64(b)))

    def neg(self, a: int) -> int:
        return int(self.vneg(np.int64(a)))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a: int) -> int:
        if a % self.order == 0:
            raise FieldError("zero has no multiplicative inverse")
        return int(self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            return 0
        return int(self._exp[(self._log[a] * e) % (self.order - 1)])

    def elements(self) -> range:
        return range(self.order)

    # -- vector ops -------------------------------------------------------
    def vadd(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.q == 1:
            return (a + b) % self.p
        da, db = self._digit_table[:, a], self._digit_table[:, b]
        return np.tensordot(self._weights, (da + db) % self.p, axes=1)

    def vneg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        if self.q == 1:
            return (-a) % self.p
        return np.tensordot(self._weights, (-self._digit_table[:, a]) % self.p, axes=1)

    def vscale(self, c: int, a):
        """Multiply every entry of ``a`` by the scalar ``c``."""
        a = np.asarray(a, dtype=np.int64)
        if c == 0:
            return np.zeros_like(a)
        out = self._exp[self._log[a] + self._log[c]]
        return np.where(a == 0, 0, out)

    def combine(self, coeffs: Sequence[int], vectors) -> np.ndarray:
        """Linear combination ``sum_i coeffs[i] * vectors[i]`` of equal-length vectors."""
        vectors = np.asarray(vectors, dtype=np.int64)
        acc = np.zeros(vectors.shape[1:], dtype=np.int64)
        for c, vec in zip(coeffs, vectors):
            if c:
                acc = self.vadd(acc, self.vscale(int(c), vec))
        return acc


@lru_cache(maxsize=None)
def field(p: int = 2, q: int = 8, poly: int | None = None) -> GF:
    """Cached field constructor; fields are immutable once built."""
    return GF(p, q, poly)


class SingularMatrix(FieldError):
    pass


@dataclass(frozen=True, eq=False)
class Matrix:
    field: GF
    entries: np.ndarray  # 2-D int64, row-major

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.int64)
        if arr.ndim != 2 or 0 in arr.shape:
            raise ValueError("matrix must be 2-D with positive dimensions")
        if arr.min() < 0 or arr.max() >= self.field.order:
            raise ValueError("entries outside the field")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def of(cls, f: GF, rows: Iterable[Iterable[int]]) -> "Matrix":
        return cls(f, np.array([list(r) for r in rows], dtype=np.int64))

    @classmethod
    def identity(cls, f: GF, n: int) -> "Matrix":
        return cls(f, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Matrix) and self.field == other.field
                and np.array_equal(self.entries, other.entries))

    def __getitem__(self, idx):
        return self.entries[idx]

    def columns(self, idx: Sequence[int]) -> "Matrix":
        return Matrix(self.field, self.entries[:, list(idx)])

    def column(self, j: int) -> np.ndarray:
        return self.entries[:, j]

    def tolist(self) -> list[list[int]]:
        return self.entries.tolist()

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    if A.field != B.field:
        raise ValueError("matrices over different fields")
    if A.cols != B.rows:
        raise ValueError(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    f = A.field
    out = np.zeros((A.rows, B.cols), dtype=np.int64)
    for i in range(A.rows):
        out[i] = f.combine(A.entries[i], B.entries)
    return Matrix(f, out)


def mat_inv(A: Matrix) -> Matrix:
    """Gauss-Jordan inverse; raises :class:`SingularMatrix`."""
    if A.rows != A.cols:
        raise ValueError("only square matrices have inverses")
    f, n = A.field, A.rows
    aug = np.concatenate([A.entries, np.eye(n, dtype=np.int64)], axis=1).astype(np.int64)
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r, col] != 0), None)
        if pivot is None:
            raise SingularMatrix("matrix is singular")
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        aug[col] = f.vscale(f.inv(int(aug[col, col])), aug[col])
        for r in range(n):
            if r != col and aug[r, col] != 0:
                aug[r] = f.vadd(aug[r], f.vneg(f.vscale(int(aug[r, col]), aug[col])))
    return Matrix(f, aug[:, n:])


def determinant(A: Matrix) -> int:
    if A.rows != A.cols:
        raise ValueError("determinant needs a square matrix")
    f, n = A.field, A.rows
    m = A.entries.copy()
    det = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r, col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            m[[col, pivot]] = m[[pivot, col]]
            det = f.neg(det)
        det = f.mul(det, int(m[col, col]))
        inv = f.inv(int(m[col, col]))
        for r in range(col + 1, n):
            if m[r, col]:
                factor = f.mul(int(m[r, col]), inv)
                m[r] = f.vadd(m[r], f.vneg(f.vscale(factor, m[col])))
    return det


def vandermonde(k: int, n: int, f: GF, points: Sequence[int] | None = None) -> Matrix:
    """k x n matrix whose column j is (1, a_j, ..., a_j^(k-1)); points default to 0..n-1."""
    if n > f.order:
        raise ValueError(f"n={n} exceeds field order {f.order}")
    pts = list(range(n)) if points is None else list(points)
    if len(pts) != n or len(set(pts)) != n:
        raise ValueError("need n distinct evaluation points")
    return Matrix(f, np.array([[f.pow(a, e) for a in pts] for e in range(k)], dtype=np.int64))
