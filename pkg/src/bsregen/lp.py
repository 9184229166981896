"""Small dense two-phase simplex over exact rationals.

Solves ``min c.x`` subject to ``A_le x <= b_le``, ``A_ge x >= b_ge`` and
``x >= 0``.  Bland's rule guarantees termination; problems here have a
handful of variables so the dense tableau is never a bottleneck.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Row = Sequence[Fraction]


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


@dataclass(frozen=True)
class LPResult:
    x: tuple[Fraction, ...]
    objective: Fraction


def _pivot(T: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    piv = T[r][c]
    T[r] = [a / piv for a in T[r]]
    for i, row in enumerate(T):
        if i != r and row[c] != 0:
            f = row[c]
            pr = T[r]
            T[i] = [a - f * b for a, b in zip(row, pr)]
    basis[r] = c


def _run(T: list[list[Fraction]], basis: list[int], allowed: int) -> None:
    """Minimise the objective in the last row over the first ``allowed`` columns."""
    m = len(T) - 1
    while True:
        obj = T[-1]
        entering = next((j for j in range(allowed) if obj[j] < 0), None)
        if entering is None:
            return
        best = None
        for i in range(m):
            a = T[i][entering]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise Unbounded("objective unbounded below")
        _pivot(T, basis, best[1], entering)


def solve(c: Row, A_le: Sequence[Row] = (), b_le: Row = (),
          A_ge: Sequence[Row] = (), b_ge: Row = ()) -> LPResult:
    nvar = len(c)
    rows: list[tuple[list[Fraction], Fraction, int]] = []  # (coeffs, rhs, +1 for <=, -1 for >=)
    for a, b in zip(A_le, b_le):
        rows.append((list(map(Fraction, a)), Fraction(b), 1))
    for a, b in zip(A_ge, b_ge):
        rows.append((list(map(Fraction, a)), Fraction(b), -1))
    for a, _, _ in rows:
        if len(a) != nvar:
            raise ValueError("constraint row has wrong width")
    # normalise to non-negative right-hand sides
    norm = []
    for a, b, sense in rows:
        if b < 0:
            a, b, sense = [-x for x in a], -b, -sense
        norm.append((a, b, sense))

    m = len(norm)
    n_slack = m
    art_rows = [i for i, (_, _, s) in enumerate(norm) if s == -1]
    n_art = len(art_rows)
    width = nvar + n_slack + n_art
    T: list[list[Fraction]] = []
    basis: list[int] = []
    art_col = {}
    for i, (a, b, sense) in enumerate(norm):
        row = a + [Fraction(0)] * (n_slack + n_art) + [b]
        row[nvar + i] = Fraction(sense)
        if sense == 1:
            basis.append(nvar + i)
        else:
            col = nvar + n_slack + len(art_col)
            art_col[i] = col
            row[col] = Fraction(1)
            basis.append(col)
        T.append(row)

    if n_art:
        phase1 = [Fraction(0)] * (width + 1)
        for i in art_rows:
            phase1 = [p - x for p, x in zip(phase1, T[i])]
        for col in art_col.values():
            phase1[col] = Fraction(0)
        T.append(phase1)
        _run(T, basis, width)
        if T[-1][-1] != 0:
            raise Infeasible("no point satisfies all constraints")
        T.pop()
        # drive zero-level artificials out of the basis
        for i in range(m):
            if basis[i] >= nvar + n_slack:
                col = next((j for j in range(nvar + n_slack) if T[i][j] != 0), None)
                if col is not None:
                    _pivot(T, basis, i, col)
        keep = [i for i in range(m) if basis[i] < nvar + n_slack]
        T = [T[i][:nvar + n_slack] + [T[i][-1]] for i in keep]
        basis = [basis[i] for i in keep]

    width = nvar + n_slack
    obj = [Fraction(x) for x in c] + [Fraction(0)] * n_slack + [Fraction(0)]
    for i, bcol in enumerate(basis):
        if obj[bcol] != 0:
            f = obj[bcol]
            obj = [o - f * x for o, x in zip(obj, T[i])]
    T.append(obj)
    _run(T, basis, width)

    x = [Fraction(0)] * nvar
    for i, bcol in enumerate(basis):
        if bcol < nvar:
            x[bcol] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(map(Fraction, c), x)), Fraction(0))
    return LPResult(tuple(x), value)
