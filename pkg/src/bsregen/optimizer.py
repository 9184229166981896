"""Bandwidth-cost versus storage optimisation.

Closed forms give the two extreme operating points for a fixed BS usage
vector, with :func:`opt_bs_count` deciding how many layers are worth it.
Between the extremes :func:`min_cost_at_storage` solves the general
problem by linear programming.  The bilinear ``r_l * beta`` products are
linearised as ``z_l = r_l * beta`` so each (selector, regime) pair is an
ordinary LP in ``(beta, beta', z_1..z_rho)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import lp
from .bounds import psi, repair_cost
from .model import (
    Number,
    OperatingPoint,
    RepairVariables,
    SystemParams,
    as_fraction,
    selector,
)


class PointKind(enum.Enum):
    MSCR = 1   # p_t = 1
    MBCCR = 0  # p_t = 0


def _sums(p: SystemParams, r: Sequence[Number], rho: int) -> tuple[Fraction, Fraction]:
    if len(r) != p.M:
        raise ValueError(f"r has {len(r)} entries, expected {p.M}")
    if not 0 <= rho <= p.M:
        raise ValueError(f"rho={rho} outside [0, {p.M}]")
    r = [as_fraction(x) for x in r]
    for rl, bl in zip(r[:rho], p.b):
        if not 0 <= rl <= bl:
            raise ValueError("r_l must lie in [0, b_l]")
    weighted = sum((w * x for w, x in zip(p.w[:rho], r[:rho])), Fraction(0))
    plain = sum(r[:rho], Fraction(0))
    return weighted, plain


def _witness(p: SystemParams, r: Sequence[Number], rho: int, beta: Fraction,
             beta_prime: Fraction) -> RepairVariables:
    used = tuple(as_fraction(x) if i < rho else Fraction(0) for i, x in enumerate(r))
    return RepairVariables(beta, beta_prime, used, selector(rho, p.M))


def mscr_point(p: SystemParams, r: Sequence[Number], rho: int) -> OperatingPoint:
    """Minimum-storage point for fixed BS fractions ``r`` on the first ``rho`` layers."""
    weighted, plain = _sums(p, r, rho)
    denom = p.d + plain + p.t - p.k
    if denom <= 0:
        raise ValueError("d + sum(r) + t - k must be positive")
    beta = p.F / (p.k * denom)
    gamma = p.F * (p.d + weighted + p.t - 1) / (p.k * denom)
    return OperatingPoint(p.F / p.k, gamma, _witness(p, r, rho, beta, beta))


def mbccr_point(p: SystemParams, r: Sequence[Number], rho: int) -> OperatingPoint:
    """Minimum-bandwidth-cost point for fixed BS fractions ``r``."""
    weighted, plain = _sums(p, r, rho)
    denom = 2 * (p.d + plain) + p.t - p.k
    if denom <= 0:
        raise ValueError("2(d + sum(r)) + t - k must be positive")
    beta = 2 * p.F / (p.k * denom)
    gamma = p.F * (2 * (p.d + weighted) + p.t - 1) / (p.k * denom)
    alpha = p.F * (2 * (p.d + plain) + p.t - 1) / (p.k * denom)
    return OperatingPoint(alpha, gamma, _witness(p, r, rho, beta, beta / 2))


def closed_form_point(p: SystemParams, kind: PointKind, r: Sequence[Number], rho: int) -> OperatingPoint:
    return mscr_point(p, r, rho) if kind is PointKind.MSCR else mbccr_point(p, r, rho)


def prop1_threshold(p: SystemParams, kind: PointKind, d_bar: Number, b_bar: Number) -> Fraction:
    d_bar, b_bar = as_fraction(d_bar), as_fraction(b_bar)
    if kind is PointKind.MSCR:
        num, den = d_bar + p.t - 1, b_bar + p.t - p.k
    else:
        num, den = 2 * d_bar + p.t - 1, 2 * b_bar + p.t - p.k
    if den <= 0:
        raise ValueError("threshold denominator must be positive")
    return num / den


def prop1_holds(p: SystemParams, r: Sequence[Number], rho: int, kind: PointKind) -> bool:
    """Aggregate weight condition ``sum(w r) <= w_bar * sum(r)`` over the first ``rho`` layers."""
    weighted, plain = _sums(p, r, rho)
    return weighted <= prop1_threshold(p, kind, p.d, p.d) * plain


def opt_bs_count(p: SystemParams, kind: PointKind) -> int:
    """Greedy count of layers worth using, scanning layers in cost order."""
    rho = 0
    d_bar = Fraction(p.d)
    b_bar = Fraction(p.d)
    for w_i, b_i in zip(p.w, p.b):
        if w_i > prop1_threshold(p, kind, d_bar, b_bar):
            break
        rho += 1
        d_bar += w_i * b_i
        b_bar += b_i
    return rho


def optimal_points(p: SystemParams) -> tuple[OperatingPoint, OperatingPoint]:
    """Optimal minimum-storage and minimum-bandwidth-cost points with ``r = b``."""
    mscr = mscr_point(p, p.b, opt_bs_count(p, PointKind.MSCR))
    mbccr = mbccr_point(p, p.b, opt_bs_count(p, PointKind.MBCCR))
    return mscr, mbccr


# -- general trade-off by linear programming ---------------------------------

@dataclass(frozen=True)
class LinearProgram:
    """LP in ``(beta, beta', z_1..z_rho)`` for one selector and one regime.

    ``wide_regime`` is True for ``beta >= 2 beta'`` (singleton groups bind).
    """

    rho: int
    wide_regime: bool
    objective: tuple[Fraction, ...]
    A_le: tuple[tuple[Fraction, ...], ...]
    b_le: tuple[Fraction, ...]
    A_ge: tuple[tuple[Fraction, ...], ...]
    b_ge: tuple[Fraction, ...]


def build_lp(p: SystemParams, alpha: Number, rho: int, wide_regime: bool) -> LinearProgram:
    alpha = as_fraction(alpha)
    nv = 2 + rho
    zero = Fraction(0)

    def row(beta=zero, beta_prime=zero, z=zero, z_at=None):
        out = [Fraction(beta), Fraction(beta_prime)] + [Fraction(0)] * rho
        for l in range(rho):
            if z_at is None or l == z_at:
                out[2 + l] = Fraction(z)
        return tuple(out)

    objective = (Fraction(p.d), Fraction(p.t - 1)) + tuple(p.w[:rho])

    A_ge, b_ge = [], []
    for g in range(p.k + 1):
        base_beta = g * (p.d - p.k + Fraction(g, 2))
        if wide_regime:
            cb, cbp = base_beta + Fraction(g, 2), Fraction(g * p.t - g)
        else:
            s = psi(g, p.t)
            cb, cbp = base_beta + Fraction(s, 2), Fraction(g * p.t - s)
        A_ge.append(row(cb, cbp, g))
        b_ge.append(p.F - alpha * (p.k - g))

    cap = p.F / p.d
    A_le = [row(1), row(0, 1)]
    b_le = [cap, cap]
    for l in range(rho):
        A_le.append(row(-p.b[l], 0, 1, z_at=l))
        b_le.append(zero)
    regime = row(1, -2)
    if wide_regime:
        A_ge.append(regime)
        b_ge.append(zero)
    else:
        A_le.append(regime)
        b_le.append(zero)
    assert all(len(r) == nv for r in A_le + A_ge)
    return LinearProgram(rho, wide_regime, objective, tuple(A_le), tuple(b_le),
                         tuple(A_ge), tuple(b_ge))


def _solve_point(p: SystemParams, alpha: Fraction, program: LinearProgram) -> OperatingPoint | None:
    try:
        res = lp.solve(program.objective, program.A_le, program.b_le, program.A_ge, program.b_ge)
    except lp.Infeasible:
        return None
    beta, beta_prime, *z = res.x
    r = [zl / beta if beta else Fraction(0) for zl in z] + [Fraction(0)] * (p.M - program.rho)
    witness = RepairVariables(beta, beta_prime, tuple(r), selector(program.rho, p.M))
    gamma = repair_cost(p, witness)
    if gamma != res.objective:
        raise AssertionError("LP objective disagrees with repair cost of its witness")
    return OperatingPoint(alpha, gamma, witness)


def min_cost_at_storage(p: SystemParams, alpha: Number) -> OperatingPoint:
    """Cheapest repair at storage ``alpha`` over every prefix selector and both regimes.

    Ties go to the smaller number of layers.
    """
    alpha = as_fraction(alpha)
    if alpha < p.F / p.k:
        raise ValueError(f"alpha={alpha} below the minimum storage F/k={p.F / p.k}")
    best: OperatingPoint | None = None
    for rho in range(p.M + 1):
        for wide in (False, True):
            pt = _solve_point(p, alpha, build_lp(p, alpha, rho, wide))
            if pt is not None and (best is None or pt.gamma < best.gamma):
                best = pt
    if best is None:
        raise lp.Infeasible(f"no feasible repair at alpha={alpha}")
    return best


def tradeoff_curve(p: SystemParams, grid_size: int,
                   alpha_max: Number | None = None) -> list[OperatingPoint]:
    """Sample the optimal cost on a uniform storage grid from ``F/k`` to ``alpha_max``.

    ``alpha_max`` defaults to the storage of the optimal minimum-bandwidth-cost point.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    lo = p.F / p.k
    hi = optimal_points(p)[1].alpha if alpha_max is None else as_fraction(alpha_max)
    if hi < lo:
        raise ValueError("alpha_max below F/k")
    step = (hi - lo) / (grid_size - 1)
    return [min_cost_at_storage(p, lo + i * step) for i in range(grid_size)]


def comparison_curves(p: SystemParams, grid_size: int) -> tuple[list[OperatingPoint], list[OperatingPoint]]:
    """BS-assisted and purely local curves sampled on one shared storage grid.

    The grid runs up to the larger of the two minimum-bandwidth storages so
    both curves reach their flat tail.
    """
    local = p.with_layers((), ())
    hi = max(optimal_points(p)[1].alpha, optimal_points(local)[1].alpha)
    return tradeoff_curve(p, grid_size, hi), tradeoff_curve(local, grid_size, hi)


@dataclass(frozen=True)
class BaselineCosts:
    no_coop_local: Fraction
    coop_local: Fraction
    coop_layer: Fraction
    full_layer: Fraction

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.no_coop_local, self.coop_local, self.coop_layer, self.full_layer)


def baseline_costs(p: SystemParams, beta: Number,
                   r: Sequence[Number] | None = None) -> BaselineCosts:
    """Per-newcomer cost of the four two-layer comparison schemes.

    ``r`` defaults to using both layers fully (``[1, 1]``).
    """
    if p.M != 2:
        raise ValueError("baseline comparison needs exactly two layers")
    beta = as_fraction(beta)
    if beta <= 0:
        raise ValueError("beta must be positive")
    r = (Fraction(1), Fraction(1)) if r is None else tuple(as_fraction(x) for x in r)
    rho = max((i + 1 for i, x in enumerate(r) if x != 0), default=0)
    alpha = p.F / p.k
    coop_layer = repair_cost(p, RepairVariables(beta, beta, r, selector(rho, 2)))
    from_bs = p.b[0] * beta
    full_layer = from_bs * p.w[0] + (alpha - from_bs) * p.w[1]
    return BaselineCosts(
        no_coop_local=p.F,
        coop_local=mscr_point(p, (0, 0), 0).gamma,
        coop_layer=coop_layer,
        full_layer=full_layer,
    )
