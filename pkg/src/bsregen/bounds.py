"""Repair cost and recoverable-file-size bounds.

Two independent routes compute the largest file a configuration can
protect: :func:`max_recoverable_file` uses the piecewise closed form over
the number ``g`` of repaired nodes in the collector, and
:func:`bound_via_compositions` enumerates every ordered repair-group
structure directly.  They must agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from .model import (
    Number,
    RepairVariables,
    SystemParams,
    as_fraction,
    variable_violations,
)

MAX_ENUMERATION_K = 12


@dataclass(frozen=True)
class CompositionVector:
    """``u0`` nodes cut at their storage edge, then repair groups in contact order."""

    u0: int
    groups: tuple[int, ...]

    @property
    def g(self) -> int:
        return sum(self.groups)


def _check_vars(p: SystemParams, v: RepairVariables) -> None:
    problems = variable_violations(p, v)
    if problems:
        raise ValueError("invalid repair variables: " + "; ".join(problems))


def repair_cost(p: SystemParams, v: RepairVariables) -> Fraction:
    """Bandwidth cost paid per newcomer: local, cooperative and weighted BS downloads."""
    _check_vars(p, v)
    bs = sum((w * r for w, r in zip(p.w, v.used_r())), Fraction(0))
    return p.d * v.beta + (p.t - 1) * v.beta_prime + bs * v.beta


def effective_d(p: SystemParams, v: RepairVariables) -> Fraction:
    return p.d + sum(v.used_r(), Fraction(0))


def psi(g: int, t: int) -> int:
    q = g // t
    return q * t * t + (g - q * t) ** 2


def phi(g: int, alpha: Number, beta: Number, beta_prime: Number,
        d_prime: Number, k: int, t: int) -> Fraction:
    alpha, beta, beta_prime, d_prime = map(as_fraction, (alpha, beta, beta_prime, d_prime))
    return (alpha * (k - g)
            + g * beta * (d_prime - k + Fraction(g, 2))
            + beta_prime * g * t)


def bound_at_g(g: int, p: SystemParams, v: RepairVariables, alpha: Number,
               psi_fn: Callable[[int, int], int] = psi) -> Fraction:
    """Closed-form file-size bound when ``g`` of the collector's nodes are repaired ones.

    ``psi_fn`` exists so verification sweeps can inject a faulty group-size term.
    """
    if not 0 <= g <= p.k:
        raise ValueError(f"g={g} outside [0, {p.k}]")
    base = phi(g, alpha, v.beta, v.beta_prime, effective_d(p, v), p.k, p.t)
    slack = v.beta / 2 - v.beta_prime
    if v.beta >= 2 * v.beta_prime:
        return base + g * slack
    return base + psi_fn(g, p.t) * slack


def max_recoverable_file(p: SystemParams, v: RepairVariables, alpha: Number,
                         psi_fn: Callable[[int, int], int] = psi) -> Fraction:
    """Largest file size recoverable by every collector; feasible iff ``>= F``."""
    return min(bound_at_g(g, p, v, alpha, psi_fn) for g in range(p.k + 1))


def compositions(k: int, t: int) -> Iterator[CompositionVector]:
    """All ``(u0, u_1..u_g)`` with ``u0 + sum(u) == k`` and each group in ``[1, t]``."""

    def ordered(rest: int) -> Iterator[tuple[int, ...]]:
        if rest == 0:
            yield ()
            return
        for first in range(1, min(t, rest) + 1):
            for tail in ordered(rest - first):
                yield (first,) + tail

    for u0 in range(k, -1, -1):
        for groups in ordered(k - u0):
            yield CompositionVector(u0, groups)


def composition_value(c: CompositionVector, p: SystemParams, v: RepairVariables,
                      alpha: Number) -> Fraction:
    """File size carried across the cut described by ``c``."""
    alpha = as_fraction(alpha)
    dp = effective_d(p, v)
    total = c.u0 * alpha
    prior = c.u0
    for u in c.groups:
        total += u * (dp - prior) * v.beta + u * (p.t - u) * v.beta_prime
        prior += u
    return total


def bound_via_compositions(p: SystemParams, v: RepairVariables, alpha: Number) -> Fraction:
    if p.k > MAX_ENUMERATION_K:
        raise ValueError(f"k={p.k} exceeds enumeration guard {MAX_ENUMERATION_K}")
    return min(composition_value(c, p, v, alpha) for c in compositions(p.k, p.t))
