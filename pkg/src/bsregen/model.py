"""Shared domain types for base-station assisted cooperative repair.

Every quantity that feeds a bound or a cost is held as a
:class:`fractions.Fraction`.  Decimals given by callers (``0.75``,
``"1.84"``) are converted through their decimal string so that ``0.1``
becomes exactly ``1/10`` rather than the nearest binary float.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

Number = Union[int, float, str, Fraction]


def as_fraction(x: Number) -> Fraction:
    """Convert ``x`` to an exact rational, going through ``str`` for floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def _fractions(xs: Iterable[Number]) -> tuple[Fraction, ...]:
    return tuple(as_fraction(x) for x in xs)


@dataclass(frozen=True)
class SystemParams:
    """The (n, k, d, t, M, w, b, F) tuple describing one deployment.

    ``M`` is implied by ``len(w)``; ``w`` and ``b`` must have equal length.
    """

    n: int
    k: int
    d: int
    t: int
    w: tuple[Fraction, ...] = ()
    b: tuple[Fraction, ...] = ()
    F: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", _fractions(self.w))
        object.__setattr__(self, "b", _fractions(self.b))
        object.__setattr__(self, "F", as_fraction(self.F))
        if len(self.w) != len(self.b):
            raise ValueError(f"w has {len(self.w)} layers but b has {len(self.b)}")

    @property
    def M(self) -> int:
        return len(self.w)

    def with_layers(self, w: Sequence[Number], b: Sequence[Number]) -> "SystemParams":
        return SystemParams(self.n, self.k, self.d, self.t, tuple(w), tuple(b), self.F)


def validate_params(p: SystemParams) -> list[str]:
    """Return every violated invariant of ``p``; an empty list means valid."""
    problems: list[str] = []
    if p.t < 1:
        problems.append("t >= 1")
    if p.k < 1:
        problems.append("k >= 1")
    if p.k > p.n:
        problems.append("k <= n")
    if p.d < p.k:
        problems.append("k <= d")
    if p.d > p.n - p.t:
        problems.append("d <= n - t")
    if any(wl < 1 for wl in p.w):
        problems.append("w_l >= 1")
    if any(a > b for a, b in zip(p.w, p.w[1:])):
        problems.append("w non-descending")
    if any(bl < 0 for bl in p.b):
        problems.append("b_l >= 0")
    if p.F <= 0:
        problems.append("F > 0")
    return problems


class InvalidParams(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("invalid parameters: " + "; ".join(problems))
        self.problems = problems


def require_valid(p: SystemParams) -> None:
    problems = validate_params(p)
    if problems:
        raise InvalidParams(problems)


@dataclass(frozen=True)
class LayerSelector:
    rho: int
    s: tuple[int, ...]

    @property
    def M(self) -> int:
        return len(self.s)


def selector(rho: int, M: int) -> LayerSelector:
    """Prefix-of-ones selector using the first ``rho`` of ``M`` layers."""
    if not 0 <= rho <= M:
        raise ValueError(f"rho={rho} outside [0, {M}]")
    return LayerSelector(rho, (1,) * rho + (0,) * (M - rho))


@dataclass(frozen=True)
class RepairVariables:
    """One candidate operating assignment.

    ``r[l]`` is the BS download of layer ``l`` as a fraction of ``beta``;
    layers switched off by the selector must carry ``r[l] == 0``.
    """

    beta: Fraction
    beta_prime: Fraction
    r: tuple[Fraction, ...]
    selector: LayerSelector

    def __post_init__(self) -> None:
        object.__setattr__(self, "beta", as_fraction(self.beta))
        object.__setattr__(self, "beta_prime", as_fraction(self.beta_prime))
        object.__setattr__(self, "r", _fractions(self.r))
        if len(self.r) != self.selector.M:
            raise ValueError("r and selector disagree on the number of layers")

    @classmethod
    def make(cls, beta: Number, beta_prime: Number, r: Sequence[Number] = (),
             rho: int | None = None) -> "RepairVariables":
        """Build variables, deriving ``rho`` from the last nonzero ``r`` if omitted."""
        r = _fractions(r)
        if rho is None:
            rho = max((i + 1 for i, x in enumerate(r) if x != 0), default=0)
        return cls(beta, beta_prime, r, selector(rho, len(r)))

    def used_r(self) -> tuple[Fraction, ...]:
        return tuple(x * s for x, s in zip(self.r, self.selector.s))


def variable_violations(p: SystemParams, v: RepairVariables) -> list[str]:
    problems = []
    if v.selector.M != p.M:
        problems.append("variables have wrong number of layers")
        return problems
    cap = p.F / p.d
    if not 0 <= v.beta <= cap:
        problems.append("0 <= beta <= F/d")
    if not 0 <= v.beta_prime <= cap:
        problems.append("0 <= beta' <= F/d")
    for rl, bl, sl in zip(v.r, p.b, v.selector.s):
        if not 0 <= rl <= bl:
            problems.append("0 <= r_l <= b_l")
            break
        if sl == 0 and rl != 0:
            problems.append("r_l = 0 where s_l = 0")
            break
    return problems


@dataclass(frozen=True)
class OperatingPoint:
    alpha: Fraction
    gamma: Fraction
    witness: RepairVariables

    @property
    def rho(self) -> int:
        return self.witness.selector.rho


@dataclass
class CostLedger:
    """Chunk counts by source, priced at ``symbol_size`` per chunk."""

    weights: tuple[Fraction, ...]
    symbol_size: Fraction
    local_symbols: int = 0
    coop_symbols: int = 0
    bs_symbols: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.weights = _fractions(self.weights)
        self.symbol_size = as_fraction(self.symbol_size)
        if not self.bs_symbols:
            self.bs_symbols = [0] * len(self.weights)

    @property
    def total_symbols(self) -> int:
        return self.local_symbols + self.coop_symbols + sum(self.bs_symbols)

    @property
    def data_moved(self) -> Fraction:
        return self.symbol_size * self.total_symbols

    @property
    def total_cost(self) -> Fraction:
        weighted = sum((w * c for w, c in zip(self.weights, self.bs_symbols)), Fraction(0))
        return self.symbol_size * (self.local_symbols + self.coop_symbols + weighted)

    def merge(self, other: "CostLedger") -> None:
        if other.weights != self.weights or other.symbol_size != self.symbol_size:
            raise ValueError("cannot merge ledgers priced differently")
        self.local_symbols += other.local_symbols
        self.coop_symbols += other.coop_symbols
        self.bs_symbols = [a + b for a, b in zip(self.bs_symbols, other.bs_symbols)]
