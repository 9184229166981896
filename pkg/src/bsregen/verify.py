"""Cross-checks between the closed-form bound, composition enumeration and min-cuts."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .bounds import (
    bound_via_compositions,
    composition_value,
    compositions,
    max_recoverable_file,
    psi,
)
from .flowgraph import (
    build_history_graph,
    canonical_worst_history,
    max_flow,
    min_cut_over_collectors,
    random_history,
)
from .model import RepairVariables, SystemParams, selector

# BS supply edges carry F; keep it far above any sampled cut so it never binds.
ORACLE_FILE_SIZE = Fraction(10 ** 6)


@dataclass
class Report:
    checked: int = 0
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def as_dict(self) -> dict:
        return {"checked": self.checked, "counterexamples": self.counterexamples, "ok": self.ok}


def parameter_grid(max_k: int, max_t: int, max_M: int, extra_d: int = 2) -> Iterator[tuple[int, int, int, int]]:
    """(k, d, t, M) with d ranging over k..k+extra_d."""
    for k in range(1, max_k + 1):
        for t in range(1, max_t + 1):
            for d in range(k, k + extra_d + 1):
                for M in range(max_M + 1):
                    yield k, d, t, M


def sample_variables(rng: random.Random, M: int, coop_cap: bool = False) -> tuple[RepairVariables, Fraction]:
    """Random rational (beta, beta', r, alpha); ``coop_cap`` keeps beta' <= beta."""
    beta = Fraction(rng.randint(0, 12), rng.randint(1, 4))
    if coop_cap:
        beta_prime = beta * Fraction(rng.randint(0, 6), 6)
    else:
        beta_prime = Fraction(rng.randint(0, 12), rng.randint(1, 4))
    r = tuple(Fraction(rng.randint(0, 4), 4) for _ in range(M))
    alpha = Fraction(rng.randint(0, 24), rng.randint(1, 4))
    return RepairVariables(beta, beta_prime, r, selector(M, M)), alpha


def composition_sweep(max_k: int = 6, max_t: int = 3, max_M: int = 2, samples: int = 5,
                      seed: int = 0, psi_fn: Callable[[int, int], int] = psi) -> Report:
    """Closed form versus enumeration on every grid point and sampled variables."""
    rng = random.Random(seed)
    report = Report()
    for k, d, t, M in parameter_grid(max_k, max_t, max_M):
        p = SystemParams(d + t, k, d, t, (1,) * M, (1,) * M, 1)
        for _ in range(samples):
            v, alpha = sample_variables(rng, M)
            closed = max_recoverable_file(p, v, alpha, psi_fn)
            enumerated = bound_via_compositions(p, v, alpha)
            report.checked += 1
            if closed != enumerated:
                report.counterexamples.append({
                    "k": k, "d": d, "t": t, "M": M, "alpha": str(alpha),
                    "beta": str(v.beta), "beta_prime": str(v.beta_prime),
                    "r": [str(x) for x in v.r],
                    "closed_form": str(closed), "enumerated": str(enumerated),
                })
    return report


def small_parameter_sets(max_n: int = 6, max_k: int = 4, max_t: int = 3,
                         max_M: int = 2) -> Iterator[SystemParams]:
    for n in range(2, max_n + 1):
        for t in range(1, max_t + 1):
            for k in range(1, max_k + 1):
                for d in range(k, n - t + 1):
                    for M in range(max_M + 1):
                        yield SystemParams(n, k, d, t, (1,) * M, (1,) * M, ORACLE_FILE_SIZE)


def flow_sweep(samples: int = 2, histories: int = 2, max_rounds: int = 3, seed: int = 0,
               max_n: int = 6, max_k: int = 4, max_t: int = 3, max_M: int = 2) -> tuple[Report, Report]:
    """(tightness, soundness) reports over small parameter sets.

    Tightness: the best canonical history's min-cut equals the enumerated
    bound, and no canonical history beats its own composition value.
    Soundness: random histories never cut below the bound.  Samples keep
    ``beta' <= beta``; see :func:`coop_overflow_example` for why.
    """
    rng = random.Random(seed)
    tight, sound = Report(), Report()
    for p in small_parameter_sets(max_n, max_k, max_t, max_M):
        for _ in range(samples):
            v, alpha = sample_variables(rng, p.M, coop_cap=True)
            bound = bound_via_compositions(p, v, alpha)
            best = None
            for comp in compositions(p.k, p.t):
                h = canonical_worst_history(p, comp)
                cut = max_flow(build_history_graph(p, v, h, alpha), h.collector)
                value = composition_value(comp, p, v, alpha)
                tight.checked += 1
                if cut > value:
                    tight.counterexamples.append(_flow_case(p, v, alpha, comp=comp, cut=cut, value=value))
                best = cut if best is None else min(best, cut)
            if best != bound:
                tight.counterexamples.append(_flow_case(p, v, alpha, best=best, bound=bound))
            for _ in range(histories):
                h = random_history(p, rng.randint(0, max_rounds), rng)
                cut = min_cut_over_collectors(build_history_graph(p, v, h, alpha), p)
                sound.checked += 1
                if cut < bound:
                    sound.counterexamples.append(_flow_case(p, v, alpha, cut=cut, bound=bound,
                                                            history=[r.failed for r in h.rounds]))
    return tight, sound


def _flow_case(p: SystemParams, v: RepairVariables, alpha: Fraction, **extra) -> dict:
    out = {"n": p.n, "k": p.k, "d": p.d, "t": p.t, "M": p.M, "alpha": str(alpha),
           "beta": str(v.beta), "beta_prime": str(v.beta_prime), "r": [str(x) for x in v.r]}
    for key, val in extra.items():
        out[key] = val if isinstance(val, (int, list)) else str(val)
    return out


def coop_overflow_example() -> tuple[Fraction, Fraction]:
    """(min-cut, bound) for a graph where peers forward more than they received.

    With ``beta = 0`` and ``beta' > 0`` a newcomer's peer has no information to
    pass on, so the cooperative term of the bound overstates the cut.
    """
    p = SystemParams(4, 1, 2, 2, (), (), ORACLE_FILE_SIZE)
    v = RepairVariables(Fraction(0), Fraction(1), (), selector(0, 0))
    alpha = Fraction(4)
    h = canonical_worst_history(p, next(c for c in compositions(1, 2) if c.groups == (1,)))
    cut = max_flow(build_history_graph(p, v, h, alpha), h.collector)
    return cut, bound_via_compositions(p, v, alpha)


def perturbed_psi(g: int, t: int) -> int:
    return psi(g, t) + (1 if g else 0)

