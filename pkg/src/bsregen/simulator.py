"""Lazy-repair lifecycle simulation on top of the codec.

Departures accumulate in a pending set and nothing is repaired until
exactly ``t`` nodes are missing, at which point the codec regenerates all
of them together.  Failures come either from an explicit script or from a
seeded generator, so every trace can be replayed byte for byte.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .codec import (
    BaseStationStore,
    CodecError,
    CodecInstance,
    NodeStore,
    codec_new,
    collect,
    encode,
    ledger_cost,
    repair,
)
from .gf import GF
from .model import CostLedger, Number, as_fraction

log = logging.getLogger(__name__)

EXHAUSTIVE_SUBSETS = 64


@dataclass(frozen=True)
class Scenario:
    n: int
    k: int
    t: int
    rho: int
    w: tuple[Fraction, ...] = ()
    F: Fraction = Fraction(1)
    script: tuple[tuple[int, ...], ...] | None = None  # per step: ids that depart
    seed: int = 0
    departure_rate: float = 0.5   # chance of one departure per idle tick
    rounds: int = 0               # repair rounds to run when unscripted
    verify_every: int = 1         # 0 disables durability checks
    file_size: int = 4096         # bytes of seeded random payload
    random_helpers: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", tuple(as_fraction(x) for x in self.w))
        object.__setattr__(self, "F", as_fraction(self.F))
        if len(self.w) < self.rho:
            raise ValueError(f"need weights for {self.rho} layers")
        if self.script is not None:
            object.__setattr__(self, "script", tuple(tuple(s) for s in self.script))


@dataclass
class ClusterState:
    codec: CodecInstance
    original: bytes
    alive: dict[int, NodeStore]
    base_stations: tuple[BaseStationStore, ...]
    pending: set[int] = field(default_factory=set)
    round: int = 0
    ledger: CostLedger | None = None
    seed: int = 0


@dataclass
class Trace:
    records: list[dict] = field(default_factory=list)
    state: ClusterState | None = None
    error: str | None = None


def verify_durability(state: ClusterState, exhaustive: bool | None = None,
                      samples: int = 16, rng: random.Random | None = None) -> bool:
    """True iff every checked k-subset of alive nodes decodes to the original file."""
    c = state.codec
    ids = sorted(state.alive)
    if len(ids) < c.k:
        return False
    subsets = list(itertools.combinations(ids, c.k))
    if exhaustive is None:
        exhaustive = len(subsets) <= EXHAUSTIVE_SUBSETS
    if not exhaustive:
        rng = rng or random.Random(state.seed)
        subsets = rng.sample(subsets, min(samples, len(subsets)))
    for subset in subsets:
        try:
            if collect(c, [state.alive[j] for j in subset]) != state.original:
                return False
        except CodecError:
            return False
    return True


def _fmt(x: Fraction) -> dict:
    return {"value": float(x), "exact": f"{x.numerator}/{x.denominator}"}


def _repair_round(s: Scenario, state: ClusterState, rng: random.Random, trace: Trace) -> None:
    c = state.codec
    failed = sorted(state.pending)
    survivors = sorted(state.alive)
    if len(survivors) < c.k:
        raise CodecError(f"cluster lost: {len(survivors)} alive nodes, need {c.k}")
    if s.random_helpers:
        helpers = {j: tuple(sorted(rng.sample(survivors, c.k))) for j in failed}
    else:
        helpers = {j: tuple(survivors[:c.k]) for j in failed}
    session = repair(c, state.alive, failed, state.base_stations, helpers)
    per_newcomer = ledger_cost(session, s.w, s.F)
    round_ledger = session.total_ledger(s.w, s.F)
    if state.ledger is None:
        state.ledger = round_ledger
    else:
        state.ledger.merge(round_ledger)
    state.alive.update(session.stores)
    state.pending.clear()
    state.round += 1
    record = {
        "round": state.round,
        "failed": failed,
        "helpers": {str(j): list(h) for j, h in helpers.items()},
        "newcomers": [dict(id=j, **session.counts(j)) for j in failed],
        "cost_per_newcomer": _fmt(per_newcomer),
        "cost": _fmt(round_ledger.total_cost),
    }
    if s.verify_every and state.round % s.verify_every == 0:
        record["durable"] = verify_durability(state, rng=rng)
    trace.records.append(record)
    log.debug("round %d repaired %s at cost %s", state.round, failed, per_newcomer)


def _depart(state: ClusterState, ids: Sequence[int]) -> None:
    for j in ids:
        if j not in state.alive:
            raise CodecError(f"node {j} is not alive")
        del state.alive[j]
        state.pending.add(j)


def run(s: Scenario, field: GF | None = None, data: bytes | None = None) -> Trace:
    rng = random.Random(s.seed)
    c = codec_new(s.n, s.k, s.t, s.rho, field)
    original = data if data is not None else rng.randbytes(s.file_size)
    enc = encode(c, original)
    state = ClusterState(c, original, dict(enc.nodes), enc.base_stations, seed=s.seed)
    trace = Trace(state=state)
    try:
        if s.script is not None:
            for step in s.script:
                _depart(state, step)
                if len(state.pending) > s.t:
                    raise CodecError(f"{len(state.pending)} pending losses exceed t={s.t}")
                if len(state.pending) == s.t:
                    _repair_round(s, state, rng, trace)
        else:
            if not 0 < s.departure_rate <= 1 and s.rounds:
                raise ValueError("departure_rate must lie in (0, 1]")
            while state.round < s.rounds:
                if rng.random() < s.departure_rate:
                    _depart(state, [rng.choice(sorted(state.alive))])
                    if len(state.pending) == s.t:
                        _repair_round(s, state, rng, trace)
    except CodecError as exc:
        trace.error = str(exc)
    return trace
