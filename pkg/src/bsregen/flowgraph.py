"""Information flow graphs for BS-assisted cooperative repair.

A graph is built from a concrete repair history: stage-0 storage nodes
fed by the source, then one stage per repair round in which each of the
``t`` newcomers is a chain In -> Coop1 -> Coop2 -> Out.  Base stations
sit on a supply chain from the source and feed newcomers' Coop1 vertex.
Max-flow is computed exactly over rationals; infinite capacities are
replaced by a finite value larger than any finite cut.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .bounds import CompositionVector
from .model import Number, RepairVariables, SystemParams, as_fraction

INF = float("inf")


class FlowNode(NamedTuple):
    kind: str   # Source, BS, In, Coop1, Coop2, Out, Collector
    stage: int
    index: int

    def label(self) -> str:
        if self.kind == "Source":
            return "S"
        if self.kind == "Collector":
            return "DC"
        if self.kind == "BS":
            return f"BS{self.index}"
        return f"{self.kind}{self.index}@{self.stage}"


SOURCE = FlowNode("Source", -1, 0)
COLLECTOR = FlowNode("Collector", -1, 0)


@dataclass(frozen=True)
class RepairRound:
    failed: tuple[int, ...]
    helpers: dict[int, tuple[int, ...]]
    r: dict[int, tuple[Fraction, ...]] = field(default_factory=dict)  # per-newcomer override


@dataclass(frozen=True)
class RepairHistory:
    rounds: tuple[RepairRound, ...] = ()
    collector: tuple[int, ...] | None = None  # suggested worst-case collector slots


class HistoryError(ValueError):
    pass


@dataclass
class FlowGraph:
    nodes: list[FlowNode] = field(default_factory=list)
    edges: dict[tuple[FlowNode, FlowNode], Fraction | float] = field(default_factory=dict)
    alive: dict[int, FlowNode] = field(default_factory=dict)  # slot -> current Out vertex

    def add_node(self, node: FlowNode) -> FlowNode:
        self.nodes.append(node)
        return node

    def add_edge(self, u: FlowNode, v: FlowNode, cap) -> None:
        if (u, v) in self.edges:
            raise ValueError(f"duplicate edge {u.label()} -> {v.label()}")
        if cap != INF:
            cap = as_fraction(cap)
            if cap < 0:
                raise ValueError("negative capacity")
        self.edges[(u, v)] = cap

    def count(self, kind: str) -> int:
        return sum(1 for n in self.nodes if n.kind == kind)

    def to_dot(self) -> str:
        """Graphviz text: one line per vertex and per capacity-labelled edge."""
        lines = ["digraph flow {"]
        for n in self.nodes:
            lines.append(f'  "{n.label()}";')
        for (u, v), cap in self.edges.items():
            text = "inf" if cap == INF else str(cap)
            lines.append(f'  "{u.label()}" -> "{v.label()}" [label="{text}"];')
        lines.append("}")
        return "\n".join(lines)


def build_history_graph(p: SystemParams, v: RepairVariables, h: RepairHistory,
                        alpha: Number) -> FlowGraph:
    alpha = as_fraction(alpha)
    g = FlowGraph()
    g.add_node(SOURCE)

    bs_nodes = [g.add_node(FlowNode("BS", -1, l + 1)) for l in range(p.M)]
    if bs_nodes:
        g.add_edge(SOURCE, bs_nodes[-1], p.F)
        for upper, lower in zip(bs_nodes[:0:-1], bs_nodes[-2::-1]):
            g.add_edge(upper, lower, p.F)

    for j in range(1, p.n + 1):
        x_in = g.add_node(FlowNode("In", 0, j))
        x_out = g.add_node(FlowNode("Out", 0, j))
        g.add_edge(SOURCE, x_in, alpha)
        g.add_edge(x_in, x_out, INF)
        g.alive[j] = x_out

    default_r = v.used_r()
    for stage, rnd in enumerate(h.rounds, start=1):
        failed = tuple(rnd.failed)
        if len(failed) != p.t or len(set(failed)) != p.t:
            raise HistoryError(f"round {stage}: need {p.t} distinct failures, got {failed}")
        if any(j not in g.alive for j in failed):
            raise HistoryError(f"round {stage}: unknown slot in {failed}")
        coop1 = {}
        coop2 = {}
        for j in failed:
            helpers = tuple(rnd.helpers.get(j, ()))
            if len(helpers) != p.d or len(set(helpers)) != p.d:
                raise HistoryError(f"round {stage}: newcomer {j} needs {p.d} distinct helpers")
            if any(x in failed or x not in g.alive for x in helpers):
                raise HistoryError(f"round {stage}: newcomer {j} uses a dead helper")
            x_in = g.add_node(FlowNode("In", stage, j))
            c1 = g.add_node(FlowNode("Coop1", stage, j))
            c2 = g.add_node(FlowNode("Coop2", stage, j))
            for x in helpers:
                g.add_edge(g.alive[x], x_in, v.beta)
            g.add_edge(x_in, c1, INF)
            g.add_edge(c1, c2, INF)
            r = rnd.r.get(j, default_r)
            for bs, rl in zip(bs_nodes, r):
                if rl:
                    g.add_edge(bs, c1, as_fraction(rl) * v.beta)
            coop1[j], coop2[j] = c1, c2
        for j in failed:
            for j2 in failed:
                if j != j2 and v.beta_prime:
                    g.add_edge(coop1[j], coop2[j2], v.beta_prime)
        for j in failed:
            x_out = g.add_node(FlowNode("Out", stage, j))
            g.add_edge(coop2[j], x_out, alpha)
            g.alive[j] = x_out
    return g


def _max_flow(edges: dict, source, sink):
    """Edmonds-Karp; returns (value, flow per original edge)."""
    finite = sum((c for c in edges.values() if c != INF), Fraction(0))
    big = finite + 1
    cap: dict = {}
    adj: dict = {}
    for (u, v), c in edges.items():
        c = big if c == INF else c
        cap[(u, v)] = cap.get((u, v), Fraction(0)) + c
        cap.setdefault((v, u), Fraction(0))
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    order = {n: i for i, n in enumerate(adj)}
    adj = {u: sorted(vs, key=order.__getitem__) for u, vs in adj.items()}
    total = Fraction(0)
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v in adj.get(u, ()):
                if v not in parent and cap[(u, v)] > 0:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            break
        path = []
        v = sink
        while parent[v] is not None:
            path.append((parent[v], v))
            v = parent[v]
        push = min(cap[e] for e in path)
        for u, v in path:
            cap[(u, v)] -= push
            cap[(v, u)] += push
        total += push
    if total >= big:
        raise ValueError("unbounded flow: collector reachable through infinite edges only")
    flows = {}
    for (u, v), c in edges.items():
        c = big if c == INF else c
        flows[(u, v)] = max(Fraction(0), c - cap[(u, v)]) if (v, u) not in edges else None
    return total, flows


def max_flow(g: FlowGraph, collector: Iterable[int], with_flows: bool = False):
    """Max-flow from the source to a collector attached to the given alive slots."""
    slots = tuple(collector)
    if len(set(slots)) != len(slots):
        raise ValueError("collector slots must be distinct")
    for s in slots:
        if s not in g.alive:
            raise ValueError(f"slot {s} is not alive in this graph")
    edges = dict(g.edges)
    for s in slots:
        edges[(g.alive[s], COLLECTOR)] = INF
    value, flows = _max_flow(edges, SOURCE, COLLECTOR)
    return (value, flows) if with_flows else value


def min_cut_over_collectors(g: FlowGraph, p: SystemParams) -> Fraction:
    slots = sorted(g.alive)
    if len(slots) < p.k:
        raise ValueError("fewer than k alive nodes")
    return min(max_flow(g, c) for c in itertools.combinations(slots, p.k))


def canonical_worst_history(p: SystemParams, composition: CompositionVector) -> RepairHistory:
    """History whose natural collector cuts exactly along ``composition``.

    ``u0`` initial nodes join the collector first.  In round ``j``, ``t``
    non-collector slots fail; the first ``u_j`` of them join the collector
    and every newcomer takes all earlier collector members as helpers,
    topping up with non-collector survivors.
    """
    if composition.u0 + composition.g != p.k:
        raise ValueError("composition does not sum to k")
    if any(not 1 <= u <= p.t for u in composition.groups):
        raise ValueError("group sizes must lie in [1, t]")
    collector = list(range(1, composition.u0 + 1))
    rounds = []
    for u in composition.groups:
        outside = [j for j in range(1, p.n + 1) if j not in collector]
        need_extra = p.d - len(collector)
        if len(outside) < p.t + need_extra or need_extra < 0:
            raise ValueError("not enough distinct nodes for this composition")
        failed = tuple(outside[:p.t])
        helpers = tuple(collector) + tuple(outside[p.t:p.t + need_extra])
        rounds.append(RepairRound(failed, {j: helpers for j in failed}))
        collector.extend(failed[:u])
    return RepairHistory(tuple(rounds), tuple(collector))


def random_history(p: SystemParams, rounds: int, rng) -> RepairHistory:
    out = []
    for _ in range(rounds):
        failed = tuple(sorted(rng.sample(range(1, p.n + 1), p.t)))
        live = [j for j in range(1, p.n + 1) if j not in failed]
        out.append(RepairRound(failed, {j: tuple(sorted(rng.sample(live, p.d))) for j in failed}))
    return RepairHistory(tuple(out))


def bs_edge_flows(g: FlowGraph, flows: dict) -> list[tuple[FlowNode, FlowNode, Fraction, Fraction]]:
    """(bs, coop1, flow, capacity) for every BS supply edge into a newcomer."""
    out = []
    for (u, v), cap in g.edges.items():
        if u.kind == "BS" and v.kind == "Coop1":
            out.append((u, v, flows[(u, v)], cap))
    return out


def history_from_rounds(rounds: Sequence[tuple[Sequence[int], dict[int, Sequence[int]]]]) -> RepairHistory:
    return RepairHistory(tuple(RepairRound(tuple(f), {j: tuple(h) for j, h in hs.items()})
                               for f, hs in rounds))
