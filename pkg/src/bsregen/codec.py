"""Exact minimum-storage code with base-station assisted cooperative repair.

The file is cut into ``k(t + rho)`` chunks arranged as a ``(t + rho) x k``
message matrix ``M``.  Node ``j`` stores column ``j`` of ``M G``; base
station ``l`` keeps message row ``t + l`` and, since ``G`` is public,
can serve ``m_{t+l} . g_j`` for whichever node asks.

Repairing ``t`` simultaneous losses runs three phases per newcomer (the
newcomer of rank ``l`` among the failed ids owns message row ``l``):

1. download row ``l`` from ``k`` helpers and invert to recover ``m_l``;
2. send ``m_l . g_j`` to every other newcomer ``j``;
3. fetch one chunk from each of the ``rho`` base stations.

Phases 2 and 3 commute.  Node ids are 1-based throughout.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .gf import GF, Matrix, SingularMatrix, field as gf_field, mat_inv, vandermonde
from .model import CostLedger, Number, as_fraction

LENGTH_HEADER = 8
MAGIC = b"BSRG"
_HEADER = struct.Struct("<4sBBIBIHHHHHIB")  # magic ver kind p q poly n k t rho id chunk_len width


class CodecError(Exception):
    pass


class CorruptionError(CodecError):
    pass


@dataclass(frozen=True, eq=False)
class CodecInstance:
    n: int
    k: int
    t: int
    rho: int
    field: GF
    generators: tuple[Matrix, ...]  # one k x n generator per message row

    @property
    def G(self) -> Matrix:
        return self.generators[0]

    @property
    def d(self) -> int:
        return self.k

    @property
    def rows(self) -> int:
        return self.t + self.rho

    @property
    def chunk_count(self) -> int:
        return self.k * self.rows

    @property
    def chunk_fraction(self) -> Fraction:
        """Size of one chunk as a fraction of the file."""
        return Fraction(1, self.chunk_count)

    def chunk_size(self, F: Number = 1) -> Fraction:
        return as_fraction(F) * self.chunk_fraction

    def symbol_width(self) -> int:
        return 1 if self.field.order <= 256 else 2


def codec_new(n: int, k: int, t: int, rho: int, field: GF | None = None,
              generators: Sequence[Matrix] | None = None) -> CodecInstance:
    """Build an instance; by default every row shares a Vandermonde generator."""
    f = gf_field() if field is None else field
    if k < 1 or t < 1 or rho < 0:
        raise CodecError("need k >= 1, t >= 1, rho >= 0")
    if k > n - t:
        raise CodecError(f"need k <= n - t, got k={k}, n={n}, t={t}")
    if n > f.order:
        raise CodecError(f"n={n} exceeds the field order {f.order}")
    if generators is None:
        G = vandermonde(k, n, f)
        gens = (G,) * (t + rho)
    else:
        gens = tuple(generators)
        if len(gens) != t + rho:
            raise CodecError("need one generator per message row")
        for G in gens:
            if G.field != f or (G.rows, G.cols) != (k, n):
                raise CodecError("generator has wrong shape or field")
    return CodecInstance(n, k, t, rho, f, gens)


@dataclass(frozen=True, eq=False)
class NodeStore:
    node_id: int
    chunks: np.ndarray  # (t + rho, chunk_len)

    def __eq__(self, other) -> bool:
        return (isinstance(other, NodeStore) and self.node_id == other.node_id
                and np.array_equal(self.chunks, other.chunks))


@dataclass(frozen=True, eq=False)
class BaseStationStore:
    layer: int
    row: np.ndarray  # (k, chunk_len): message row t + layer

    def __eq__(self, other) -> bool:
        return (isinstance(other, BaseStationStore) and self.layer == other.layer
                and np.array_equal(self.row, other.row))

    def serve(self, c: CodecInstance, node_id: int) -> np.ndarray:
        G = c.generators[c.t + self.layer - 1]
        return c.field.combine(G.column(node_id - 1), self.row)


@dataclass(frozen=True)
class Encoded:
    nodes: dict[int, NodeStore]
    base_stations: tuple[BaseStationStore, ...]


def encode_symbols(c: CodecInstance, message: np.ndarray) -> Encoded:
    """Encode a ``(t + rho, k, L)`` array of field symbols."""
    message = np.asarray(message, dtype=np.int64)
    if message.shape[:2] != (c.rows, c.k) or message.ndim != 3:
        raise CodecError(f"message must have shape ({c.rows}, {c.k}, L)")
    f = c.field
    nodes = {}
    for j in range(1, c.n + 1):
        col = np.stack([f.combine(c.generators[i].column(j - 1), message[i]) for i in range(c.rows)])
        nodes[j] = NodeStore(j, col)
    bss = tuple(BaseStationStore(l, message[c.t + l - 1].copy()) for l in range(1, c.rho + 1))
    return Encoded(nodes, bss)


def _require_bytes_field(c: CodecInstance) -> None:
    if c.field.order < 256:
        raise CodecError("byte files need a field with at least 256 elements")


def encode(c: CodecInstance, data: bytes) -> Encoded:
    """Encode a byte string: 8-byte length header, zero padding, one byte per symbol."""
    if not data:
        raise CodecError("cannot encode an empty file")
    _require_bytes_field(c)
    payload = len(data).to_bytes(LENGTH_HEADER, "little") + data
    pad = -len(payload) % c.chunk_count
    payload += b"\0" * pad
    chunk_len = len(payload) // c.chunk_count
    message = np.frombuffer(payload, dtype=np.uint8).astype(np.int64).reshape(c.rows, c.k, chunk_len)
    return encode_symbols(c, message)


def _unique_stores(stores: Iterable[NodeStore]) -> list[NodeStore]:
    stores = list(stores)
    ids = [s.node_id for s in stores]
    if len(set(ids)) != len(ids):
        raise CodecError(f"duplicate node ids in {ids}")
    return stores


def decode_symbols(c: CodecInstance, stores: Iterable[NodeStore]) -> np.ndarray:
    """Recover the message matrix from any ``k`` stores; extra stores are cross-checked."""
    stores = _unique_stores(stores)
    if len(stores) < c.k:
        raise CodecError(f"need {c.k} stores, got {len(stores)}")
    use, extra = stores[:c.k], stores[c.k:]
    ids = [s.node_id - 1 for s in use]
    f = c.field
    rows = []
    for i in range(c.rows):
        try:
            inv = mat_inv(c.generators[i].columns(ids))
        except SingularMatrix as exc:
            raise CodecError("selected columns are not invertible") from exc
        y = np.stack([s.chunks[i] for s in use])
        rows.append(np.stack([f.combine(inv.column(a), y) for a in range(c.k)]))
    message = np.stack(rows)
    if extra:
        again = encode_symbols(c, message)
        for s in extra:
            if again.nodes[s.node_id] != s:
                raise CorruptionError(f"node {s.node_id} disagrees with the decoded file")
    return message


def collect(c: CodecInstance, stores: Iterable[NodeStore]) -> bytes:
    """Rebuild the original bytes from any ``k`` stores (more are used for verification)."""
    _require_bytes_field(c)
    message = decode_symbols(c, stores)
    payload = message.astype(np.uint8).tobytes()
    length = int.from_bytes(payload[:LENGTH_HEADER], "little")
    if length > len(payload) - LENGTH_HEADER:
        raise CorruptionError("length header exceeds the payload")
    return payload[LENGTH_HEADER:LENGTH_HEADER + length]


# -- repair ---------------------------------------------------------------

@dataclass(frozen=True)
class Transfer:
    newcomer: int
    kind: str        # "local", "coop" or "bs"
    source: int      # helper node id, peer newcomer id, or BS layer
    row: int         # 1-based message row this chunk belongs to
    phase: int


@dataclass
class RepairSession:
    failed: tuple[int, ...]
    helpers: dict[int, tuple[int, ...]]
    transcript: list[Transfer] = field(default_factory=list)
    stores: dict[int, NodeStore] = field(default_factory=dict)
    rho: int = 0
    chunk_fraction: Fraction = Fraction(1)

    def counts(self, newcomer: int) -> dict:
        local = sum(1 for x in self.transcript if x.newcomer == newcomer and x.kind == "local")
        coop = sum(1 for x in self.transcript if x.newcomer == newcomer and x.kind == "coop")
        bs = [sum(1 for x in self.transcript
                  if x.newcomer == newcomer and x.kind == "bs" and x.source == l)
              for l in range(1, self.rho + 1)]
        return {"local": local, "coop": coop, "bs": bs}

    def ledger(self, newcomer: int, w: Sequence[Number], F: Number = 1) -> CostLedger:
        if len(w) < self.rho:
            raise ValueError(f"need weights for {self.rho} layers")
        cnt = self.counts(newcomer)
        return CostLedger(tuple(w[:self.rho]), as_fraction(F) * self.chunk_fraction,
                          cnt["local"], cnt["coop"], list(cnt["bs"]))

    def total_ledger(self, w: Sequence[Number], F: Number = 1) -> CostLedger:
        total = self.ledger(self.failed[0], w, F)
        for j in self.failed[1:]:
            total.merge(self.ledger(j, w, F))
        return total


def default_helpers(c: CodecInstance, failed: Sequence[int], alive: Iterable[int]) -> dict[int, tuple[int, ...]]:
    pool = sorted(j for j in alive if j not in failed)
    if len(pool) < c.k:
        raise CodecError(f"only {len(pool)} helpers alive, need {c.k}")
    return {j: tuple(pool[:c.k]) for j in failed}


def repair(c: CodecInstance, stores: Mapping[int, NodeStore], failed: Sequence[int],
           bs: Sequence[BaseStationStore], helpers: Mapping[int, Sequence[int]] | None = None,
           bs_first: bool = False) -> RepairSession:
    """Regenerate exactly ``t`` lost nodes from surviving ``stores`` and the base stations.

    ``stores`` holds the surviving nodes; entries for failed ids are ignored.
    ``bs_first`` runs the base-station phase before the cooperative one.
    """
    failed = tuple(sorted(failed))
    if len(failed) != c.t or len(set(failed)) != c.t:
        raise CodecError(f"this code repairs exactly t={c.t} distinct losses, got {list(failed)}")
    if any(not 1 <= j <= c.n for j in failed):
        raise CodecError("failed id out of range")
    if len(bs) != c.rho:
        raise CodecError(f"need {c.rho} base stations, got {len(bs)}")
    alive = {j: s for j, s in stores.items() if j not in failed}
    if helpers is None:
        helpers = default_helpers(c, failed, alive)
    helpers = {j: tuple(helpers[j]) for j in failed}
    for j, hs in helpers.items():
        if len(hs) != c.k or len(set(hs)) != c.k:
            raise CodecError(f"newcomer {j} needs {c.k} distinct helpers")
        if any(h not in alive for h in hs):
            raise CodecError(f"newcomer {j} asked a helper that is not alive")

    f = c.field
    session = RepairSession(failed, helpers, rho=c.rho, chunk_fraction=c.chunk_fraction)
    held: dict[int, dict[int, np.ndarray]] = {j: {} for j in failed}  # newcomer -> row -> chunk
    rows: dict[int, np.ndarray] = {}

    # phase 1: newcomer of rank l rebuilds message row l
    for l, j in enumerate(failed, start=1):
        hs = helpers[j]
        G = c.generators[l - 1]
        y = np.stack([alive[h].chunks[l - 1] for h in hs])
        for h in hs:
            session.transcript.append(Transfer(j, "local", h, l, 1))
        inv = mat_inv(G.columns([h - 1 for h in hs]))
        rows[l] = np.stack([f.combine(inv.column(a), y) for a in range(c.k)])
        held[j][l] = f.combine(G.column(j - 1), rows[l])

    def cooperate(phase: int) -> None:
        for l, j in enumerate(failed, start=1):
            G = c.generators[l - 1]
            for j2 in failed:
                if j2 != j:
                    held[j2][l] = f.combine(G.column(j2 - 1), rows[l])
                    session.transcript.append(Transfer(j2, "coop", j, l, phase))

    def from_base_stations(phase: int) -> None:
        for j in failed:
            for store in bs:
                held[j][c.t + store.layer] = store.serve(c, j)
                session.transcript.append(Transfer(j, "bs", store.layer, c.t + store.layer, phase))

    if bs_first:
        from_base_stations(2)
        cooperate(3)
    else:
        cooperate(2)
        from_base_stations(3)

    for j in failed:
        session.stores[j] = NodeStore(j, np.stack([held[j][i] for i in range(1, c.rows + 1)]))
    return session


def ledger_cost(session: RepairSession, w: Sequence[Number], F: Number = 1) -> Fraction:
    """Per-newcomer cost of a repair; every newcomer pays the same."""
    costs = {session.ledger(j, w, F).total_cost for j in session.failed}
    if len(costs) != 1:
        raise AssertionError("newcomers paid different costs")
    return costs.pop()


# -- serialisation --------------------------------------------------------

@dataclass(frozen=True)
class StoreHeader:
    kind: str  # "node" or "bs"
    p: int
    q: int
    poly: int
    n: int
    k: int
    t: int
    rho: int
    ident: int
    chunk_len: int
    width: int

    def codec(self) -> CodecInstance:
        return codec_new(self.n, self.k, self.t, self.rho, gf_field(self.p, self.q, self.poly or None))


def _pack(c: CodecInstance, kind: int, ident: int, arr: np.ndarray) -> bytes:
    width = c.symbol_width()
    head = _HEADER.pack(MAGIC, 1, kind, c.field.p, c.field.q, c.field.poly or 0,
                        c.n, c.k, c.t, c.rho, ident, arr.shape[1], width)
    body = arr.astype("<u1" if width == 1 else "<u2").tobytes()
    return head + body


def node_to_bytes(c: CodecInstance, store: NodeStore) -> bytes:
    return _pack(c, 0, store.node_id, store.chunks)


def bs_to_bytes(c: CodecInstance, store: BaseStationStore) -> bytes:
    return _pack(c, 1, store.layer, store.row)


def store_from_bytes(blob: bytes) -> tuple[StoreHeader, NodeStore | BaseStationStore]:
    if len(blob) < _HEADER.size:
        raise CodecError("store file too short")
    magic, ver, kind, p, q, poly, n, k, t, rho, ident, chunk_len, width = _HEADER.unpack_from(blob)
    if magic != MAGIC or ver != 1 or kind not in (0, 1) or width not in (1, 2):
        raise CodecError("not a store file")
    header = StoreHeader("node" if kind == 0 else "bs", p, q, poly, n, k, t, rho, ident, chunk_len, width)
    nrows = t + rho if kind == 0 else k
    body = blob[_HEADER.size:]
    if len(body) != nrows * chunk_len * width:
        raise CodecError("store body has the wrong length")
    arr = np.frombuffer(body, dtype="<u1" if width == 1 else "<u2").astype(np.int64)
    arr = arr.reshape(nrows, chunk_len)
    store = NodeStore(ident, arr) if kind == 0 else BaseStationStore(ident, arr)
    return header, store
