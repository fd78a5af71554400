"""Immutable directed graphs in CSR form, permutations, and graph surgery.

A graph with ``n`` nodes has node ids ``0..n-1``.  Successor lists are kept
strictly increasing and duplicate-free, so the arc count ``m`` equals the
total length of all lists.  Instances are immutable after construction (the
underlying arrays are marked read-only) and can be shared freely across
threads.

File formats
------------
Text edge list: one ``src dst`` pair of decimal ids per line; lines starting
with ``#`` are comments.  A comment of the form ``# nodes: N`` overrides the
default node count of ``1 + max id`` (needed to round-trip trailing isolated
nodes).

Binary graph: little-endian; 8-byte magic ``GOBGRAF1``, then ``n`` and ``m``
as u64, then per node an unsigned-LEB128 degree followed by the successor
list delta-encoded (first id as-is, then successive differences), each value
LEB128.

Permutation file: ``n`` decimal integers, one per line; line ``i`` holds the
new id of node ``i``.  ``#`` comment lines are allowed and used for metadata.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

GRAPH_MAGIC = b"GOBGRAF1"

_NODES_HEADER = re.compile(rb"#\s*nodes\s*[:=]\s*(\d+)\s*$")


class EdgeListError(ValueError):
    """Malformed edge-list input; message carries the offending line number."""


class Graph:
    """Immutable directed graph: ``offsets[x]..offsets[x+1]`` slices ``targets``."""

    __slots__ = ("offsets", "targets")

    def __init__(self, offsets: np.ndarray, targets: np.ndarray):
        offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        targets = np.ascontiguousarray(targets, dtype=np.int64)
        if offsets.ndim != 1 or offsets.size < 1 or offsets[0] != 0:
            raise ValueError("offsets must be 1-D, start at 0")
        if offsets[-1] != targets.size:
            raise ValueError("offsets must end at len(targets)")
        offsets.flags.writeable = False
        targets.flags.writeable = False
        self.offsets = offsets
        self.targets = targets

    @property
    def n(self) -> int:
        return self.offsets.size - 1

    @property
    def m(self) -> int:
        return int(self.targets.size)

    def successors(self, x: int) -> np.ndarray:
        """Sorted successor ids of node ``x`` (zero-copy view)."""
        if not 0 <= x < self.n:
            raise IndexError(f"node {x} out of range [0, {self.n})")
        return self.targets[self.offsets[x] : self.offsets[x + 1]]

    def out_degree(self, x: int) -> int:
        return int(self.offsets[x + 1] - self.offsets[x])

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def to_lists(self) -> list[list[int]]:
        return [self.successors(x).tolist() for x in range(self.n)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.targets, other.targets)
        )

    def __hash__(self):  # pragma: no cover - not used as dict key in hot paths
        return hash((self.n, self.m, self.targets.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    @classmethod
    def from_edges(cls, n: int, src, dst) -> "Graph":
        """Build from parallel arc arrays; duplicates collapse, lists sort."""
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.size != dst.size:
            raise ValueError("src and dst must have equal length")
        if n < 0:
            raise ValueError("node count must be non-negative")
        if src.size:
            lo = min(src.min(), dst.min())
            hi = max(src.max(), dst.max())
            if lo < 0 or hi >= n:
                raise ValueError(f"node id out of range [0, {n}): saw {lo if lo < 0 else hi}")
            keys = np.unique(src * np.int64(n) + dst)
            src = keys // n
            dst = keys % n
        offsets = np.zeros(n + 1, dtype=np.int64)
        if src.size:
            np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
        return cls(offsets, dst)

    @classmethod
    def from_lists(cls, lists: Sequence[Iterable[int]], n: int | None = None) -> "Graph":
        """Build from per-node successor iterables (deduplicated and sorted)."""
        if n is None:
            n = len(lists)
        if len(lists) > n:
            raise ValueError("more lists than nodes")
        src: list[int] = []
        dst: list[int] = []
        for x, succ in enumerate(lists):
            for y in succ:
                src.append(x)
                dst.append(y)
        return cls.from_edges(n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64))


@dataclass(frozen=True)
class SymSplit:
    """Symmetric/residual decomposition of a directed graph.

    ``sym`` holds every mutual arc in both directions (a symmetric graph);
    ``res`` holds the arcs whose reverse is absent; ``res_t`` is the
    transpose of ``res``.  Successors of the original graph are recovered as
    ``sym(x) ∪ res(x)`` and predecessors as ``sym(x) ∪ res_t(x)``.
    """

    sym: Graph
    res: Graph
    res_t: Graph


def validate_permutation(p: np.ndarray) -> np.ndarray:
    """Return ``p`` as an int64 array, raising if it is not a bijection."""
    p = np.asarray(p, dtype=np.int64)
    if p.ndim != 1:
        raise ValueError("permutation must be 1-D")
    n = p.size
    seen = np.zeros(n, dtype=bool)
    if n and (p.min() < 0 or p.max() >= n):
        raise ValueError("permutation values out of range")
    seen[p] = True
    if not seen.all():
        raise ValueError("permutation is not a bijection")
    return p


def identity_permutation(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.int64)


def random_permutation(n: int, seed: int) -> np.ndarray:
    """Uniform random permutation from a seeded generator; same seed, same output."""
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.default_rng(seed)
    return rng.permutation(n).astype(np.int64)


def invert_permutation(p: np.ndarray) -> np.ndarray:
    inv = np.empty(p.size, dtype=np.int64)
    inv[p] = np.arange(p.size, dtype=np.int64)
    return inv


def apply_permutation(g: Graph, p: np.ndarray) -> Graph:
    """Renumber ``g`` so arc (x, y) becomes (p[x], p[y])."""
    p = validate_permutation(p)
    if p.size != g.n:
        raise ValueError(f"permutation size {p.size} != graph size {g.n}")
    src = np.repeat(np.arange(g.n, dtype=np.int64), g.out_degrees())
    return Graph.from_edges(g.n, p[src], p[g.targets])


def transpose(g: Graph) -> Graph:
    """Graph with every arc reversed."""
    src = np.repeat(np.arange(g.n, dtype=np.int64), g.out_degrees())
    return Graph.from_edges(g.n, g.targets, src)


def sym_split(g: Graph) -> SymSplit:
    """Split ``g`` into mutual (symmetric) arcs and one-way residual arcs."""
    n = g.n
    src = np.repeat(np.arange(n, dtype=np.int64), g.out_degrees())
    dst = g.targets
    keys = src * np.int64(max(n, 1)) + dst
    rev = dst * np.int64(max(n, 1)) + src
    mutual = np.isin(rev, keys, assume_unique=False)
    sym = Graph.from_edges(n, src[mutual], dst[mutual])
    res = Graph.from_edges(n, src[~mutual], dst[~mutual])
    return SymSplit(sym=sym, res=res, res_t=transpose(res))


# ---------------------------------------------------------------------------
# text edge-list I/O


def _open_binary(source, mode: str):
    if isinstance(source, (str, Path)):
        return open(source, mode), True
    return source, False


def load_edge_list(source, format: str = "text") -> Graph:
    """Load a graph from a text edge list or the binary format."""
    if format == "text":
        return _load_text(source)
    if format == "binary":
        return load_binary(source)
    raise ValueError(f"unknown format {format!r}")


def _load_text(source) -> Graph:
    fh, owned = _open_binary(source, "rb")
    try:
        src: list[int] = []
        dst: list[int] = []
        n_override = None
        max_id = -1
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith(b"#"):
                mo = _NODES_HEADER.match(line)
                if mo:
                    n_override = int(mo.group(1))
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListError(f"line {lineno}: expected 'src dst', got {raw!r}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListError(f"line {lineno}: non-integer node id in {raw!r}") from None
            if a < 0 or b < 0:
                raise EdgeListError(f"line {lineno}: negative node id")
            src.append(a)
            dst.append(b)
            if a > max_id:
                max_id = a
            if b > max_id:
                max_id = b
        n = n_override if n_override is not None else max_id + 1
        if max_id >= n:
            raise EdgeListError(f"node id {max_id} out of range for declared n={n}")
        return Graph.from_edges(n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64))
    finally:
        if owned:
            fh.close()


def store_text(g: Graph, sink) -> None:
    fh, owned = _open_binary(sink, "wb")
    try:
        fh.write(f"# nodes: {g.n}\n".encode())
        out = io.BytesIO()
        for x in range(g.n):
            for y in g.successors(x):
                out.write(f"{x} {y}\n".encode())
        fh.write(out.getvalue())
    finally:
        if owned:
            fh.close()


# ---------------------------------------------------------------------------
# binary graph I/O (LEB128 varints, delta-coded successor lists)


def _write_varint(buf: bytearray, v: int) -> None:
    while True:
        b = v & 0x7F
        v >>= 7
        if v:
            buf.append(b | 0x80)
        else:
            buf.append(b)
            return


def _read_varint(data: bytes, pos: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        b = data[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            return result, pos
        shift += 7


def store_binary(g: Graph, sink) -> None:
    fh, owned = _open_binary(sink, "wb")
    try:
        fh.write(GRAPH_MAGIC)
        fh.write(g.n.to_bytes(8, "little"))
        fh.write(g.m.to_bytes(8, "little"))
        buf = bytearray()
        for x in range(g.n):
            succ = g.successors(x)
            _write_varint(buf, len(succ))
            prev = 0
            for i, y in enumerate(succ.tolist()):
                _write_varint(buf, y if i == 0 else y - prev)
                prev = y
        fh.write(bytes(buf))
    finally:
        if owned:
            fh.close()


def load_binary(source) -> Graph:
    fh, owned = _open_binary(source, "rb")
    try:
        head = fh.read(8)
        if head != GRAPH_MAGIC:
            raise ValueError(f"bad magic {head!r}: not a binary graph file")
        n = int.from_bytes(fh.read(8), "little")
        m = int.from_bytes(fh.read(8), "little")
        data = fh.read()
        offsets = np.zeros(n + 1, dtype=np.int64)
        targets = np.empty(m, dtype=np.int64)
        pos = 0
        k = 0
        for x in range(n):
            d, pos = _read_varint(data, pos)
            prev = 0
            for i in range(d):
                v, pos = _read_varint(data, pos)
                prev = v if i == 0 else prev + v
                targets[k] = prev
                k += 1
            offsets[x + 1] = k
        if k != m:
            raise ValueError(f"corrupt graph file: expected {m} arcs, decoded {k}")
        return Graph(offsets, targets)
    finally:
        if owned:
            fh.close()


# ---------------------------------------------------------------------------
# permutation file I/O


def store_permutation(p: np.ndarray, sink, metadata: dict | None = None) -> None:
    fh, owned = _open_binary(sink, "wb")
    try:
        for key, value in (metadata or {}).items():
            fh.write(f"# {key}={value}\n".encode())
        fh.write(b"".join(b"%d\n" % v for v in np.asarray(p, dtype=np.int64)))
    finally:
        if owned:
            fh.close()


def load_permutation(source) -> np.ndarray:
    fh, owned = _open_binary(source, "rb")
    try:
        values = [int(line) for line in fh if line.strip() and not line.startswith(b"#")]
        return validate_permutation(np.array(values, dtype=np.int64))
    finally:
        if owned:
            fh.close()
