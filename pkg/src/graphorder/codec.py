"""Compressed adjacency codec with windowed reference copying and gap coding.

Per-node layout (all counts gamma-coded as value + 1, since gamma starts
at 1):

* outdegree ``d``;
* if ``d > 0``: reference distance ``r`` in ``[0, window]`` (``r = 0`` means
  no reference);
* if ``r > 0``: block count ``b``, then ``b`` block lengths.  Blocks
  alternate copied/skipped over the referenced list, starting with copied
  (the first block may have length 0); the final block is implicit and
  extends to the end of the referenced list;
* residuals (successors not obtained by copying) in the configured residual
  code: the first as a signed offset ``v = s0 - x`` mapped to
  ``2v + 2`` when ``v >= 0`` and ``2|v| + 1`` otherwise, the rest as plain
  successive differences (always >= 1).

Reference selection is exact-cost greedy: among the window candidates whose
own reference chain is shorter than ``max_ref_chain``, the one minimising
the node's encoded bit count wins, ties broken towards the smaller
distance (no reference at all wins a tie with any reference).

Compressed file format (little-endian): magic ``GOBVGRF1``; ``n``, ``m``,
``window``, ``max_ref_chain`` as u64; residual family byte (0 gamma,
1 delta, 2 zeta) and zeta parameter byte; ``n + 1`` u64 bit offsets; the
bitstream, MSB-first, zero-padded to a whole byte.  Equal inputs produce
bit-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitio import (
    BitReader,
    BitWriter,
    delta_length,
    gamma_length,
    zeta_length,
)
from .graph import Graph

CODEC_MAGIC = b"GOBVGRF1"

_FAMILY_IDS = {"gamma": 0, "delta": 1, "zeta": 2}
_FAMILY_NAMES = {v: k for k, v in _FAMILY_IDS.items()}


@dataclass(frozen=True)
class CodecConfig:
    window: int = 7
    max_ref_chain: int = 3
    residual_code: str = "zeta"
    zeta_k: int = 3

    def __post_init__(self):
        if self.window < 0:
            raise ValueError("window must be >= 0")
        if self.max_ref_chain < 0:
            raise ValueError("max_ref_chain must be >= 0")
        if self.residual_code not in _FAMILY_IDS:
            raise ValueError(f"unknown residual code {self.residual_code!r}")
        if self.residual_code == "zeta" and self.zeta_k < 1:
            raise ValueError("zeta parameter k must be >= 1")

    @property
    def code_label(self) -> str:
        return f"zeta{self.zeta_k}" if self.residual_code == "zeta" else self.residual_code

    @classmethod
    def parse_code(cls, label: str, **kwargs) -> "CodecConfig":
        """Build a config from a residual-code label like ``zeta3`` or ``gamma``."""
        label = label.strip().lower()
        if label in ("gamma", "delta"):
            return cls(residual_code=label, **kwargs)
        if label.startswith("zeta"):
            k = int(label[4:] or 3)
            return cls(residual_code="zeta", zeta_k=k, **kwargs)
        raise ValueError(f"unknown residual code {label!r}")


@dataclass(frozen=True)
class CompressionStats:
    bits_per_link: float
    copied_arc_fraction: float
    avg_gap_cost: float
    avg_distance_cost: float
    total_bits: int
    n: int
    m: int

    def as_dict(self) -> dict:
        return {
            "bits_per_link": self.bits_per_link,
            "copied_arc_fraction": self.copied_arc_fraction,
            "avg_gap_cost": self.avg_gap_cost,
            "avg_distance_cost": self.avg_distance_cost,
            "total_bits": self.total_bits,
            "n": self.n,
            "m": self.m,
        }


def _signed_offset_map(v: int) -> int:
    return 2 * v + 2 if v >= 0 else 2 * (-v) + 1


def _signed_offset_unmap(u: int) -> int:
    return (u - 2) // 2 if u % 2 == 0 else -((u - 1) // 2)


def _residual_length_fn(cfg: CodecConfig):
    if cfg.residual_code == "gamma":
        return gamma_length
    if cfg.residual_code == "delta":
        return delta_length
    k = cfg.zeta_k
    return lambda x: zeta_length(x, k)


def _split_against_reference(succ: list[int], ref: list[int]):
    """Partition ``succ`` into copied elements of ``ref`` plus residuals.

    Returns (explicit_block_lengths, copied, residuals); the final
    alternating block over ``ref`` is left implicit.
    """
    copied: list[int] = []
    residuals: list[int] = []
    mask: list[bool] = []
    i = 0
    ns = len(succ)
    for rj in ref:
        while i < ns and succ[i] < rj:
            residuals.append(succ[i])
            i += 1
        if i < ns and succ[i] == rj:
            mask.append(True)
            copied.append(rj)
            i += 1
        else:
            mask.append(False)
    while i < ns:
        residuals.append(succ[i])
        i += 1
    # alternating run lengths, starting with a (possibly empty) copied run
    runs: list[int] = []
    cur = True
    length = 0
    for bit in mask:
        if bit == cur:
            length += 1
        else:
            runs.append(length)
            cur = not cur
            length = 1
    runs.append(length)
    return runs[:-1], copied, residuals


def _residual_cost(residuals: list[int], x: int, clen) -> int:
    if not residuals:
        return 0
    bits = clen(_signed_offset_map(residuals[0] - x))
    prev = residuals[0]
    for s in residuals[1:]:
        bits += clen(s - prev)
        prev = s
    return bits


class CompressedGraph:
    """Bit-packed adjacency store with per-node random access."""

    __slots__ = ("n", "m", "config", "data", "offsets", "copied_arcs")

    def __init__(self, n: int, m: int, config: CodecConfig, data: bytes,
                 offsets: np.ndarray, copied_arcs: int | None = None):
        self.n = n
        self.m = m
        self.config = config
        self.data = data
        offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        offsets.flags.writeable = False
        self.offsets = offsets
        self.copied_arcs = copied_arcs

    @property
    def total_bits(self) -> int:
        return int(self.offsets[-1])

    def successors(self, x: int) -> list[int]:
        """Successor list of node ``x``; stateless and reentrant."""
        return self._decode(x)[0]

    def reference_chain(self, x: int) -> int:
        """Number of transitive references followed when decoding ``x``."""
        return self._decode(x)[1]

    def _decode(self, x: int) -> tuple[list[int], int]:
        if not 0 <= x < self.n:
            raise IndexError(f"node {x} out of range [0, {self.n})")
        cfg = self.config
        reader = BitReader(self.data, int(self.offsets[x]))
        d = reader.read_gamma() - 1
        if d == 0:
            return [], 0
        r = reader.read_gamma() - 1
        copied: list[int] = []
        depth = 0
        if r > 0:
            b = reader.read_gamma() - 1
            lengths = [reader.read_gamma() - 1 for _ in range(b)]
            ref, ref_depth = self._decode(x - r)
            depth = ref_depth + 1
            pos = 0
            for t, length in enumerate(lengths):
                if t % 2 == 0:
                    copied.extend(ref[pos:pos + length])
                pos += length
            if len(lengths) % 2 == 0:
                copied.extend(ref[pos:])
        q = d - len(copied)
        residuals: list[int] = []
        if q > 0:
            if cfg.residual_code == "gamma":
                read = reader.read_gamma
            elif cfg.residual_code == "delta":
                read = reader.read_delta
            else:
                k = cfg.zeta_k
                read = lambda: reader.read_zeta(k)
            prev = x + _signed_offset_unmap(read())
            residuals.append(prev)
            for _ in range(q - 1):
                prev += read()
                residuals.append(prev)
        if not copied:
            return residuals, depth
        if not residuals:
            return copied, depth
        merged: list[int] = []
        i = j = 0
        while i < len(copied) and j < len(residuals):
            if copied[i] < residuals[j]:
                merged.append(copied[i])
                i += 1
            else:
                merged.append(residuals[j])
                j += 1
        merged.extend(copied[i:])
        merged.extend(residuals[j:])
        return merged, depth

    def decode_graph(self) -> Graph:
        """Expand back to an explicit CSR graph."""
        return Graph.from_lists([self.successors(x) for x in range(self.n)], n=self.n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CompressedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and self.config == other.config
            and self.data == other.data
            and np.array_equal(self.offsets, other.offsets)
        )


def compress(g: Graph, cfg: CodecConfig | None = None) -> CompressedGraph:
    """Encode ``g``; decoding reproduces its successor lists arc-exactly."""
    cfg = cfg or CodecConfig()
    n = g.n
    clen = _residual_length_fn(cfg)
    writer = BitWriter()
    offsets = np.zeros(n + 1, dtype=np.int64)
    depth = np.zeros(n, dtype=np.int64)
    lists = g.to_lists()
    copied_total = 0

    if cfg.residual_code == "gamma":
        wres = writer.write_gamma
    elif cfg.residual_code == "delta":
        wres = writer.write_delta
    else:
        zk = cfg.zeta_k
        wres = lambda v: writer.write_zeta(v, zk)

    for x in range(n):
        succ = lists[x]
        d = len(succ)
        writer.write_gamma(d + 1)
        if d == 0:
            offsets[x + 1] = writer.bit_length
            continue

        best_r = 0
        best_cost = 1 + _residual_cost(succ, x, clen)  # gamma(1) for r = 0
        best_blocks: list[int] = []
        best_copied: list[int] = []
        best_residuals = succ
        for r in range(1, min(cfg.window, x) + 1):
            y = x - r
            if depth[y] >= cfg.max_ref_chain:
                continue
            ref = lists[y]
            if not ref:
                continue
            blocks, copied, residuals = _split_against_reference(succ, ref)
            cost = gamma_length(r + 1) + gamma_length(len(blocks) + 1)
            for length in blocks:
                cost += gamma_length(length + 1)
            cost += _residual_cost(residuals, x, clen)
            if cost < best_cost:
                best_cost = cost
                best_r = r
                best_blocks = blocks
                best_copied = copied
                best_residuals = residuals

        writer.write_gamma(best_r + 1)
        if best_r > 0:
            depth[x] = depth[x - best_r] + 1
            copied_total += len(best_copied)
            writer.write_gamma(len(best_blocks) + 1)
            for length in best_blocks:
                writer.write_gamma(length + 1)
        if best_residuals:
            wres(_signed_offset_map(best_residuals[0] - x))
            prev = best_residuals[0]
            for s in best_residuals[1:]:
                wres(s - prev)
                prev = s
        offsets[x + 1] = writer.bit_length

    return CompressedGraph(n, g.m, cfg, writer.getvalue(), offsets, copied_total)


def gap_cost(g: Graph) -> float:
    """Mean over arcs of log2(gap): the first gap of a list is |s0 - x| + 1."""
    if g.m == 0:
        raise ValueError("gap cost undefined for a graph with no arcs")
    nonempty = g.out_degrees() > 0
    starts = g.offsets[:-1][nonempty]
    firsts = g.targets[starts]
    xs = np.arange(g.n, dtype=np.int64)[nonempty]
    total = float(np.log2(np.abs(firsts - xs) + 1).sum())
    if g.m > 1:
        diffs = g.targets[1:] - g.targets[:-1]
        is_start = np.zeros(g.m, dtype=bool)
        is_start[starts] = True
        inner = diffs[~is_start[1:]]
        if inner.size:
            total += float(np.log2(inner).sum())
    return total / g.m


def distance_cost(g: Graph) -> float:
    """Mean over arcs (x, y) of log2(|x - y|); self-loops contribute 0."""
    if g.m == 0:
        raise ValueError("distance cost undefined for a graph with no arcs")
    src = np.repeat(np.arange(g.n, dtype=np.int64), g.out_degrees())
    dist = np.abs(src - g.targets)
    dist = dist[dist > 0]
    total = float(np.log2(dist).sum()) if dist.size else 0.0
    return total / g.m


def compression_stats(cg: CompressedGraph, g: Graph) -> CompressionStats:
    """Stats for an already-compressed graph and its uncompressed form."""
    if g.m == 0:
        raise ValueError("compression measures undefined for a graph with no arcs")
    return CompressionStats(
        bits_per_link=cg.total_bits / g.m,
        copied_arc_fraction=cg.copied_arcs / g.m,
        avg_gap_cost=gap_cost(g),
        avg_distance_cost=distance_cost(g),
        total_bits=cg.total_bits,
        n=g.n,
        m=g.m,
    )


def measure(g: Graph, cfg: CodecConfig | None = None) -> CompressionStats:
    """Compress ``g`` and report bits/link plus locality/similarity measures."""
    if g.m == 0:
        raise ValueError("compression measures undefined for a graph with no arcs")
    return compression_stats(compress(g, cfg), g)


def pearson(xs, ys) -> float:
    """Pearson product-moment correlation of two equal-length sequences."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
        raise ValueError("need two 1-D sequences of equal length >= 2")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    vx = float(np.dot(dx, dx))
    vy = float(np.dot(dy, dy))
    if vx == 0.0 or vy == 0.0:
        raise ValueError("correlation undefined for zero-variance input")
    return float(np.dot(dx, dy)) / math.sqrt(vx * vy)


# ---------------------------------------------------------------------------
# compressed file I/O


def store_compressed(cg: CompressedGraph, sink) -> None:
    own = isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__")
    fh = open(sink, "wb") if own else sink
    try:
        cfg = cg.config
        fh.write(CODEC_MAGIC)
        fh.write(cg.n.to_bytes(8, "little"))
        fh.write(cg.m.to_bytes(8, "little"))
        fh.write(cfg.window.to_bytes(8, "little"))
        fh.write(cfg.max_ref_chain.to_bytes(8, "little"))
        fh.write(bytes([_FAMILY_IDS[cfg.residual_code], cfg.zeta_k]))
        fh.write(cg.offsets.astype("<i8").tobytes())
        fh.write(cg.data)
    finally:
        if own:
            fh.close()


def load_compressed(source) -> CompressedGraph:
    own = isinstance(source, (str, bytes)) or hasattr(source, "__fspath__")
    fh = open(source, "rb") if own else source
    try:
        if fh.read(8) != CODEC_MAGIC:
            raise ValueError("not a compressed graph file")
        n = int.from_bytes(fh.read(8), "little")
        m = int.from_bytes(fh.read(8), "little")
        window = int.from_bytes(fh.read(8), "little")
        max_ref = int.from_bytes(fh.read(8), "little")
        family, zk = fh.read(2)
        cfg = CodecConfig(window=window, max_ref_chain=max_ref,
                          residual_code=_FAMILY_NAMES[family], zeta_k=zk)
        offsets = np.frombuffer(fh.read(8 * (n + 1)), dtype="<i8").astype(np.int64)
        data = fh.read()
        return CompressedGraph(n, m, cfg, data, offsets)
    finally:
        if own:
            fh.close()
