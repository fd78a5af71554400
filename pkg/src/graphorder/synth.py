"""Seeded synthetic graphs for benchmarks and the acceptance suite."""

from __future__ import annotations

import numpy as np

from .graph import Graph
from .partition import Partition


def gnp_directed(n: int, p: float, seed: int, self_loops: bool = False) -> Graph:
    """Erdos-Renyi directed graph: every ordered pair is an arc with probability p."""
    rng = np.random.default_rng(seed)
    total = n * n if self_loops else n * (n - 1)
    m = rng.binomial(total, p) if total > 0 else 0
    src = rng.integers(0, n, size=m, dtype=np.int64) if m else np.zeros(0, np.int64)
    dst = rng.integers(0, n, size=m, dtype=np.int64) if m else np.zeros(0, np.int64)
    if not self_loops and m:
        keep = src != dst
        src, dst = src[keep], dst[keep]
    return Graph.from_edges(n, src, dst)


def gnm_symmetric(n: int, pairs: int, seed: int) -> Graph:
    """Random symmetric graph with about ``pairs`` distinct undirected edges."""
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, size=pairs, dtype=np.int64)
    dst = rng.integers(0, n, size=pairs, dtype=np.int64)
    keep = src != dst
    src, dst = src[keep], dst[keep]
    return Graph.from_edges(n, np.concatenate([src, dst]), np.concatenate([dst, src]))


def sbm_directed(
    blocks: int,
    block_size: int,
    intra_degree: float,
    inter_degree: float,
    seed: int,
) -> tuple[Graph, Partition]:
    """Planted-partition graph with the given expected out-degrees.

    Every node draws on average ``intra_degree`` arcs to its own block and
    ``inter_degree`` arcs to other blocks (uniformly, self-loops and
    duplicates removed).  Returns the graph and the planted block partition.
    """
    n = blocks * block_size
    rng = np.random.default_rng(seed)

    n_intra = rng.poisson(n * intra_degree)
    src_i = rng.integers(0, n, size=n_intra, dtype=np.int64)
    # intra targets: same block, uniform member
    dst_i = (src_i // block_size) * block_size + rng.integers(
        0, block_size, size=n_intra, dtype=np.int64)

    n_inter = rng.poisson(n * inter_degree)
    src_o = rng.integers(0, n, size=n_inter, dtype=np.int64)
    # inter targets: uniform over the other blocks
    shift = rng.integers(1, blocks, size=n_inter, dtype=np.int64)
    block_o = (src_o // block_size + shift) % blocks
    dst_o = block_o * block_size + rng.integers(0, block_size, size=n_inter, dtype=np.int64)

    src = np.concatenate([src_i, src_o])
    dst = np.concatenate([dst_i, dst_o])
    keep = src != dst
    g = Graph.from_edges(n, src[keep], dst[keep])
    membership = np.repeat(np.arange(blocks, dtype=np.int64), block_size)
    return g, Partition(membership)
