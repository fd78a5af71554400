"""Baseline node orderings: natural, random, BFS, lexicographic, Gray, shingle.

Every ordering returns a permutation array ``p`` with ``p[old] = new``.
The lex and Gray orders sort adjacency-matrix rows with column index
ascending; both are implemented by merging the sparse successor lists, so
no dense rows are ever materialised.  Sorting is stable: nodes with
identical rows keep their input order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cmp_to_key

import numpy as np

from .graph import Graph, identity_permutation, random_permutation

ORDERING_KINDS = ("natural", "random", "bfs", "lex", "gray", "shingle")

_SEEDED_KINDS = ("random", "shingle")

# splitmix64 multiplier/increment constants
_SM_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_MUL2 = np.uint64(0x94D049BB133111EB)
_U64_MAX = np.uint64(0xFFFFFFFFFFFFFFFF)


@dataclass(frozen=True)
class OrderingSpec:
    kind: str
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ORDERING_KINDS:
            raise ValueError(f"unknown ordering kind {self.kind!r}")
        if self.kind in _SEEDED_KINDS and self.seed is None:
            raise ValueError(f"{self.kind} ordering requires a seed")
        if self.kind not in _SEEDED_KINDS and self.seed is not None:
            raise ValueError(f"{self.kind} ordering takes no seed")


def compute_ordering(g: Graph, spec: OrderingSpec) -> np.ndarray:
    if spec.kind == "natural":
        return identity_permutation(g.n)
    if spec.kind == "random":
        return random_permutation(g.n, spec.seed)
    if spec.kind == "bfs":
        return order_bfs(g)
    if spec.kind == "lex":
        return order_lex(g)
    if spec.kind == "gray":
        return order_gray(g)
    return order_shingle(g, spec.seed)


def order_bfs(g: Graph) -> np.ndarray:
    """Number nodes in breadth-first visit order.

    Roots are the lowest-id unvisited nodes, taken repeatedly until the
    graph is exhausted; neighbours enter the queue in successor-list order.
    """
    n = g.n
    rank = np.full(n, -1, dtype=np.int64)
    offsets = g.offsets
    targets = g.targets
    nxt = 0
    queue: deque[int] = deque()
    for root in range(n):
        if rank[root] >= 0:
            continue
        rank[root] = nxt
        nxt += 1
        queue.append(root)
        while queue:
            x = queue.popleft()
            for y in targets[offsets[x]:offsets[x + 1]].tolist():
                if rank[y] < 0:
                    rank[y] = nxt
                    nxt += 1
                    queue.append(y)
    return rank


def _row_compare_lex(a: list[int], b: list[int]) -> int:
    """Lexicographic row order, column ascending, arc sorts before no-arc."""
    for xa, xb in zip(a, b):
        if xa != xb:
            # the smaller column index is the first difference; that row has
            # the 1 bit there and sorts first
            return -1 if xa < xb else 1
    if len(a) == len(b):
        return 0
    # the longer row has a 1 where the shorter ran out
    return -1 if len(a) > len(b) else 1


def _row_compare_gray(a: list[int], b: list[int]) -> int:
    """Reflected-Gray row order over the same column convention as lex.

    Rows agree on every column before the first differing one; the parity
    of the 1 bits seen up to that point decides whether 0 or 1 sorts first.
    """
    i = 0
    la, lb = len(a), len(b)
    while i < la and i < lb and a[i] == b[i]:
        i += 1
    if i == la and i == lb:
        return 0
    parity = i & 1
    if i == la:
        one_in_b = True
    elif i == lb:
        one_in_b = False
    else:
        one_in_b = b[i] < a[i]
    # parity even: the row with 0 at the differing column sorts first
    if parity == 0:
        return -1 if one_in_b else 1
    return 1 if one_in_b else -1


def _sort_rows(g: Graph, compare) -> np.ndarray:
    lists = g.to_lists()
    order = sorted(range(g.n), key=cmp_to_key(lambda x, y: compare(lists[x], lists[y])))
    rank = np.empty(g.n, dtype=np.int64)
    rank[np.array(order, dtype=np.int64)] = np.arange(g.n, dtype=np.int64)
    return rank


def order_lex(g: Graph) -> np.ndarray:
    """Stable sort of nodes by adjacency rows in lexicographic order."""
    return _sort_rows(g, _row_compare_lex)


def order_gray(g: Graph) -> np.ndarray:
    """Stable sort of nodes by adjacency rows in reflected Gray order."""
    return _sort_rows(g, _row_compare_gray)


def _mix64(v: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer over a uint64 array."""
    v = (v + _SM_GAMMA) & _U64_MAX
    v = ((v ^ (v >> np.uint64(30))) * _SM_MUL1) & _U64_MAX
    v = ((v ^ (v >> np.uint64(27))) * _SM_MUL2) & _U64_MAX
    return v ^ (v >> np.uint64(31))


def shingle_hash(n: int, seed: int, which: int) -> np.ndarray:
    """Seeded 64-bit hash values for node ids 0..n-1."""
    ids = np.arange(n, dtype=np.uint64)
    base = np.array([(seed + 0x632BE59BD9B4E019 * (which + 1)) & 0xFFFFFFFFFFFFFFFF],
                    dtype=np.uint64)
    salt = _mix64(base)[0]
    return _mix64(ids ^ salt)


def order_shingle(g: Graph, seed: int) -> np.ndarray:
    """Sort nodes by the min-wise hash fingerprints of their successor sets.

    Two independent seeded hash functions are applied to the successor ids;
    a node's shingle is the minimum hash over its list (maximal sentinel for
    empty lists, which therefore sort last).  Nodes sort by (first shingle,
    second shingle) with input order breaking ties.
    """
    n = g.n
    sh = []
    nonempty = g.out_degrees() > 0
    starts = g.offsets[:-1][nonempty]
    for which in (0, 1):
        h = shingle_hash(n, seed, which)
        vals = np.full(n, _U64_MAX, dtype=np.uint64)
        if starts.size:
            vals[nonempty] = np.minimum.reduceat(h[g.targets], starts)
        sh.append(vals)
    order = np.lexsort((sh[1], sh[0]))  # stable, so input order breaks ties
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n, dtype=np.int64)
    return rank
