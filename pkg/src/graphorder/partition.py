"""Partition comparison: entropy, mutual information, VI, and order-induced splits.

A partition assigns each node a dense class id.  All logarithms are base 2,
with the usual 0*log(0) = 0 convention for empty intersections.

Host/partition file: n lines, line i holding the class of node i as an
arbitrary token; tokens are interned to dense ids in first-seen order.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graph import invert_permutation, validate_permutation


class Partition:
    """Dense per-node class ids plus class-size accounting."""

    __slots__ = ("class_of", "class_sizes")

    def __init__(self, class_of: np.ndarray):
        class_of = np.ascontiguousarray(class_of, dtype=np.int64)
        if class_of.size:
            if class_of.min() < 0:
                raise ValueError("class ids must be dense non-negative integers")
            sizes = np.bincount(class_of)
            if (sizes == 0).any():
                raise ValueError("class ids must be dense (no empty classes)")
        else:
            sizes = np.zeros(0, dtype=np.int64)
        class_of.flags.writeable = False
        self.class_of = class_of
        self.class_sizes = sizes.astype(np.int64)

    @property
    def n(self) -> int:
        return int(self.class_of.size)

    @property
    def num_classes(self) -> int:
        return int(self.class_sizes.size)

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Intern arbitrary hashable labels to dense ids in first-seen order."""
        interned: dict = {}
        out = np.empty(len(labels), dtype=np.int64)
        for i, lab in enumerate(labels):
            out[i] = interned.setdefault(lab, len(interned))
        return cls(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.class_of, other.class_of)

    def __repr__(self) -> str:
        return f"Partition(n={self.n}, classes={self.num_classes})"


def entropy(p: Partition) -> float:
    """Entropy of the partition in bits."""
    if p.n == 0:
        return 0.0
    probs = p.class_sizes / p.n
    return float(-(probs * np.log2(probs)).sum())


def _check_same_n(s: Partition, t: Partition) -> None:
    if s.n != t.n:
        raise ValueError(f"partition sizes differ: {s.n} != {t.n}")


def mutual_information(s: Partition, t: Partition) -> float:
    """Mutual information between two partitions of the same node set, in bits."""
    _check_same_n(s, t)
    n = s.n
    if n == 0:
        return 0.0
    joint_keys = s.class_of * np.int64(t.num_classes) + t.class_of
    keys, counts = np.unique(joint_keys, return_counts=True)
    p_st = counts / n
    p_s = s.class_sizes[keys // t.num_classes] / n
    p_t = t.class_sizes[keys % t.num_classes] / n
    return float((p_st * np.log2(p_st / (p_s * p_t))).sum())


def variation_of_information(s: Partition, t: Partition) -> float:
    """VI(s, t) = H(s) + H(t) - 2 I(s, t); a metric on partitions."""
    _check_same_n(s, t)
    return entropy(s) + entropy(t) - 2.0 * mutual_information(s, t)


def host_transition_rate(h: Partition, p: np.ndarray) -> float:
    """Fraction of rank-adjacent node pairs whose classes differ."""
    p = validate_permutation(p)
    if p.size != h.n:
        raise ValueError(f"permutation size {p.size} != partition size {h.n}")
    if h.n < 2:
        raise ValueError("host transition rate undefined for n < 2")
    by_rank = h.class_of[invert_permutation(p)]
    transitions = int(np.count_nonzero(by_rank[1:] != by_rank[:-1]))
    return transitions / (h.n - 1)


def induced_refinement(h: Partition, p: np.ndarray) -> Partition:
    """Split every class of ``h`` into maximal rank-contiguous runs under ``p``."""
    p = validate_permutation(p)
    if p.size != h.n:
        raise ValueError(f"permutation size {p.size} != partition size {h.n}")
    if h.n == 0:
        return Partition(np.zeros(0, dtype=np.int64))
    inv = invert_permutation(p)
    by_rank = h.class_of[inv]
    run_id = np.zeros(h.n, dtype=np.int64)
    np.cumsum(by_rank[1:] != by_rank[:-1], out=run_id[1:])
    class_of = np.empty(h.n, dtype=np.int64)
    class_of[inv] = run_id
    return Partition(class_of)


def refines(fine: Partition, coarse: Partition) -> bool:
    """True when every class of ``fine`` is contained in a class of ``coarse``."""
    _check_same_n(fine, coarse)
    if fine.n == 0:
        return True
    # a fine class maps into exactly one coarse class
    seen = {}
    for f, c in zip(fine.class_of.tolist(), coarse.class_of.tolist()):
        if seen.setdefault(f, c) != c:
            return False
    return True


def load_partition(source) -> Partition:
    """Read a partition file: one class token per line, interned densely."""
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            lines = fh.read().splitlines()
    else:
        lines = source.read().splitlines()
    tokens = [ln.strip() for ln in lines if ln.strip() and not ln.startswith(b"#")]
    return Partition.from_labels(tokens)


def store_partition(p: Partition, sink, labels: Iterable | None = None) -> None:
    """Write one class id (or the given original labels) per line."""
    values = list(labels) if labels is not None else p.class_of.tolist()
    data = "".join(f"{v}\n" for v in values).encode()
    if isinstance(sink, (str, Path)):
        with open(sink, "wb") as fh:
            fh.write(data)
    else:
        sink.write(data)
