"""Label-propagation clustering with a volume-discounted update rule.

Each node starts in its own cluster (label = node id).  A pass visits every
node in a fresh seeded random order; the visited node adopts the candidate
label with the best score ``k - gamma * (v - k)``, where ``k`` counts
neighbours currently holding the label and ``v`` is the label's volume
counted without the node itself (staying put and moving are then scored
symmetrically, every actual move strictly lowers the clustering energy,
and the passes terminate).  Candidates are the labels present in the
neighbourhood, the node's current label (at ``k = 0`` when no neighbour
holds it), and, when the node's own id is currently unused, a fresh
singleton under that id (scoring exactly 0, the same as any current
singleton).  The escape candidate is what keeps every converged cluster of
two or more nodes at internal pair-density at least ``gamma / (gamma +
1)``: a member scoring below zero would leave.  Ties keep the current
label when it is among the maximisers and otherwise pick uniformly at
random.

With ``gamma = 0`` the rule degenerates to standard label propagation
(scores reduce to plain neighbour counts, and the escape candidate can
never win against a real neighbour).

Directed inputs are symmetrised first: the neighbourhood is the union of
successors and predecessors.  Feeding an already-symmetric graph with
``symmetrized=True`` skips that step.

Parallel mode splits the visit order into a few thousand tasks claimed by
worker threads.  Label writes land immediately (neighbour reads may observe
mid-pass updates; the algorithm is randomised and tolerant of that), while
volume deltas are merged under a lock as each task completes, so volume
conservation holds exactly at every pass barrier.  Results are then not
deterministic; ``threads=1`` is the deterministic reference mode.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import Graph

_PARALLEL_TASKS = 2048


@dataclass(frozen=True)
class ApmConfig:
    gamma: float
    max_passes: int = 100
    min_change_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")
        if not 0.0 <= self.min_change_fraction < 1.0:
            raise ValueError("min_change_fraction must be in [0, 1)")


@dataclass
class Labelling:
    """Per-node labels with per-label volume counters."""

    labels: np.ndarray
    volumes: np.ndarray
    passes: int = 0
    converged: bool = False
    aux_words: int = 0

    @property
    def n(self) -> int:
        return int(self.labels.size)

    def cluster_count(self) -> int:
        return int(np.count_nonzero(self.volumes))


def apm_update_score(k: int, v: int, gamma: float) -> float:
    """Score of adopting a label held by k neighbours with total volume v."""
    return k - gamma * (v - k)


def cluster_size_histogram(labelling: Labelling) -> dict[int, int]:
    """Map cluster size -> number of clusters of that size."""
    sizes = labelling.volumes[labelling.volumes > 0]
    return dict(Counter(sizes.tolist()))


def symmetrize(g: Graph) -> Graph:
    """Union of g and its transpose: neighbourhood graph for clustering."""
    src = np.repeat(np.arange(g.n, dtype=np.int64), g.out_degrees())
    return Graph.from_edges(
        g.n,
        np.concatenate([src, g.targets]),
        np.concatenate([g.targets, src]),
    )


def store_labelling(labels: np.ndarray, sink) -> None:
    """Write a labelling file: n lines, line i holding the label of node i."""
    data = b"".join(b"%d\n" % v for v in np.asarray(labels, dtype=np.int64))
    if hasattr(sink, "write"):
        sink.write(data)
    else:
        with open(sink, "wb") as fh:
            fh.write(data)


def load_labelling(source) -> np.ndarray:
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        with open(source, "rb") as fh:
            lines = fh.read().splitlines()
    values = [int(ln) for ln in lines if ln.strip() and not ln.startswith(b"#")]
    return np.array(values, dtype=np.int64)


@njit(cache=True, nogil=True, inline="always")
def _next_rand(state):
    state[0] += np.uint64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True)
def _update_range(offsets, targets, labels, volumes, order, lo, hi, gamma,
                  state, buf, old_out, new_out, apply_volumes):
    """Update nodes order[lo:hi]; returns the number of label changes.

    Serial mode (apply_volumes=True) maintains the volume counters in
    place; parallel tasks record (old, new) pairs for the caller to merge.
    """
    changed = 0
    for oi in range(lo, hi):
        x = order[oi]
        s = offsets[x]
        e = offsets[x + 1]
        d = e - s
        if d == 0:
            continue
        cur = labels[x]
        for i in range(d):
            buf[i] = labels[targets[s + i]]
        nb = buf[:d]
        nb.sort()

        best = -1.0e300
        count = 0
        pick = np.int64(-1)
        cur_is_max = False
        cur_seen = False
        if volumes[x] == 0:
            # vacant own id: a fresh singleton scores k=0, v=0
            best = 0.0
            count = 1
            pick = x
        i = 0
        while i < d:
            lab = nb[i]
            k = 1
            i += 1
            while i < d and nb[i] == lab:
                k += 1
                i += 1
            # volumes are counted without x itself, so staying put and
            # moving are scored symmetrically (every actual move then
            # strictly lowers the clustering energy, which guarantees
            # termination)
            if lab == cur:
                cur_seen = True
                v = volumes[lab] - 1
            else:
                v = volumes[lab]
            score = k * (1.0 + gamma) - gamma * v
            if score > best:
                best = score
                count = 1
                pick = lab
                cur_is_max = lab == cur
            elif score == best:
                count += 1
                if lab == cur:
                    cur_is_max = True
                elif _next_rand(state) % np.uint64(count) == np.uint64(0):
                    pick = lab
        if not cur_seen:
            # the current label is always a candidate, at k = 0 when no
            # neighbour holds it
            score = -gamma * (volumes[cur] - 1)
            if score >= best:
                cur_is_max = True
        if cur_is_max or count == 0 or pick == cur:
            continue
        labels[x] = pick
        if apply_volumes:
            volumes[cur] -= 1
            volumes[pick] += 1
        else:
            old_out[changed] = cur
            new_out[changed] = pick
        changed += 1
    return changed


def _tie_state(seed_seq: np.random.SeedSequence) -> np.ndarray:
    return seed_seq.generate_state(1, dtype=np.uint64)


def run_apm(
    g: Graph,
    cfg: ApmConfig,
    threads: int = 1,
    initial_labels: np.ndarray | None = None,
    on_pass=None,
    symmetrized: bool = False,
) -> Labelling:
    """Run label propagation to convergence (or ``max_passes``).

    ``on_pass(pass_index, changed, labels, volumes)`` is invoked at every
    pass barrier.  ``threads > 1`` enables task-decomposed parallel updates;
    ``threads = 1`` is sequential and deterministic for a given seed.
    """
    gs = g if symmetrized else symmetrize(g)
    n = gs.n
    if initial_labels is None:
        labels = np.arange(n, dtype=np.int64)
    else:
        labels = np.array(initial_labels, dtype=np.int64)
        if labels.size != n or (n and (labels.min() < 0 or labels.max() >= n)):
            raise ValueError("initial labels must be node ids of matching size")
    volumes = np.bincount(labels, minlength=n).astype(np.int64)
    max_deg = int(gs.out_degrees().max()) if n else 0
    threshold = cfg.min_change_fraction * n

    root = np.random.SeedSequence(cfg.seed)
    order_seed, tie_seed = root.spawn(2)
    order_rng = np.random.default_rng(order_seed)

    aux_words = labels.size + volumes.size + n  # labels, volumes, visit order
    passes = 0
    converged = False

    if n == 0:
        return Labelling(labels, volumes, 0, True, 0)

    if threads <= 1:
        state = _tie_state(tie_seed)
        buf = np.empty(max_deg, dtype=np.int64)
        empty = np.empty(0, dtype=np.int64)
        aux_words += buf.size + state.size
        for p in range(cfg.max_passes):
            order = np.asarray(order_rng.permutation(n), dtype=np.int64)
            changed = _update_range(gs.offsets, gs.targets, labels, volumes,
                                    order, 0, n, float(cfg.gamma), state,
                                    buf, empty, empty, True)
            passes += 1
            if on_pass is not None:
                on_pass(p, changed, labels, volumes)
            if changed <= threshold:
                converged = True
                break
        return Labelling(labels, volumes, passes, converged, aux_words)

    num_tasks = max(1, min(n, _PARALLEL_TASKS))
    bounds = np.linspace(0, n, num_tasks + 1).astype(np.int64)
    chunk = int(np.max(bounds[1:] - bounds[:-1]))
    worker_states = [_tie_state(s) for s in tie_seed.spawn(threads)]
    bufs = [np.empty(max_deg, dtype=np.int64) for _ in range(threads)]
    olds = [np.empty(chunk, dtype=np.int64) for _ in range(threads)]
    news = [np.empty(chunk, dtype=np.int64) for _ in range(threads)]
    aux_words += threads * (max_deg + 2 * chunk + 1)

    merge_lock = threading.Lock()
    task_lock = threading.Lock()

    for p in range(cfg.max_passes):
        order = np.asarray(order_rng.permutation(n), dtype=np.int64)
        next_task = [0]
        changed_total = [0]

        def worker(wid: int):
            state = worker_states[wid]
            buf = bufs[wid]
            old = olds[wid]
            new = news[wid]
            while True:
                with task_lock:
                    t = next_task[0]
                    if t >= num_tasks:
                        return
                    next_task[0] = t + 1
                c = _update_range(gs.offsets, gs.targets, labels, volumes,
                                  order, int(bounds[t]), int(bounds[t + 1]),
                                  float(cfg.gamma), state, buf, old, new, False)
                if c:
                    with merge_lock:
                        np.subtract.at(volumes, old[:c], 1)
                        np.add.at(volumes, new[:c], 1)
                        changed_total[0] += c

        workers = [threading.Thread(target=worker, args=(w,)) for w in range(threads)]
        for t in workers:
            t.start()
        for t in workers:
            t.join()
        passes += 1
        if on_pass is not None:
            on_pass(p, changed_total[0], labels, volumes)
        if changed_total[0] <= threshold:
            converged = True
            break
    return Labelling(labels, volumes, passes, converged, aux_words)


# ---------------------------------------------------------------------------
# reference implementation of the update decision (tests, fixed-point checks)


def candidate_scores(gs: Graph, labels: np.ndarray, volumes: np.ndarray,
                     x: int, gamma: float) -> dict[int, float]:
    """Scores of every candidate label for node ``x`` (same form as the kernel).

    Isolated nodes never update and have no candidates.
    """
    neigh = labels[gs.successors(x)]
    if neigh.size == 0:
        return {}
    cur = int(labels[x])
    scores: dict[int, float] = {}
    for lab, k in Counter(neigh.tolist()).items():
        v = int(volumes[lab]) - (1 if lab == cur else 0)
        scores[lab] = k * (1.0 + gamma) - gamma * v
    scores.setdefault(cur, -gamma * float(volumes[cur] - 1))
    if volumes[x] == 0:
        scores[x] = 0.0
    return scores


def node_maximisers(gs: Graph, labels: np.ndarray, volumes: np.ndarray,
                    x: int, gamma: float) -> set[int]:
    """Labels attaining the best score for ``x``; empty for isolated nodes."""
    scores = candidate_scores(gs, labels, volumes, x, gamma)
    if not scores:
        return set()
    best = max(scores.values())
    return {lab for lab, sc in scores.items() if sc == best}


def is_fixed_point(gs: Graph, labelling: Labelling, gamma: float) -> bool:
    """True when no node would change label under a further pass."""
    for x in range(gs.n):
        maxi = node_maximisers(gs, labelling.labels, labelling.volumes, x, gamma)
        if maxi and int(labelling.labels[x]) not in maxi:
            return False
    return True
