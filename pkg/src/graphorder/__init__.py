"""Graph reordering and compression toolkit.

Reorders graph node ids to improve the size of a windowed, gap-coded
adjacency representation, and measures how well an ordering recovers known
structure (host partitions).
"""

from .graph import (
    Graph,
    SymSplit,
    apply_permutation,
    identity_permutation,
    invert_permutation,
    load_edge_list,
    load_permutation,
    random_permutation,
    store_permutation,
    sym_split,
    transpose,
)
from .codec import (
    CodecConfig,
    CompressedGraph,
    CompressionStats,
    compress,
    compression_stats,
    load_compressed,
    measure,
    pearson,
    store_compressed,
)
from .orderings import OrderingSpec, compute_ordering, order_bfs, order_gray, order_lex, order_shingle
from .labelprop import ApmConfig, Labelling, apm_update_score, cluster_size_histogram, run_apm, symmetrize
from .llp import LlpConfig, compose, run_llp
from .partition import (
    Partition,
    entropy,
    host_transition_rate,
    induced_refinement,
    mutual_information,
    variation_of_information,
)

__version__ = "0.1.0"
