"""Command-line pipeline driver: ingest, permute, order, compress, report.

Reports are line-oriented ``key=value`` blocks appended to the report file
(one blank-line-separated block per run, with the configuration echoed),
plus an optional aligned text table when several orderings are compared.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .codec import (
    CodecConfig,
    compress,
    compression_stats,
    load_compressed,
    store_compressed,
)
from .graph import (
    Graph,
    apply_permutation,
    identity_permutation,
    load_binary,
    load_edge_list,
    load_permutation,
    store_binary,
    store_permutation,
)
from .llp import LlpConfig, run_llp
from .labelprop import ApmConfig
from .orderings import ORDERING_KINDS, OrderingSpec, compute_ordering
from .partition import (
    entropy,
    host_transition_rate,
    induced_refinement,
    load_partition,
    variation_of_information,
)

logger = logging.getLogger("graphorder")


# ---------------------------------------------------------------------------
# report utilities


def write_report(path, entries: dict) -> None:
    """Append one key=value block, blank-line terminated."""
    lines = "".join(f"{k}={v}\n" for k, v in entries.items()) + "\n"
    if path is None:
        sys.stdout.write(lines)
    else:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(lines)


def parse_report(path) -> list[dict]:
    """Parse a report file back into a list of key=value blocks."""
    blocks: list[dict] = []
    current: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                if current:
                    blocks.append(current)
                    current = {}
                continue
            if line.startswith("#") or "=" not in line:
                continue
            key, value = line.split("=", 1)
            try:
                parsed: object = int(value)
            except ValueError:
                try:
                    parsed = float(value)
                except ValueError:
                    parsed = value
            current[key] = parsed
    if current:
        blocks.append(current)
    return blocks


def _load_graph(path: str) -> Graph:
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head == b"GOBGRAF1":
        return load_binary(path)
    return load_edge_list(path, format="text")


def _codec_config(args) -> CodecConfig:
    return CodecConfig.parse_code(args.code, window=args.window,
                                  max_ref_chain=args.max_ref_chain)


def _add_codec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", type=int, default=7, help="reference window size")
    p.add_argument("--max-ref-chain", type=int, default=3,
                   help="maximum length of a reference chain")
    p.add_argument("--code", default="zeta3",
                   help="residual code: gamma, delta, or zetaK (default zeta3)")


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest(args) -> int:
    pairs: list[tuple[str, str]] = []
    with open(args.input, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise SystemExit(f"{args.input}:{lineno}: expected 'src dst', got {raw!r}")
            pairs.append((parts[0], parts[1]))

    numeric = all(a.isdigit() and b.isdigit() for a, b in pairs)
    if args.ids == "dense" and not numeric:
        raise SystemExit(f"{args.input}: non-integer node ids with --ids dense")
    tokens: dict[str, int] = {}
    if numeric and args.ids != "intern":
        src = [int(a) for a, _ in pairs]
        dst = [int(b) for _, b in pairs]
    else:
        src, dst = [], []
        for a, b in pairs:  # intern in first-seen order, line by line
            src.append(tokens.setdefault(a, len(tokens)))
            dst.append(tokens.setdefault(b, len(tokens)))

    n = (max(max(src), max(dst)) + 1) if src else 0
    g = Graph.from_edges(n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64))
    store_binary(g, args.output)
    id_map = args.id_map or (args.output + ".ids")
    with open(id_map, "w", encoding="utf-8") as fh:
        if tokens:
            fh.writelines(f"{tok}\n" for tok in sorted(tokens, key=tokens.get))
        else:
            fh.writelines(f"{i}\n" for i in range(n))
    logger.info("ingested %s: n=%d m=%d -> %s", args.input, g.n, g.m, args.output)
    return 0


def cmd_permute(args) -> int:
    g = _load_graph(args.graph)
    p = load_permutation(args.permutation)
    store_binary(apply_permutation(g, p), args.output)
    return 0


def _compute_order(g: Graph, args) -> np.ndarray:
    kind = args.kind
    if kind == "llp":
        cfg = LlpConfig(
            resolution_levels=args.llp_levels,
            iterations=args.llp_iterations,
            seed=args.seed,
            apm=ApmConfig(gamma=0.0, max_passes=args.max_passes),
        )
        initial = load_permutation(args.initial) if args.initial else None
        return run_llp(g, initial, cfg, threads=args.threads)
    seed = args.seed if kind in ("random", "shingle") else None
    return compute_ordering(g, OrderingSpec(kind=kind, seed=seed))


def cmd_order(args) -> int:
    g = _load_graph(args.graph)
    perm = _compute_order(g, args)
    store_permutation(perm, args.output, metadata={
        "kind": args.kind, "seed": args.seed, "n": g.n,
    })
    return 0


def _measure_into_report(g: Graph, perm, cfg: CodecConfig, args, extra: dict,
                         store_path=None):
    h = apply_permutation(g, perm)
    cg = compress(h, cfg)
    if store_path is not None:
        store_compressed(cg, store_path)
    stats = compression_stats(cg, h)
    entries = {
        **extra,
        "window": cfg.window,
        "max_ref_chain": cfg.max_ref_chain,
        "residual_code": cfg.code_label,
        **{k: v for k, v in stats.as_dict().items()},
    }
    write_report(args.report, entries)
    return stats


def cmd_compress(args) -> int:
    g = _load_graph(args.graph)
    perm = load_permutation(args.permutation) if args.permutation else identity_permutation(g.n)
    if perm.size != g.n:
        raise SystemExit(f"permutation size {perm.size} does not match graph size {g.n}")
    cfg = _codec_config(args)
    _measure_into_report(g, perm, cfg, args,
                         {"command": "compress", "graph": args.graph,
                          "permutation": args.permutation or "identity"},
                         store_path=args.output)
    return 0


def cmd_stats(args) -> int:
    g = _load_graph(args.graph)
    perm = load_permutation(args.permutation) if args.permutation else identity_permutation(g.n)
    if perm.size != g.n:
        raise SystemExit(f"permutation size {perm.size} does not match graph size {g.n}")
    cfg = _codec_config(args)
    stats = _measure_into_report(g, perm, cfg, args,
                                 {"command": "stats", "graph": args.graph,
                                  "permutation": args.permutation or "identity"})
    if args.report is not None:
        sys.stdout.write(f"bits_per_link={stats.bits_per_link}\n")
    return 0


def cmd_hoststats(args) -> int:
    hosts = load_partition(args.hosts)
    perm = load_permutation(args.permutation)
    if perm.size != hosts.n:
        raise SystemExit(f"permutation size {perm.size} does not match host file size {hosts.n}")
    refined = induced_refinement(hosts, perm)
    entries = {
        "command": "hoststats",
        "hosts": args.hosts,
        "permutation": args.permutation,
        "ht": host_transition_rate(hosts, perm),
        "h_hosts": entropy(hosts),
        "h_induced": entropy(refined),
        "vi": variation_of_information(hosts, refined),
    }
    write_report(args.report, entries)
    return 0


def cmd_decompress(args) -> int:
    cg = load_compressed(args.input)
    store_binary(cg.decode_graph(), args.output)
    return 0


def cmd_pipeline(args) -> int:
    g = _load_graph(args.graph)
    cfg = _codec_config(args)
    hosts = load_partition(args.hosts) if args.hosts else None
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    rows = []
    for kind in args.orderings.split(","):
        kind = kind.strip()
        ns = argparse.Namespace(**vars(args))
        ns.kind = kind
        perm = _compute_order(g, ns)
        store_permutation(perm, outdir / f"{kind}.perm",
                          metadata={"kind": kind, "seed": args.seed, "n": g.n})
        stats = _measure_into_report(
            g, perm, cfg, args,
            {"command": "pipeline", "graph": args.graph, "ordering": kind,
             "seed": args.seed},
            store_path=(outdir / f"{kind}.bvg") if args.store_compressed else None)
        row = {"ordering": kind, "bits_per_link": stats.bits_per_link,
               "copied_arcs": stats.copied_arc_fraction,
               "avg_gap_cost": stats.avg_gap_cost,
               "avg_distance_cost": stats.avg_distance_cost}
        if hosts is not None:
            row["ht"] = host_transition_rate(hosts, perm)
            row["vi"] = variation_of_information(hosts, induced_refinement(hosts, perm))
        rows.append(row)

    cols = list(rows[0].keys())
    widths = {c: max(len(c), 12) for c in cols}
    header = "  ".join(f"{c:<{widths[c]}}" for c in cols)
    table = [header]
    for row in rows:
        cells = []
        for c in cols:
            v = row[c]
            cells.append(f"{v:<{widths[c]}.4f}" if isinstance(v, float) else f"{v!s:<{widths[c]}}")
        table.append("  ".join(cells))
    text = "\n".join(table) + "\n"
    sys.stdout.write(text)
    if args.report:
        with open(args.report, "a", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphorder",
                                 description="graph reordering and compression toolkit")
    ap.add_argument("--version", action="version", version=f"graphorder {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="edge list -> dense-id binary graph + id map")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--ids", choices=("auto", "dense", "intern"), default="auto",
                   help="id policy: reuse integer ids or intern arbitrary tokens")
    p.add_argument("--id-map", help="sidecar path (default: OUTPUT.ids)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("permute", help="apply a permutation file to a graph")
    p.add_argument("graph")
    p.add_argument("permutation")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_permute)

    p = sub.add_parser("order", help="compute an ordering and write the permutation")
    p.add_argument("graph")
    p.add_argument("--kind", choices=ORDERING_KINDS + ("llp",), default="llp")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1,
                   help="1 = deterministic; >1 parallelises clustering")
    p.add_argument("--llp-iterations", type=int, default=12)
    p.add_argument("--llp-levels", type=int, default=7)
    p.add_argument("--max-passes", type=int, default=100)
    p.add_argument("--initial", help="starting permutation file (llp only)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("compress", help="compress a graph under a permutation")
    p.add_argument("graph")
    p.add_argument("--permutation")
    _add_codec_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report", help="append key=value stats to this file")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("stats", help="measure compression without storing the output")
    p.add_argument("graph")
    p.add_argument("--permutation")
    _add_codec_flags(p)
    p.add_argument("--report")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("hoststats", help="host-recovery measures for a permutation")
    p.add_argument("hosts")
    p.add_argument("--permutation", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_hoststats)

    p = sub.add_parser("decompress", help="expand a compressed graph back to binary form")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("pipeline", help="order + compress + report for several orderings")
    p.add_argument("graph")
    p.add_argument("--orderings", default="natural,random,bfs,lex,gray,shingle,llp")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--llp-iterations", type=int, default=12)
    p.add_argument("--llp-levels", type=int, default=7)
    p.add_argument("--max-passes", type=int, default=100)
    p.add_argument("--initial", help="starting permutation file (llp only)")
    _add_codec_flags(p)
    p.add_argument("--hosts", help="host file: adds HT/VI columns")
    p.add_argument("--outdir", default="graphorder-out")
    p.add_argument("--store-compressed", action="store_true")
    p.add_argument("--report")
    p.set_defaults(func=cmd_pipeline)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"graphorder: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
