"""Command-line interface: ``treembed <command> ...``.

Exit codes: 0 ok, 2 usage / invalid configuration, 3 unreadable or malformed
input, 4 input violates an invariant (not a tree, non-monotone colouring, ...).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, _accel
from . import beta_bounds as bb
from . import coloring as col
from . import distortion as dst
from . import graphs, io
from .embedding import embed_tree
from .errors import DomainError, SizeError, TreembedError, ValidationError
from .pipeline import run_pipeline

EXIT_USAGE, EXIT_PARSE, EXIT_INVARIANT = 2, 3, 4

DESCRIPTION = "Embed weighted trees into lp, measure distortion of finite maps and evaluate convexity lower bounds."

FAMILIES = ("tree", "umbel", "parasol", "geometric", "random")


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _meta(args, **extra):
    meta = {"command": args.command, "seed": args.seed, "version": __version__}
    meta.update(extra)
    return meta


def _emit(args, text, summary=None):
    if args.out:
        Path(args.out).write_text(text)
        if summary:
            print(summary)
    else:
        sys.stdout.write(text)
        if summary:
            print(summary, file=sys.stderr)


def _tree_coloring(args, tree):
    if getattr(args, "coloring", None):
        return io.load_coloring(args.coloring, tree)
    return col.optimal_caterpillar_coloring(tree)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_gen(args):
    fam = args.family
    need = {"tree": ("b", "h"), "umbel": ("b",), "parasol": ("b", "l"), "geometric": ("H",),
            "random": ("n",)}[fam]
    missing = [k for k in need if getattr(args, k) is None]
    if missing:
        raise UsageError(f"gen {fam} requires --{' --'.join(missing)}")
    try:
        if fam == "tree":
            obj = graphs.make_complete_tree(args.b, args.h)
        elif fam == "umbel":
            obj = graphs.make_umbel(args.b)
        elif fam == "parasol":
            obj = graphs.make_parasol(args.b, args.l)
        elif fam == "geometric":
            obj = graphs.make_geometric_binary(args.H)
        else:
            obj = graphs.make_random_tree(args.n, args.low, args.high, args.seed)
    except (ValueError, TreembedError) as exc:
        raise UsageError(str(exc)) from exc
    meta = _meta(args, family=fam)
    if isinstance(obj, graphs.WeightedRootedTree):
        data, edges = io.tree_to_json(obj, meta), obj.edge_count
    else:
        data, edges = io.graph_to_json(obj, meta), len(obj.edges)
    _emit(args, io.dumps(data), f"vertices={obj.n} edges={edges}")


def cmd_kappa(args):
    tree = io.load_tree(args.tree)
    out = {"kappa": col.caterpillar_number(tree), "meta": _meta(args)}
    if args.brute:
        try:
            out["brute_force"] = col.brute_force_kappa(tree)
        except SizeError as exc:
            raise UsageError(str(exc)) from exc
    _emit(args, io.dumps(out))


def cmd_color(args):
    tree = io.load_tree(args.tree)
    c = col.all_distinct_coloring(tree) if args.mode == "distinct" else col.optimal_caterpillar_coloring(tree)
    stats = col.coloring_stats(c).to_json()
    if args.out:
        Path(args.out).write_text(io.dumps(c.to_json()))
        print(io.dumps(stats), end="")
    else:
        sys.stdout.write(io.dumps({"coloring": c.to_json(), "stats": stats}))


def cmd_embed(args):
    tree = io.load_tree(args.tree)
    coloring = _tree_coloring(args, tree)
    points = embed_tree(tree, coloring, args.p)
    if args.ratios:
        io.ratio_table_csv(graphs.tree_distance_matrix(tree), points.pairwise(), args.ratios)
    _emit(args, io.points_to_jsonl(points))


def cmd_distort(args):
    src, tgt, assign = io.load_map(args.map)
    fmap = dst.PointMap(io.load_space(src), io.load_space(tgt), assign)
    if args.quotient:
        rep = dst.codistortion(fmap)
    else:
        rep = dst.distortion(fmap)
    out = rep.to_json()
    out["meta"] = _meta(args, mode="quotient" if args.quotient else "embedding")
    _emit(args, io.dumps(out))


def cmd_strong(args):
    tree = io.load_tree(args.tree)
    coloring = _tree_coloring(args, tree)
    kappa = col.kappa_achieved(coloring)
    delta = args.delta if args.delta is not None else 1.0 / (4 * max(kappa, 1))
    if not 0 < delta <= 1:
        raise UsageError("--delta must lie in (0, 1]")
    witness = col.verify_strong(coloring, delta)
    out = {"kappa": kappa, "delta": delta, "pass": witness is None,
           "witness": None if witness is None else list(witness), "meta": _meta(args)}
    if tree.n > 1:
        best, pair = col.best_delta_witness(coloring)
        out["delta_best"] = best
        out["delta_best_witness"] = list(pair)
    _emit(args, io.dumps(out))


def cmd_lift(args):
    src, tgt, assign = io.load_map(args.map)
    tree = io.load_tree(tgt)
    fmap = dst.PointMap(io.load_space(src), graphs.metric_of(tree), assign)
    quo = dst.codistortion(fmap)
    g = dst.lift_tree_quotient(fmap, tree)
    lifted = dst.distortion(g)
    out = {
        "codist_quotient": quo.codist,
        "dist_lift": lifted.dist,
        "lift_ok": lifted.dist <= quo.codist + args.tol,
        "assign": [int(a) for a in g.assign],
        "meta": _meta(args),
    }
    _emit(args, io.dumps(out))


def cmd_bounds(args):
    try:
        rows = bb.gap_report(args.h, args.p, args.gamma, args.b, measure_limit=args.measure_limit)
    except (ValueError, DomainError) as exc:
        raise UsageError(str(exc)) from exc
    header = f"command=bounds seed={args.seed} p={args.p!r} gamma={args.gamma!r} b={args.b} version={__version__}"
    _emit(args, bb.rows_to_csv(rows, header))


def cmd_pipeline(args):
    tree = io.load_tree(args.tree)
    rep = run_pipeline(tree, args.p)
    out = rep.to_json()
    out["meta"] = _meta(args, p=args.p)
    _emit(args, io.dumps(out))
    if not rep.within_bounds:
        return EXIT_INVARIANT
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _p_value(text):
    p = float(text)
    if not 1 < p < float("inf"):
        raise argparse.ArgumentTypeError("p must lie in (1, inf)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    common.add_argument("--workers", type=int, default=1, help="numba worker threads")
    common.add_argument("--tol", type=float, default=1e-9, help="comparison tolerance")

    parser = argparse.ArgumentParser(prog="treembed", description=DESCRIPTION)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a tree or graph")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("--b", type=int)
    g.add_argument("--h", type=int)
    g.add_argument("--l", type=int, help="parasol levels")
    g.add_argument("--H", type=int, help="geometric tree height")
    g.add_argument("--n", type=int)
    g.add_argument("--low", type=float, default=1.0)
    g.add_argument("--high", type=float, default=1.0)
    g.set_defaults(func=cmd_gen)

    k = sub.add_parser("kappa", parents=[common], help="caterpillar number of a tree")
    k.add_argument("tree")
    k.add_argument("--brute", action="store_true", help="also run the exhaustive oracle")
    k.set_defaults(func=cmd_kappa)

    c = sub.add_parser("color", parents=[common], help="monotone colouring of a tree")
    c.add_argument("tree")
    c.add_argument("--mode", choices=("optimal", "distinct"), default="optimal")
    c.set_defaults(func=cmd_color)

    e = sub.add_parser("embed", parents=[common], help="embed a tree into lp")
    e.add_argument("tree")
    e.add_argument("--p", type=_p_value, default=2.0)
    e.add_argument("--coloring")
    e.add_argument("--ratios", help="also write the pairwise ratio table as CSV")
    e.set_defaults(func=cmd_embed)

    d = sub.add_parser("distort", parents=[common], help="distortion or codistortion of a map")
    d.add_argument("map")
    d.add_argument("--quotient", action="store_true", help="report Lip, coLip and codist instead")
    d.set_defaults(func=cmd_distort)

    s = sub.add_parser("strong", parents=[common], help="delta-strong check of a colouring")
    s.add_argument("tree")
    s.add_argument("--coloring")
    s.add_argument("--delta", type=float, help="default 1/(4 kappa)")
    s.set_defaults(func=cmd_strong)

    li = sub.add_parser("lift", parents=[common], help="lift a quotient map onto a tree")
    li.add_argument("map")
    li.set_defaults(func=cmd_lift)

    b = sub.add_parser("bounds", parents=[common], help="lower/upper bound gap report (CSV)")
    b.add_argument("--h", type=_int_list, default=[2, 4, 8, 16])
    b.add_argument("--p", type=_p_value, default=2.0)
    b.add_argument("--gamma", type=float, default=0.25)
    b.add_argument("--b", type=int, default=2)
    b.add_argument("--measure-limit", type=int, default=20000)
    b.set_defaults(func=cmd_bounds)

    pl = sub.add_parser("pipeline", parents=[common], help="colour, embed and measure a tree")
    pl.add_argument("tree")
    pl.add_argument("--p", type=_p_value, default=2.0)
    pl.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    if not args.tol >= 0:
        parser.error("--tol must be >= 0")
    _accel.set_workers(args.workers)
    try:
        return args.func(args) or 0
    except UsageError as exc:
        print(f"treembed {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except io.ParseError as exc:
        print(f"treembed {args.command}: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, TreembedError) as exc:
        print(f"treembed {args.command}: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
