"""``pspt`` command line: build, query, bench, eval, gen, batch.

Exit status is 0 on success, 2 on usage errors and 1 on runtime errors.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import sys
import time
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import generators, storage
from .distributed import ClusterPlan, account, batch_query, read_pairs, write_results_csv
from .errors import PsptError
from .experiments import benchmark, run_eval, sample_pairs
from .graph import read_edge_list, write_edge_list
from .index import build_index, default_threads
from .query import query, query_multi

DEFAULT_ALPHAS = "1/16,1/8,1/4,1/2,1,2,4,8,16,32"


class UsageError(Exception):
    pass


def _positive_float(text: str) -> float:
    try:
        value = float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text!r}")
    return value


def _alpha_list(text: str) -> list[float]:
    return [_positive_float(x) for x in text.split(",") if x.strip()]


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _load_index(path: str):
    with open(path, "rb") as fh:
        return storage.deserialize(fh)


def cmd_build(args) -> int:
    graph = read_edge_list(args.graph)
    t0 = time.perf_counter()
    index = build_index(graph, args.alpha, threads=args.threads or default_threads())
    elapsed = time.perf_counter() - t0
    with open(args.out, "wb") as fh:
        size = storage.serialize(index, fh)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["nodes", "surviving", "alpha", "beta", "build_seconds",
                     "ms_per_node", "index_bytes", "bytes_per_node"])
    surv = max(index.surviving_count, 1)
    writer.writerow([index.node_count, index.surviving_count, index.alpha, index.beta,
                     f"{elapsed:.3f}", f"{1000 * elapsed / surv:.4f}", size, f"{size / surv:.1f}"])
    return 0


def cmd_query(args) -> int:
    graph = read_edge_list(args.graph)
    index = _load_index(args.index)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["rank", "distance", "resolution", "meeting_node", "path"])
    if args.multi is None:
        out = query(index, graph, args.s, args.t)
        path = " ".join(map(str, out.path.nodes)) if out.path else ""
        meet = "" if out.meeting_node is None else out.meeting_node
        writer.writerow([1, repr(out.distance), out.resolution.value, meet, path])
        return 0
    limit = None if args.multi == 0 else args.multi
    for rank, p in enumerate(query_multi(index, graph, args.s, args.t, limit), start=1):
        writer.writerow([rank, repr(p.length), "multi", "", " ".join(map(str, p.nodes))])
    return 0


def cmd_bench(args) -> int:
    graph = read_edge_list(args.graph)
    index = _load_index(args.index)
    candidates = graph.ids[np.flatnonzero(index.survives)] if args.survivors_only else graph.ids
    pairs = sample_pairs(np.asarray(candidates), args.pairs, args.seed)
    result = benchmark(index, graph, pairs)
    with _output(args.out) as fh:
        result.write_csv(fh)
    return 0


def cmd_eval(args) -> int:
    graph = read_edge_list(args.graph)
    modes = ("consistent", "arbitrary") if args.tie_mode == "both" else (args.tie_mode,)
    report = run_eval(
        graph,
        args.alpha,
        node_sample=args.node_sample,
        rounds=args.rounds,
        pairs_per_round=args.pairs_per_round,
        seed=args.seed,
        tie_modes=modes,
        latency=args.latency,
        threads=args.threads,
    )
    with _output(args.out) as fh:
        report.write_csv(fh)
    return 0


def cmd_gen(args) -> int:
    params: dict[str, object] = {}
    if args.model in ("pa", "er", "line"):
        if args.n is None:
            raise UsageError(f"--n is required for model {args.model}")
        params["n"] = args.n
    if args.model == "pa":
        if args.m is None:
            raise UsageError("--m is required for model pa")
        params["m"] = args.m
    if args.model == "er":
        if args.p is None:
            raise UsageError("--p is required for model er")
        params["p"] = args.p
    if args.model == "grid":
        if args.rows is None or args.cols is None:
            raise UsageError("--rows and --cols are required for model grid")
        params.update(rows=args.rows, cols=args.cols)
    try:
        graph = generators.generate(args.model, seed=args.seed, max_weight=args.max_weight, **params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with _output(args.out) as fh:
        write_edge_list(graph, fh, weighted=args.max_weight > 1)
    return 0


def cmd_batch(args) -> int:
    graph = read_edge_list(args.graph)
    index = _load_index(args.index)
    with open(args.pairs, encoding="utf-8") as fh:
        pairs = read_pairs(fh)
    if not pairs:
        raise UsageError("pairs file is empty")
    run = batch_query(index, graph, pairs, ClusterPlan(args.machines, args.seed), want_paths=args.paths)
    with _output(args.out) as fh:
        write_results_csv(run.results, fh, with_paths=args.paths)
    row = account(run).as_row()
    if args.accounting:
        with open(args.accounting, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(row), lineterminator="\n")
            writer.writeheader()
            writer.writerow(row)
    else:
        writer = csv.DictWriter(sys.stderr, fieldnames=list(row), lineterminator="\n")
        writer.writeheader()
        writer.writerow(row)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pspt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build and save an index")
    p.add_argument("graph")
    p.add_argument("--alpha", type=_positive_float, default=4.0)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker threads (default: $PSPT_THREADS or 1)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="answer one s-t query")
    p.add_argument("index")
    p.add_argument("graph")
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.add_argument("--multi", nargs="?", type=int, const=0, default=None, metavar="K",
                   help="list several paths (at most K; all when K is omitted)")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="latency of the engine against bidirectional search")
    p.add_argument("index")
    p.add_argument("graph")
    p.add_argument("--pairs", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--survivors-only", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("eval", help="intersection and accuracy sweep over alpha")
    p.add_argument("graph")
    p.add_argument("--alpha", type=_alpha_list, default=_alpha_list(DEFAULT_ALPHAS))
    p.add_argument("--node-sample", type=_positive_int, default=200)
    p.add_argument("--pairs-per-round", type=_positive_int, default=None)
    p.add_argument("--rounds", type=_positive_int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tie-mode", choices=("consistent", "arbitrary", "both"), default="consistent")
    p.add_argument("--latency", action="store_true", help="also time engine and baseline")
    p.add_argument("--threads", type=_positive_int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", help="write a synthetic edge list")
    p.add_argument("model", choices=generators.MODELS)
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--m", type=_positive_int)
    p.add_argument("--p", type=float)
    p.add_argument("--rows", type=_positive_int)
    p.add_argument("--cols", type=_positive_int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-weight", type=_positive_int, default=1,
                   help="uniform integer weights in [1, W] (default: unit weights)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("batch", help="simulated distributed batch queries")
    p.add_argument("index")
    p.add_argument("graph")
    p.add_argument("pairs", help="file with one 'u v' pair per line")
    p.add_argument("--machines", type=_positive_int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--paths", action="store_true")
    p.add_argument("--out")
    p.add_argument("--accounting", help="write the accounting row here instead of stderr")
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pspt: error: {exc}", file=sys.stderr)
        return 2
    except (PsptError, OSError, ValueError) as exc:
        print(f"pspt: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
