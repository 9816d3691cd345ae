"""``hyperstream`` command line: partition, evaluate, bench, profile,
convert, generate."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import bench
from .baselines import hashing_partition, minmax_n2p_partition
from .freight import CONNECTIVITY, OBJECTIVES, ScoreParams, partition_graph, partition_stream
from .generators import GENERATORS, generate_instance
from .io import (FormatError, GraphStreamFile, HgrFile, StreamError, parse_hgr, parse_metis_graph,
                 parse_vstream, read_assignment, transpose_back, transpose_to_stream, write_assignment,
                 write_hgr, write_metis_graph, write_vstream)
from .metrics import REPORT_COLUMNS, evaluate, evaluate_graph, graph_balance
from .streaming import ALGORITHMS, partition_file

FORMATS = ("hgr", "vstream", "graph")


def _format_of(path: str, given: str | None) -> str:
    if given and given != "auto":
        return given
    ext = os.path.splitext(path)[1].lstrip(".").lower()
    if ext not in FORMATS:
        raise SystemExit(f"error: cannot tell the format of {path!r}; pass --format")
    return ext


def _partition(args) -> int:
    fmt = _format_of(args.input, args.format)
    if fmt == "vstream":
        res = partition_file(args.input, args.k, args.algorithm, args.epsilon, args.objective, args.seed)
    elif fmt == "graph":
        g = parse_metis_graph(args.input)
        total = g.total_vertex_weight()
        params = ScoreParams.for_instance(g.num_vertices, len(g.adj) // 2, args.k,
                                          total_weight=int(total), epsilon=args.epsilon)
        if args.algorithm == "freight":
            res = partition_graph(g, params, args.seed)
        elif args.algorithm == "hashing":
            res = hashing_partition(g, args.k, params.l_max, args.seed)
        else:
            raise SystemExit("error: minmax-n2p needs a hypergraph input")
    else:
        h = parse_hgr(args.input)
        s = transpose_to_stream(h)
        total = s.total_vertex_weight()
        params = ScoreParams.for_instance(h.num_vertices, h.num_nets, args.k, total_weight=int(total),
                                          epsilon=args.epsilon, objective=args.objective)
        if args.algorithm == "freight":
            res = partition_stream(s, params, args.seed)
        elif args.algorithm == "hashing":
            res = hashing_partition(s, args.k, params.l_max, args.seed)
        else:
            res = minmax_n2p_partition(s, args.k, params.l_max, args.seed)
    write_assignment(args.output, res.assignment)
    if args.metadata:
        with open(args.metadata, "w", encoding="utf-8") as fh:
            json.dump(res.metadata(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    if res.balance_violation:
        print("warning: no feasible block for some vertex; balance constraint violated", file=sys.stderr)
    return 0


def _evaluate(args) -> int:
    fmt = _format_of(args.input, args.format)
    assign = read_assignment(args.assignment)
    if fmt == "graph":
        g = parse_metis_graph(args.input)
        cut = evaluate_graph(g, assign, args.k)
        imb, bal = graph_balance(g, assign, args.k, args.epsilon)
        print("edge_cut,imbalance,balanced")
        print(f"{bench._cell(float(cut))},{imb:.6f},{int(bal)}")
        return 0
    h = parse_hgr(args.input) if fmt == "hgr" else transpose_back(parse_vstream(args.input))
    rep = evaluate(h, assign, args.k, args.epsilon)
    print(",".join(REPORT_COLUMNS))
    print(rep.csv_row())
    return 0


def _bench(args) -> int:
    cfg = bench.parse_config(args.config)
    if args.out:
        cfg.output = args.out
    if not cfg.output:
        raise SystemExit("error: no output path; pass --out or set 'output' in the config")

    def progress(row):
        if args.verbose:
            print(f"{row['instance']} {row['algorithm']} k={row['k']} rep={row['repetition']}: "
                  f"{row['status']}", file=sys.stderr)

    table = bench.run_suite(cfg, progress)
    failed = sum(r["status"] != "ok" for r in table.rows)
    print(f"{len(table)} rows written to {cfg.output} ({failed} failed)")
    return 0


def _profile(args) -> int:
    table = bench.ResultTable.from_csv(args.results)
    prof = bench.performance_profile(table, args.metric)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["algorithm", "tau", "fraction"])
        for alg, tau, frac in bench.profile_rows(prof):
            w.writerow([alg, repr(tau), repr(frac)])
    finally:
        if args.out:
            out.close()
    if args.baseline:
        algs = {r["algorithm"] for r in table.ok_rows()}
        if args.baseline not in algs:
            raise SystemExit(f"error: baseline {args.baseline!r} not in results")
        imp = bench.improvement_over(table, args.baseline, args.metric)
        print(f"# improvement over {args.baseline} (%), {args.metric}", file=sys.stderr)
        for k, row in imp.items():
            cells = " ".join(f"{a}={v:.1f}" for a, v in sorted(row.items()))
            print(f"# k={k}: {cells}", file=sys.stderr)
    return 0


def _convert(args) -> int:
    src, dst = args.src_format, args.dst_format
    if src == dst:
        raise SystemExit("error: source and target formats are the same")
    if src == "graph" or dst == "graph":
        raise SystemExit("error: graph files only convert to themselves")
    if src == "hgr":
        write_vstream(transpose_to_stream(parse_hgr(args.input)), args.output)
    else:
        write_hgr(transpose_back(parse_vstream(args.input)), args.output)
    return 0


def _param(text: str):
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        num = float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key} needs a number") from None
    return key.strip(), int(num) if num.is_integer() and "." not in val else num


def _generate(args) -> int:
    obj = generate_instance(args.kind, args.seed, **dict(args.param))
    if isinstance(obj, GraphStreamFile):
        write_metis_graph(obj, args.output)
    elif isinstance(obj, HgrFile):
        fmt = _format_of(args.output, args.format)
        if fmt == "vstream":
            write_vstream(transpose_to_stream(obj), args.output)
        else:
            write_hgr(obj, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperstream", description="One-pass streaming hypergraph partitioning.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("partition", help="partition a .hgr, .vstream or .graph file")
    q.add_argument("input")
    q.add_argument("--algorithm", choices=ALGORITHMS, default="freight")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--epsilon", type=float, default=0.03)
    q.add_argument("--objective", choices=OBJECTIVES, default=CONNECTIVITY)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--output", required=True, help="assignment file, one 0-based block per line")
    q.add_argument("--format", choices=("auto",) + FORMATS, default="auto")
    q.add_argument("--metadata", help="also write run metadata as JSON")
    q.set_defaults(func=_partition)

    q = sub.add_parser("evaluate", help="cut-net, connectivity and balance of an assignment")
    q.add_argument("input")
    q.add_argument("assignment")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--epsilon", type=float, default=0.03)
    q.add_argument("--format", choices=("auto",) + FORMATS, default="auto")
    q.set_defaults(func=_evaluate)

    q = sub.add_parser("bench", help="run a suite described by a key=value config")
    q.add_argument("--config", required=True)
    q.add_argument("--out")
    q.add_argument("--verbose", action="store_true")
    q.set_defaults(func=_bench)

    q = sub.add_parser("profile", help="performance profile of a results CSV")
    q.add_argument("results")
    q.add_argument("--metric", choices=bench.METRICS, default="connectivity")
    q.add_argument("--out")
    q.add_argument("--baseline", help="also report improvement over this algorithm")
    q.set_defaults(func=_profile)

    q = sub.add_parser("convert", help="convert between .hgr and .vstream")
    q.add_argument("--from", dest="src_format", choices=FORMATS, required=True)
    q.add_argument("--to", dest="dst_format", choices=FORMATS, required=True)
    q.add_argument("input")
    q.add_argument("output")
    q.set_defaults(func=_convert)

    q = sub.add_parser("generate", help="write a synthetic instance")
    q.add_argument("kind", choices=sorted(GENERATORS))
    q.add_argument("output")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE")
    q.add_argument("--format", choices=("auto", "hgr", "vstream"), default="auto")
    q.set_defaults(func=_generate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, StreamError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
