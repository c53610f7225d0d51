"""Command-line interface.

Exit codes: 0 success, 2 input/parse error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io as mio
from .bench import RUNNERS, BenchConfig
from .errors import GenerationFailed, MultiportError, ResonantBond, SingularMatrix
from .graph import glue_graphs, graph_scattering, random_graph
from .linalg import rel_error
from .metanet import DEFAULT_K
from .network import convert
from .reduction import evaluate, evaluate_zy, iterative_cascade, make_plan, plan_reduction
from .update import SubsystemUpdate, update_subsystem
from .waves import connected_waves

EXIT_OK, EXIT_PARSE, EXIT_NUMERIC = 0, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def parse_complex(text: str) -> complex:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}") from None
    if len(parts) == 1:
        return complex(parts[0])
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}")
    return complex(*parts)


def parse_int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("n-bus values must be positive integers")
    return vals


def parse_pair(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'i:j', got {text!r}") from None


def _emit(payload, args):
    text = json.dumps(payload, indent=2)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def _result_payload(matrix, labels, rep: str) -> dict:
    return {
        "representation": rep,
        "ports": [[n, int(p)] for n, p in labels],
        "matrix": mio.matrix_to_json(matrix),
    }


def _load_networks(paths) -> dict:
    nets = {}
    for p in paths:
        sys_ = mio.load_network(p)
        name = sys_.name or Path(p).stem
        nets[name] = sys_.to("S") if sys_.representation.value != "S" else sys_
    return nets


def cmd_connect(args) -> int:
    nets = _load_networks(args.networks)
    scheme = mio.scheme_from_json(mio._load(args.scheme), nets, args.scheme)
    labels = scheme.free_labels()
    rep = args.representation.upper()
    cache, embedded = None, ()
    if args.method == "iterative":
        res = iterative_cascade(scheme)
        if rep != "S":
            res = convert(res, "S", rep)
    else:
        plan = make_plan(scheme, ()) if args.method == "global" else plan_reduction(scheme)
        embedded = plan.connection
        if rep != "S" and args.eps is not None:
            res = evaluate_zy(scheme, plan, rep, args.eps)
        else:
            res, cache = evaluate(scheme, plan)
            if rep != "S":
                res = convert(res, "S", rep)
    payload = _result_payload(res, labels, rep)
    if args.recover_waves:
        if cache is None:
            raise CliError("wave recovery needs the global or a cache-producing reduced plan", 2)
        a = mio.vector_from_json(mio._load(args.recover_waves), args.recover_waves)
        a_c, b_c = connected_waves(cache, a)
        payload["connected_ports"] = [[n, int(p)] for n, p in cache.sup.c_labels]
        payload["psi_C"] = mio.vector_to_json(a_c + b_c)
        payload["phi_C"] = mio.vector_to_json(a_c - b_c)
    if args.cache_out:
        if cache is None:
            raise CliError("no cache is available for this plan", 2)
        mio.save_cache(args.cache_out, cache, scheme, embedded)
        payload["cache"] = str(args.cache_out)
    _emit(payload, args)
    return EXIT_OK


def cmd_update(args) -> int:
    cache, scheme, embedded = mio.load_cache(args.cache)
    if args.system not in scheme.systems:
        raise CliError(f"unknown system {args.system!r}", 2)
    m = mio.load_matrix(args.matrix)
    res, new = update_subsystem(cache, SubsystemUpdate(args.system, m))
    new_scheme = scheme.with_system(args.system, scheme.systems[args.system].with_matrix(m))
    payload = _result_payload(res, cache.sup.n_labels, "S")
    if args.verify:
        ref, _ = evaluate(new_scheme, make_plan(new_scheme, embedded), keep_cache=False)
        payload["rel_error_vs_fresh"] = rel_error(res, ref)
    if args.cache_out:
        mio.save_cache(args.cache_out, new, new_scheme, embedded)
    _emit(payload, args)
    return EXIT_OK


def cmd_bench(args) -> int:
    experiment = {"methods": "methods-compare", "update": "update-compare",
                  "epsilon": "epsilon-sweep"}[args.which]
    n_bus = args.n_bus or ([2, 5] if args.which == "epsilon" else [1, 2, 5, 10, 20])
    cfg = BenchConfig(experiment=experiment, n_bus=n_bus, trials=args.trials, seed=args.seed,
                      k=args.k, repetitions=args.repeats)
    report = RUNNERS[experiment](cfg)
    text = report.to_csv() if args.format == "csv" else report.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if report.summary and args.format == "csv":
        print(json.dumps(report.summary), file=sys.stderr)
    return EXIT_OK


def cmd_graph(args) -> int:
    if args.graph_cmd == "gen":
        g = random_graph(args.n_ports, args.density, args.seed, args.k)
        _emit(g.to_json(), args)
    elif args.graph_cmd == "scatter":
        g = mio.load_graph(args.graph)
        sol = graph_scattering(g, args.k)
        _emit({"representation": "S", "k": [args.k.real, args.k.imag],
               "matrix": mio.matrix_to_json(sol.S)}, args)
    else:
        g1, g2 = mio.load_graph(args.g1), mio.load_graph(args.g2)
        _emit(glue_graphs(g1, g2, args.pair).to_json(), args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="multiport", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("connect", help="evaluate a connection scheme")
    c.add_argument("scheme", help="scheme JSON")
    c.add_argument("networks", nargs="+", help="network JSON files (named by 'name' or stem)")
    c.add_argument("--method", choices=("global", "reduced", "iterative"), default="global")
    c.add_argument("--representation", choices=("S", "Z", "Y", "s", "z", "y"), default="S")
    c.add_argument("--eps", type=float, default=None,
                   help="evaluate Z/Y directly with quasi-delta connections of this epsilon")
    c.add_argument("--recover-waves", metavar="A_N_JSON")
    c.add_argument("--cache-out")
    c.add_argument("--out")
    c.set_defaults(func=cmd_connect)

    u = sub.add_parser("update", help="update a cached connection")
    u.add_argument("--cache", required=True)
    u.add_argument("--system", required=True)
    u.add_argument("--matrix", required=True)
    u.add_argument("--cache-out")
    u.add_argument("--verify", action="store_true", help="also report error vs. fresh evaluation")
    u.add_argument("--out")
    u.set_defaults(func=cmd_update)

    b = sub.add_parser("bench", help="run a benchmark")
    b.add_argument("which", choices=("methods", "update", "epsilon"))
    b.add_argument("--n-bus", type=parse_int_list)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--k", type=parse_complex, default=DEFAULT_K)
    b.add_argument("--trials", type=int)
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("graph", help="graph oracle utilities")
    gs = g.add_subparsers(dest="graph_cmd", required=True)
    gg = gs.add_parser("gen")
    gg.add_argument("--n-ports", type=int, required=True)
    gg.add_argument("--density", type=float, default=0.5)
    gg.add_argument("--seed", type=int, default=0)
    gg.add_argument("--k", type=parse_complex, default=DEFAULT_K)
    gg.add_argument("--out")
    gsc = gs.add_parser("scatter")
    gsc.add_argument("graph")
    gsc.add_argument("--k", type=parse_complex, default=DEFAULT_K)
    gsc.add_argument("--out")
    ggl = gs.add_parser("glue")
    ggl.add_argument("g1")
    ggl.add_argument("g2")
    ggl.add_argument("--pair", type=parse_pair, action="append", default=[])
    ggl.add_argument("--out")
    for sp in (gg, gsc, ggl):
        sp.set_defaults(func=cmd_graph)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_PARSE
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (SingularMatrix, ResonantBond, GenerationFailed) as exc:
        print(f"numerical failure in {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (mio.ParseError, MultiportError, ValueError) as exc:
        print(f"error in {args.command}: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
