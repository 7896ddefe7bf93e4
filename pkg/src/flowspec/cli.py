"""Command-line front end: ``flowspec <command> [options]``.

Exit codes: 0 ok, 2 parse error, 3 precondition violation, 4 non-convergence,
5 internal assertion.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import duality, embedding, integral
from .certificate import EmbedConfig, SolverConfig, check_against, lambda2_certificate
from .errors import ConvergenceError, FlowSpecError, PreconditionError
from .experiment import ExperimentConfig, run_experiment
from .generators import FAMILIES, generate
from .graph import Graph, format_graph, format_weights, read_graph, read_weights
from .paths import all_pairs_metric
from .report import Report
from .separators import fhl_sweep
from .spectral import lambda2_solve, recursive_edge_separator, sweep_cut

MODULE_VERSION = "cli-harness/1"


def _sizes(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", metavar="FILE", help="graph file ('n m' header then edge lines)")
    common.add_argument("--family", choices=FAMILIES)
    common.add_argument("--size", type=_sizes, metavar="K[,K...]")
    common.add_argument("--k", type=int, default=3, help="neighbours for knn_random_points")
    common.add_argument("--dim", type=int, default=2, help="dimension for knn_random_points")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-3)
    common.add_argument("--iters", type=int, default=None, help="iteration cap (default 500; 100 for experiment)")
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--partition", choices=("ckr", "chop"), default="ckr")
    common.add_argument("--weights", metavar="FILE", help="vertex weights instead of solving")
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--csv", metavar="FILE")
    common.add_argument("--timings", action="store_true", help="include wall-clock times in reports")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="flowspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("gen", "write a generated graph"),
        ("solve", "minimum 2-congestion flow and dual weights"),
        ("round", "round the optimal flow to an integral one"),
        ("embed", "line embedding of the weighted metric"),
        ("eigen", "second Laplacian eigenvalue"),
        ("sweep", "Fiedler sweep cut and recursive balanced separator"),
        ("separate", "vertex separator from the embedding sweep"),
        ("certify", "certified lambda_2 upper bound"),
        ("experiment", "size ladder with scaling fits"),
    ]:
        p = sub.add_parser(name, parents=[common], help=text)
        if name in ("gen", "experiment"):
            p.add_argument("family_pos", nargs="?", choices=FAMILIES, metavar="FAMILY")
            p.add_argument("size_pos", nargs="?", type=_sizes, metavar="SIZE[,SIZE...]")
    return parser


def _family_and_sizes(args) -> tuple[str | None, list[int] | None]:
    family = getattr(args, "family_pos", None) or args.family
    sizes = getattr(args, "size_pos", None) or args.size
    return family, sizes


def load_graph(args) -> tuple[Graph, str]:
    if args.graph:
        return read_graph(args.graph), f"file {args.graph}"
    family, sizes = _family_and_sizes(args)
    if not family or not sizes:
        raise PreconditionError("give --graph FILE or a family and size")
    if len(sizes) != 1:
        raise PreconditionError("this command takes a single size")
    g = generate(family, sizes[0], k=args.k, dim=args.dim, seed=args.seed)
    return g, f"{family} {sizes[0]}"


def _out(args, name: str, text: str) -> None:
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / name).write_text(text)


def _header(rep: Report, args, g: Graph, source: str) -> None:
    rep.add("command", args.command)
    rep.add("graph.source", source)
    rep.add("graph.n", g.n)
    rep.add("graph.m", g.m)
    rep.add("graph.max_degree", g.max_degree)


def _solve(args, g: Graph, rep: Report) -> duality.DualitySolution:
    sol = duality.solve_min_con2(g, args.iters or 500, args.tol, args.seed)
    rec = sol.to_record()
    rep.section("solve", rec)
    _out(args, "weights.txt", format_weights(sol.weights))
    _out(args, "congestion.txt", format_weights(sol.congestion))
    return sol


def _weights(args, g: Graph, rep: Report) -> np.ndarray:
    if args.weights:
        s = read_weights(args.weights, g.n)
        rep.add("weights.source", f"file {args.weights}")
        return s
    return _solve(args, g, rep).weights


def cmd_gen(args, rep: Report) -> int:
    g, source = load_graph(args)
    text = format_graph(g)
    if args.out:
        _out(args, "graph.txt", text)
        _header(rep, args, g, source)
    else:
        sys.stdout.write(text)
    return 0


def cmd_solve(args, g, rep) -> int:
    sol = _solve(args, g, rep)
    if not sol.converged:
        _finish(args, rep)
        raise ConvergenceError(
            f"relative gap {sol.relative_gap:.3g} above tol {args.tol} after {sol.iterations} iterations")
    return 0


def cmd_round(args, g, rep) -> int:
    sol = _solve(args, g, rep)
    res = integral.round_integral(sol.flow, args.trials or 64, args.seed)
    c2sq, inter = integral.check_intersection_bound(res.flow)
    if res.con2 > res.bound + 1e-9:
        raise AssertionError("rounding bound violated")
    rep.section("round", {
        "module": "integral-flows/1", "seed": args.seed, "trials": len(res.trial_values),
        "con2": res.con2, "bound": res.bound, "con2_squared": c2sq, "inter": inter,
    })
    _out(args, "integral_flow.txt", integral.format_integral_flow(res.flow))
    return 0


def _embed(args, g, rep, s) -> embedding.LineEmbedding:
    emb = embedding.line_embed(all_pairs_metric(g, s), 2, args.trials or 128, args.seed, args.partition, g)
    rep.section("embed", emb.to_record())
    _out(args, "embedding.txt", emb.to_text())
    return emb


def cmd_embed(args, g, rep) -> int:
    _embed(args, g, rep, _weights(args, g, rep))
    return 0


def cmd_eigen(args, g, rep) -> int:
    res = lambda2_solve(g)
    rep.section("eigen", {"module": "spectral-cuts/1", "lambda2": res.lambda2, "method": res.method,
                          "residual": res.residual, "converged": res.converged})
    _out(args, "fiedler.txt", format_weights(res.fiedler))
    if not res.converged:
        _finish(args, rep)
        raise ConvergenceError(f"eigen residual {res.residual:.3g} above tolerance")
    return 0


def cmd_sweep(args, g, rep) -> int:
    res = lambda2_solve(g)
    cut = sweep_cut(g, res.fiedler)
    rep.section("sweep", cut.to_record())
    sep = recursive_edge_separator(g)
    rep.section("balanced", {"module": "spectral-cuts/1", "side_size": len(sep.side), "crossing_edges": sep.crossing,
                             "charged_edges": sep.charged, "levels": len(sep.levels)})
    _out(args, "cut.txt", " ".join(map(str, sorted(cut.side))) + "\n")
    return 0


def cmd_separate(args, g, rep) -> int:
    s = _weights(args, g, rep)
    emb = _embed(args, g, rep, s)
    sep = fhl_sweep(g, s, emb)
    rep.section("separator", sep.to_record())
    _out(args, "separator.txt", sep.to_text())
    return 0


def cmd_certify(args, g, rep) -> int:
    sol = _solve(args, g, rep)
    cert = lambda2_certificate(
        g, SolverConfig(args.iters or 500, args.tol, args.seed),
        EmbedConfig(args.trials or 128, args.seed, args.partition), solution=sol,
    )
    eig = lambda2_solve(g)
    if cert.available:
        check_against(cert, eig.lambda2, eig.residual)
    rep.section("embed", cert.embedding.to_record())
    rep.section("certificate", cert.to_record(), seed=args.seed)
    return 0


def cmd_experiment(args, rep) -> int:
    family, sizes = _family_and_sizes(args)
    cfg = ExperimentConfig(
        family=family or "grid2d",
        sizes=tuple(sizes or (8, 16, 32)),
        k=args.k, dim=args.dim,
        max_iters=args.iters or ExperimentConfig.max_iters, tol=args.tol,
        trials=args.trials or 128,
        partition_source=args.partition,
        seed=args.seed,
        csv_path=args.csv, out_dir=args.out,
        timings=args.timings,
    )
    _, report, table = run_experiment(cfg)
    rep.entries.extend(report.entries)
    if args.csv:
        Path(args.csv).write_text(table)
    _out(args, "ladder.csv", table)
    if not args.csv and not args.out:
        sys.stdout.write(table)
    return 0


COMMANDS = {
    "solve": cmd_solve, "round": cmd_round, "embed": cmd_embed, "eigen": cmd_eigen, "sweep": cmd_sweep,
    "separate": cmd_separate, "certify": cmd_certify,
}


def _finish(args, rep: Report) -> None:
    if not rep.entries:
        return
    text = rep.to_text()
    if args.out:
        _out(args, "report.txt", text)
    if args.command != "gen" or args.out:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    rep = Report()
    try:
        if args.command == "gen":
            code = cmd_gen(args, rep)
        elif args.command == "experiment":
            code = cmd_experiment(args, rep)
        else:
            g, source = load_graph(args)
            _header(rep, args, g, source)
            code = COMMANDS[args.command](args, g, rep)
    except ConvergenceError as exc:
        print(f"flowspec: non-convergence: {exc}", file=sys.stderr)
        return exc.exit_code
    except FlowSpecError as exc:
        print(f"flowspec: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except AssertionError as exc:
        print(f"flowspec: internal assertion failed: {exc}", file=sys.stderr)
        return 5
    except OSError as exc:
        print(f"flowspec: {exc}", file=sys.stderr)
        return 2
    _finish(args, rep)
    return code


if __name__ == "__main__":
    sys.exit(main())
