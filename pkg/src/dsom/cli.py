"""Command-line interface: dataset generation, runs, and verification."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .dissim import (levenshtein_matrix, load_points, load_words, save_matrix,
                     sq_euclidean_matrix)
from .harness import (ExperimentConfig, MatrixFile, gen_uniform,
                      run_experiment, verify_equivalence, write_report)
from .representation import Strategy, all_strategies
from .topology import HEXAGONAL, LAYOUTS


def _parse_strategies(text: str) -> tuple[Strategy, ...]:
    if text.strip() == "all":
        return tuple(all_strategies())
    return tuple(Strategy.parse(tok) for tok in text.split(",") if tok.strip())


def _add_run_like_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--matrix", required=True, help="matrix text file")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--layout", choices=LAYOUTS, default=HEXAGONAL)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--t0", type=float, default=None,
                   help="initial temperature (default: graph diameter)")
    p.add_argument("--tf", type=float, default=None,
                   help="final temperature (default: 0.3)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategies", required=True,
                   help="comma-separated strategy ids (or 'all'): naive, "
                        "partial-sums, bnb-single, bnb-full, bnb-sc, "
                        "bnb-sc-ordered, each with optional +memo suffix")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsom",
        description="Dissimilarity self-organizing map with interchangeable, "
                    "result-identical representation strategies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-uniform", help="draw points uniformly from the unit square")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="point-list file to write")

    p = sub.add_parser("matrix", help="build a dissimilarity matrix file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--from-points", help="point-list file (squared euclidean)")
    src.add_argument("--from-words", help="word-list file (normalized Levenshtein)")
    p.add_argument("--out", required=True, help="matrix text file to write")

    p = sub.add_parser("run", help="time strategies and write a report")
    _add_run_like_args(p)
    p.add_argument("--report", required=True, help="report CSV to write")

    p = sub.add_parser("verify", help="check that strategies produce identical traces")
    _add_run_like_args(p)
    return parser


def _cmd_gen_uniform(args) -> int:
    pts = gen_uniform(args.n, args.seed)
    with open(args.out, "w", encoding="ascii") as fh:
        for x, y in pts:
            fh.write(f"{x!r} {y!r}\n")
    print(f"wrote {args.n} points to {args.out}")
    return 0


def _cmd_matrix(args) -> int:
    if args.from_points:
        matrix = sq_euclidean_matrix(load_points(args.from_points))
    else:
        matrix = levenshtein_matrix(load_words(args.from_words))
    save_matrix(matrix, args.out)
    print(f"wrote {matrix.n}x{matrix.n} matrix to {args.out}")
    return 0


def _make_config(args) -> ExperimentConfig:
    return ExperimentConfig(
        dataset=MatrixFile(args.matrix),
        rows=args.rows, cols=args.cols, layout=args.layout,
        t0=args.t0, tf=args.tf, iterations=args.iters,
        strategies=_parse_strategies(args.strategies), seed=args.seed)


def _cmd_run(args) -> int:
    report = run_experiment(_make_config(args))
    write_report(report, args.report)
    for key, value in report.header.items():
        print(f"# {key} = {value}")
    for r in report.results:
        speedup = ("-" if r.speedup_vs_reference is None
                   else f"{r.speedup_vs_reference:.2f}x")
        print(f"{r.strategy_id:>20}: {r.median_cpu_seconds:.3f}s cpu (median of "
              f"{len(r.cpu_seconds)}), speedup {speedup}, "
              f"final energy {r.final_energy:.6g}")
    print(f"report written to {args.report}")
    return 0


def _cmd_verify(args) -> int:
    verdict = verify_equivalence(_make_config(args))
    print(verdict)
    return 0 if verdict.identical else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "gen-uniform": _cmd_gen_uniform,
        "matrix": _cmd_matrix,
        "run": _cmd_run,
        "verify": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
