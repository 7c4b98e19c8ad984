"""Experiment runner: datasets, timing protocol, verification, reports.

Timing follows a warmup-then-median scheme: each strategy runs once
untimed (also absorbing JIT compilation), then five timed runs whose
median CPU time is reported.  Timings are refused unless the repeat runs
are trace-identical, and speedup factors are only computed between
strategies already proven trace-identical.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import run_dsom
from .dissim import (DissimilarityMatrix, bundled_words, levenshtein_matrix,
                     load_matrix, load_words, sq_euclidean_matrix)
from .representation import PARTIAL_SUMS, RepresentationStats, Strategy
from .topology import HEXAGONAL, build_grid, default_schedule


@dataclass(frozen=True)
class UniformPoints:
    """N points drawn uniformly from the unit square, squared-euclidean matrix."""
    n: int
    seed: int = 0

    @property
    def label(self) -> str:
        return f"uniform(n={self.n},seed={self.seed})"


@dataclass(frozen=True)
class MatrixFile:
    path: str

    @property
    def label(self) -> str:
        return f"matrix({Path(self.path).name})"


@dataclass(frozen=True)
class WordListFile:
    """Word list compared with the normalized Levenshtein distance.
    path=None selects the bundled list."""
    path: str | None = None

    @property
    def label(self) -> str:
        return "words(bundled)" if self.path is None else f"words({Path(self.path).name})"


class DeterminismError(RuntimeError):
    """Repeat runs of one strategy produced different traces."""


class EquivalenceError(RuntimeError):
    """Two strategies that must agree produced different traces."""


@dataclass(frozen=True)
class TraceDivergence:
    """First point where two traces disagree."""
    strategy_a: str
    strategy_b: str
    iteration: int
    kind: str      # "prototypes" | "assignment" | "trace-length"
    index: int     # node for prototypes, individual for assignment

    def __str__(self):
        return (f"{self.strategy_a} vs {self.strategy_b}: first divergence at "
                f"iteration {self.iteration}, {self.kind}[{self.index}]")


def gen_uniform(n: int, seed: int) -> np.ndarray:
    """N points with coordinates independently uniform in [0, 1)."""
    if n < 1:
        raise ValueError(f"need at least one point, got {n}")
    return np.random.default_rng(seed).random((n, 2))


def load_dataset(dataset) -> DissimilarityMatrix:
    if isinstance(dataset, UniformPoints):
        return sq_euclidean_matrix(gen_uniform(dataset.n, dataset.seed))
    if isinstance(dataset, MatrixFile):
        return load_matrix(dataset.path)
    if isinstance(dataset, WordListFile):
        words = bundled_words() if dataset.path is None else load_words(dataset.path)
        return levenshtein_matrix(words)
    raise TypeError(f"unknown dataset spec {dataset!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: UniformPoints | MatrixFile | WordListFile
    rows: int
    cols: int
    layout: str = HEXAGONAL
    t0: float | None = None          # None -> graph diameter
    tf: float | None = None          # None -> 0.3
    iterations: int = 100
    strategies: tuple[Strategy, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if not self.strategies:
            raise ValueError("at least one strategy is required")
        if self.iterations < 1:
            raise ValueError(f"need at least one iteration, got {self.iterations}")
        parsed = tuple(Strategy.parse(s) if isinstance(s, str) else s
                       for s in self.strategies)
        object.__setattr__(self, "strategies", parsed)

    def header_fields(self, graph=None) -> dict:
        sched = None
        if graph is not None:
            sched = default_schedule(graph, self.iterations, self.t0, self.tf)
        return {
            "dataset": self.dataset.label,
            "rows": self.rows, "cols": self.cols, "layout": self.layout,
            "t0": self.t0 if sched is None else sched.t0,
            "tf": self.tf if sched is None else sched.tf,
            "iterations": self.iterations,
            "seed": self.seed,
            "strategies": ",".join(s.id for s in self.strategies),
        }


def compare_traces(trace_a, trace_b, id_a: str = "a", id_b: str = "b"):
    """First divergence between two traces, or None when identical.

    Prototype and assignment arrays are compared exactly at every
    iteration.
    """
    if len(trace_a) != len(trace_b):
        return TraceDivergence(id_a, id_b, min(len(trace_a), len(trace_b)),
                               "trace-length", -1)
    for ra, rb in zip(trace_a, trace_b):
        if not np.array_equal(ra.prototypes, rb.prototypes):
            idx = int(np.flatnonzero(ra.prototypes != rb.prototypes)[0])
            return TraceDivergence(id_a, id_b, ra.iteration, "prototypes", idx)
        if not np.array_equal(ra.assignment, rb.assignment):
            idx = int(np.flatnonzero(ra.assignment != rb.assignment)[0])
            return TraceDivergence(id_a, id_b, ra.iteration, "assignment", idx)
    return None


@dataclass(frozen=True)
class EquivalenceVerdict:
    identical: bool
    divergence: TraceDivergence | None
    strategy_ids: tuple[str, ...]

    def __str__(self):
        if self.identical:
            return f"identical traces across {', '.join(self.strategy_ids)}"
        return str(self.divergence)


def verify_equivalence(config: ExperimentConfig) -> EquivalenceVerdict:
    """Run every configured strategy from the same seed and compare the
    full traces bit-exactly; the verdict carries the first divergence."""
    if len(config.strategies) < 2:
        raise ValueError("equivalence verification needs at least two strategies")
    matrix = load_dataset(config.dataset)
    graph = build_grid(config.rows, config.cols, config.layout)
    schedule = default_schedule(graph, config.iterations, config.t0, config.tf)
    ids = tuple(s.id for s in config.strategies)
    reference = None
    for strat in config.strategies:
        _, trace = run_dsom(matrix, graph, schedule, strat, config.seed,
                            config.iterations)
        if reference is None:
            reference = trace
            continue
        div = compare_traces(reference, trace, ids[0], strat.id)
        if div is not None:
            return EquivalenceVerdict(False, div, ids)
    return EquivalenceVerdict(True, None, ids)


@dataclass
class StrategyResult:
    strategy_id: str
    median_cpu_seconds: float
    cpu_seconds: tuple[float, ...]
    final_energy: float
    mean_counters: dict          # per-iteration means of the stats counters
    mean_collisions: float
    mean_neighbors_considered: float
    speedup_vs_reference: float | None = None


@dataclass
class RunReport:
    header: dict                  # configuration echo, incl. resolved defaults
    n: int
    m: int
    results: list[StrategyResult] = field(default_factory=list)
    reference_id: str | None = None


def _mean_counters(trace) -> tuple[dict, float, float]:
    counters = {name: 0 for name in RepresentationStats._COUNTER_FIELDS}
    coll = 0.0
    neigh = 0.0
    for rec in trace:
        for name in counters:
            counters[name] += getattr(rec.repr_stats, name)
        coll += rec.affect_stats.collisions_encountered
        neigh += rec.affect_stats.mean_neighbors_considered
    iters = len(trace)
    return ({name: total / iters for name, total in counters.items()},
            coll / iters, neigh / iters)


def run_experiment(config: ExperimentConfig, timed_runs: int = 5) -> RunReport:
    """Warm up, time, verify, and summarize every configured strategy.

    Each strategy is run once untimed and then ``timed_runs`` times under
    the CPU clock; all runs must be trace-identical or a
    DeterminismError refuses the timings.  Cross-strategy traces must
    agree as well (they implement the same algorithm) before speedups
    against the partial-sums reference are reported.
    """
    matrix = load_dataset(config.dataset)
    graph = build_grid(config.rows, config.cols, config.layout)
    schedule = default_schedule(graph, config.iterations, config.t0, config.tf)
    report = RunReport(header=config.header_fields(graph), n=matrix.n, m=graph.m)
    reference_trace = None
    reference_strategy = None
    for strat in config.strategies:
        if (reference_strategy is None and strat.method == PARTIAL_SUMS
                and not strat.memoize):
            reference_strategy = strat.id
    for strat in config.strategies:
        _, warm_trace = run_dsom(matrix, graph, schedule, strat, config.seed,
                                 config.iterations)
        times = []
        for _ in range(timed_runs):
            start = time.process_time()
            _, trace = run_dsom(matrix, graph, schedule, strat, config.seed,
                                config.iterations)
            times.append(time.process_time() - start)
            div = compare_traces(warm_trace, trace, strat.id, strat.id)
            if div is not None:
                raise DeterminismError(
                    f"strategy {strat.id} is not deterministic: {div}")
        if reference_trace is None:
            reference_trace = (strat.id, warm_trace)
        else:
            div = compare_traces(reference_trace[1], warm_trace,
                                 reference_trace[0], strat.id)
            if div is not None:
                raise EquivalenceError(str(div))
        counters, coll, neigh = _mean_counters(warm_trace)
        report.results.append(StrategyResult(
            strategy_id=strat.id,
            median_cpu_seconds=statistics.median(times),
            cpu_seconds=tuple(times),
            final_energy=warm_trace[-1].energy,
            mean_counters=counters,
            mean_collisions=coll,
            mean_neighbors_considered=neigh,
        ))
    if reference_strategy is not None:
        ref_time = next(r.median_cpu_seconds for r in report.results
                        if r.strategy_id == reference_strategy)
        report.reference_id = reference_strategy
        for r in report.results:
            if r.median_cpu_seconds > 0:
                r.speedup_vs_reference = ref_time / r.median_cpu_seconds
    return report


REPORT_COLUMNS = (
    "dataset", "n", "m", "rows", "cols", "layout", "t0", "tf", "iterations",
    "seed", "strategy", "median_cpu_s", "speedup_vs_reference", "final_energy",
    "score_evaluations", "exhaustive_searches", "pruned_classes",
    "bound_terms_summed", "d_columns_recomputed", "lambda_entries_recomputed",
    "matrix_reads", "home_searches", "collisions", "mean_neighbors_considered",
)


def write_report(report: RunReport, path) -> None:
    """Write the report as CSV: '#'-prefixed header lines echoing the full
    configuration, then one row per strategy in REPORT_COLUMNS order."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        for key, value in report.header.items():
            fh.write(f"# {key} = {value}\n")
        fh.write(f"# reference = {report.reference_id}\n")
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        hdr = report.header
        for r in report.results:
            c = r.mean_counters
            writer.writerow([
                hdr["dataset"], report.n, report.m, hdr["rows"], hdr["cols"],
                hdr["layout"], hdr["t0"], hdr["tf"], hdr["iterations"],
                hdr["seed"], r.strategy_id,
                repr(r.median_cpu_seconds),
                "" if r.speedup_vs_reference is None else repr(r.speedup_vs_reference),
                repr(r.final_energy),
                c["score_evaluations"], c["exhaustive_searches"],
                c["pruned_classes"], c["bound_terms_summed"],
                c["d_columns_recomputed"], c["lambda_entries_recomputed"],
                c["matrix_reads"], c["home_searches"],
                r.mean_collisions, r.mean_neighbors_considered,
            ])


def read_report(path) -> tuple[dict, list[dict]]:
    """Parse a report written by :func:`write_report`; returns (header, rows)."""
    header = {}
    rows = []
    with open(path, encoding="ascii", newline="") as fh:
        data_lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                header[key.strip()] = value.strip()
            else:
                data_lines.append(line)
    reader = csv.DictReader(data_lines)
    for row in reader:
        rows.append(dict(row))
    return header, rows
