"""Batch training driver: affectation, energy, and the phase alternation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dissim import DissimilarityMatrix
from .representation import PhaseRunner, RepresentationStats, Strategy
from .topology import MapGraph, NeighborhoodSchedule, default_schedule, neighborhood_table


@dataclass
class AffectationStats:
    """Collision bookkeeping for one affectation phase.

    ``mean_neighbors_considered`` averages, over individuals, how many map
    nodes contributed to the winning node's final affectation score; it is
    1.0 when no tie needed resolving.
    """

    collisions_encountered: int = 0
    mean_neighbors_considered: float = 0.0


@dataclass(frozen=True)
class MapState:
    """Prototypes, assignment and the induced partition after an iteration."""

    prototypes: np.ndarray
    assignment: np.ndarray
    iteration: int

    @property
    def classes(self) -> list[np.ndarray]:
        """Per-node member lists (ascending data index; classes may be empty)."""
        m = self.prototypes.shape[0]
        members, offsets = classes_from_assignment(self.assignment, m)
        return [members[offsets[j]:offsets[j + 1]] for j in range(m)]


@dataclass
class IterationRecord:
    """One row of a training trace."""

    iteration: int
    energy: float
    prototypes: np.ndarray
    assignment: np.ndarray
    class_sizes: np.ndarray
    affect_stats: AffectationStats
    repr_stats: RepresentationStats


def init_prototypes(n: int, m: int, seed: int) -> np.ndarray:
    """M distinct data indices drawn uniformly without replacement."""
    if m > n:
        raise ValueError(f"cannot draw {m} distinct prototypes from {n} individuals")
    rng = np.random.default_rng(seed)
    return rng.permutation(n)[:m].astype(np.int64)


def classes_from_assignment(assignment: np.ndarray, m: int):
    """Partition the individuals by node: (members, offsets) with members
    ascending inside every class."""
    members = np.argsort(assignment, kind="stable").astype(np.int64)
    counts = np.bincount(assignment, minlength=m)
    offsets = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return members, offsets


def affect_all(matrix: DissimilarityMatrix, graph: MapGraph,
               prototypes: np.ndarray):
    """Assign every individual to its best node.

    Plain nearest-prototype argmin; any tie (prototype collisions
    included) is resolved by comparing neighborhood sums at growing graph
    radius, and a tie that survives the diameter goes to the lowest node
    index.  Returns (assignment, AffectationStats).
    """
    protos = np.ascontiguousarray(prototypes, dtype=np.int64)
    n, m = matrix.n, graph.m
    assignment = np.empty(n, dtype=np.int64)
    collisions, neighbor_sum = _kernels.affect_individuals(
        matrix.values, protos, graph.delta, graph.diameter, assignment,
        np.empty(m, dtype=np.int64), np.empty(m, dtype=np.float64))
    stats = AffectationStats(
        collisions_encountered=int(collisions),
        mean_neighbors_considered=neighbor_sum / n)
    return assignment, stats


def energy(matrix: DissimilarityMatrix, graph: MapGraph,
           schedule: NeighborhoodSchedule, l: int, state: MapState) -> float:
    """Weighted distortion of a state under the iteration-l neighborhood.

    Summed with the individual as the outer loop and the node as the inner
    loop, which is the canonical order all strategies share.
    """
    h = neighborhood_table(graph, schedule, l)
    return float(_kernels.energy_value(
        matrix.values, h, state.assignment, state.prototypes))


def run_dsom(matrix: DissimilarityMatrix, graph: MapGraph,
             schedule: NeighborhoodSchedule | None, strategy,
             seed: int, iterations: int | None = None,
             _bound_offset: float = 0.0):
    """Alternate affectation and representation for a fixed iteration count.

    Iteration l assigns individuals against the previous prototypes, then
    runs the selected representation strategy to produce the new ones.
    The full per-iteration trace is returned for equivalence testing; runs
    are deterministic in (seed, configuration, strategy).

    Parameters
    ----------
    schedule : NeighborhoodSchedule or None
        None builds the default schedule over ``iterations``.
    strategy : Strategy or strategy id string
    iterations : defaults to the schedule's budget (or 100 with no schedule).

    Returns
    -------
    (final MapState, list of IterationRecord)
    """
    if isinstance(strategy, str):
        strategy = Strategy.parse(strategy)
    if iterations is None:
        iterations = 100 if schedule is None else schedule.total_iterations
    if iterations < 1:
        raise ValueError(f"need at least one iteration, got {iterations}")
    if schedule is None:
        schedule = default_schedule(graph, iterations)
    elif iterations > schedule.total_iterations:
        raise ValueError(
            f"{iterations} iterations exceed the schedule budget "
            f"of {schedule.total_iterations}")
    n, m = matrix.n, graph.m
    protos = init_prototypes(n, m, seed)
    runner = PhaseRunner(matrix, graph, strategy, _bound_offset=_bound_offset)
    trace: list[IterationRecord] = []
    assignment = None
    for l in range(iterations):
        h = neighborhood_table(graph, schedule, l)
        assignment, astats = affect_all(matrix, graph, protos)
        members, offsets = classes_from_assignment(assignment, m)
        protos, rstats = runner.run((members, offsets), h)
        e = float(_kernels.energy_value(matrix.values, h, assignment, protos))
        trace.append(IterationRecord(
            iteration=l,
            energy=e,
            prototypes=protos.copy(),
            assignment=assignment.copy(),
            class_sizes=np.diff(offsets),
            affect_stats=astats,
            repr_stats=rstats,
        ))
    state = MapState(prototypes=protos.copy(), assignment=assignment.copy(),
                     iteration=iterations - 1)
    return state, trace


TRACE_COLUMNS = (
    "strategy", "iteration", "energy", "collisions_encountered",
    "mean_neighbors_considered", "score_evaluations", "exhaustive_searches",
    "pruned_classes", "bound_terms_summed", "d_columns_recomputed",
    "lambda_entries_recomputed", "matrix_reads", "class_sizes", "prototypes",
)


def export_trace(trace, path, strategy_id: str = "") -> None:
    """Write one tab-separated record per iteration.

    Vector-valued columns (class sizes, prototypes) are space-joined;
    the energy keeps full round-trip precision.
    """
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\t".join(TRACE_COLUMNS) + "\n")
        for rec in trace:
            r = rec.repr_stats
            row = (
                strategy_id, rec.iteration, repr(rec.energy),
                rec.affect_stats.collisions_encountered,
                repr(rec.affect_stats.mean_neighbors_considered),
                r.score_evaluations, r.exhaustive_searches, r.pruned_classes,
                r.bound_terms_summed, r.d_columns_recomputed,
                r.lambda_entries_recomputed, r.matrix_reads,
                " ".join(str(s) for s in rec.class_sizes),
                " ".join(str(p) for p in rec.prototypes),
            )
            fh.write("\t".join(str(v) for v in row) + "\n")
