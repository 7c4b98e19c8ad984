"""Representation phase: one scoring semantics, six interchangeable strategies.

The strategies differ only in how much work they skip, never in the value
they compute: ``naive`` re-sums the dissimilarity matrix for every node,
``partial_sums`` reads the precomputed class sums, and the four
branch-and-bound variants additionally prune whole classes on certified
lower bounds.  All of them produce the same prototypes bit for bit, and
the counters in :class:`RepresentationStats` make the skipped work
measurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dissim import DissimilarityMatrix
from .topology import MapGraph

NAIVE = "naive"
PARTIAL_SUMS = "partial_sums"
BRANCH_AND_BOUND = "branch_and_bound"

BOUND_KINDS = ("single_term", "full", "short_circuit", "short_circuit_ordered")

_BOUND_CODES = {
    "single_term": _kernels.BOUND_SINGLE_TERM,
    "full": _kernels.BOUND_FULL,
    "short_circuit": _kernels.BOUND_SHORT_CIRCUIT,
    "short_circuit_ordered": _kernels.BOUND_SHORT_CIRCUIT_ORDERED,
}

_ID_TO_SPEC = {
    "naive": (NAIVE, None),
    "partial-sums": (PARTIAL_SUMS, None),
    "bnb-single": (BRANCH_AND_BOUND, "single_term"),
    "bnb-full": (BRANCH_AND_BOUND, "full"),
    "bnb-sc": (BRANCH_AND_BOUND, "short_circuit"),
    "bnb-sc-ordered": (BRANCH_AND_BOUND, "short_circuit_ordered"),
}


@dataclass(frozen=True)
class Strategy:
    """Selects a search method, the bound kind for branch and bound, and
    whether the partial-sum cache is refreshed lazily between iterations.

    ``naive`` and ``partial_sums`` ignore the bound kind; ``naive`` uses no
    cache at all, so its memoize flag is inert.
    """

    method: str = PARTIAL_SUMS
    bound: str = "full"
    memoize: bool = False

    def __post_init__(self):
        if self.method not in (NAIVE, PARTIAL_SUMS, BRANCH_AND_BOUND):
            raise ValueError(f"unknown method {self.method!r}")
        if self.bound not in BOUND_KINDS:
            raise ValueError(f"unknown bound kind {self.bound!r}")

    @property
    def id(self) -> str:
        base = {NAIVE: "naive", PARTIAL_SUMS: "partial-sums"}.get(self.method)
        if base is None:
            base = {
                "single_term": "bnb-single",
                "full": "bnb-full",
                "short_circuit": "bnb-sc",
                "short_circuit_ordered": "bnb-sc-ordered",
            }[self.bound]
        return base + "+memo" if self.memoize else base

    @classmethod
    def parse(cls, text: str) -> "Strategy":
        """Parse a strategy id such as "bnb-sc-ordered+memo"."""
        token = text.strip()
        memo = token.endswith("+memo")
        if memo:
            token = token[: -len("+memo")]
        try:
            method, bound = _ID_TO_SPEC[token]
        except KeyError:
            raise ValueError(
                f"unknown strategy {text!r}; expected one of "
                f"{', '.join(_ID_TO_SPEC)} with optional +memo suffix") from None
        if bound is None:
            return cls(method=method, memoize=memo)
        return cls(method=method, bound=bound, memoize=memo)


def base_strategies() -> list[Strategy]:
    """The six strategies, memoization off."""
    return [Strategy.parse(s) for s in _ID_TO_SPEC]


def all_strategies() -> list[Strategy]:
    """All twelve combinations: six strategies x memoization on/off."""
    out = []
    for memo in (False, True):
        for s in _ID_TO_SPEC:
            strat = Strategy.parse(s)
            out.append(Strategy(strat.method, strat.bound, memo))
    return out


@dataclass
class RepresentationStats:
    """Operation counters for one or more representation phases.

    ``exhaustive_searches`` counts foreign classes scanned in full; home
    classes are always scanned and counted in ``home_searches``, so per
    branch-and-bound phase exhaustive_searches + pruned_classes ==
    M * (M - 1).  ``matrix_reads`` counts dissimilarity-matrix element
    accesses made while building partial sums (cached or on the fly).
    """

    score_evaluations: int = 0
    exhaustive_searches: int = 0
    pruned_classes: int = 0
    bound_terms_summed: int = 0
    d_columns_recomputed: int = 0
    lambda_entries_recomputed: int = 0
    matrix_reads: int = 0
    home_searches: int = 0
    decision_log: np.ndarray | None = field(default=None, repr=False, compare=False)

    _COUNTER_FIELDS = (
        "score_evaluations", "exhaustive_searches", "pruned_classes",
        "bound_terms_summed", "d_columns_recomputed",
        "lambda_entries_recomputed", "matrix_reads", "home_searches",
    )

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in self._COUNTER_FIELDS}


def _as_csr(classes, m: int | None = None):
    """Normalize a class structure to (members, offsets) with ascending
    member order inside every class."""
    if (isinstance(classes, tuple) and len(classes) == 2
            and isinstance(classes[0], np.ndarray)):
        return classes
    groups = [np.sort(np.asarray(c, dtype=np.int64)) for c in classes]
    if m is not None and len(groups) != m:
        raise ValueError(f"expected {m} classes, got {len(groups)}")
    offsets = np.zeros(len(groups) + 1, dtype=np.int64)
    np.cumsum([g.size for g in groups], out=offsets[1:])
    members = (np.concatenate(groups) if groups else np.empty(0, np.int64))
    return members.astype(np.int64), offsets


class PartialSumCache:
    """Partial-sum table D, class minima lambda, and change tracking.

    The D table is stored candidate-major (shape N x M) so that scoring a
    candidate reads contiguous memory; ``d_table`` exposes the class-major
    M x N view.  ``class_dirty`` records which classes were refreshed by
    the most recent update.
    """

    def __init__(self, n: int, m: int):
        self.n = n
        self.m = m
        self._dt = np.zeros((n, m), dtype=np.float64)
        self.lambda_table = np.full((m, m), np.inf, dtype=np.float64)
        self.class_dirty = np.ones(m, dtype=np.bool_)
        self._row_buf = np.empty(n, dtype=np.float64)
        self._snap_members: np.ndarray | None = None
        self._snap_offsets: np.ndarray | None = None

    @property
    def d_table(self) -> np.ndarray:
        """Class-major view: d_table[u][k] = sum of d(x_i, x_k) over i in class u."""
        return self._dt.T

    def _dirty_flags(self, members, offsets, memoize: bool) -> np.ndarray:
        if not memoize or self._snap_members is None:
            return np.ones(self.m, dtype=np.bool_)
        dirty = np.empty(self.m, dtype=np.bool_)
        for u in range(self.m):
            new = members[offsets[u]:offsets[u + 1]]
            old = self._snap_members[self._snap_offsets[u]:self._snap_offsets[u + 1]]
            dirty[u] = not (new.size == old.size and np.array_equal(new, old))
        return dirty


def compute_partial_sums(matrix: DissimilarityMatrix, classes,
                         cache: PartialSumCache, memoize: bool = False,
                         stats: RepresentationStats | None = None) -> PartialSumCache:
    """Bring the cache up to date with the given partition.

    With ``memoize`` off every D row and every lambda entry is recomputed.
    With it on, a class is dirty iff its membership changed since the
    previous call; D rows are rebuilt only for dirty classes and
    lambda[v][u] only when u or v is dirty.  Either way the resulting
    tables are bit-identical to a full recomputation.
    """
    members, offsets = _as_csr(classes, cache.m)
    dirty = cache._dirty_flags(members, offsets, memoize)
    reads = _kernels.fill_partial_sums(
        matrix.values, members, offsets, dirty, cache._dt, cache._row_buf)
    entries = _kernels.fill_lambda(
        cache._dt, members, offsets, dirty, cache.lambda_table)
    cache.class_dirty = dirty
    cache._snap_members = members.copy()
    cache._snap_offsets = offsets.copy()
    if stats is not None:
        stats.d_columns_recomputed += int(dirty.sum())
        stats.lambda_entries_recomputed += int(entries)
        stats.matrix_reads += int(reads)
    return cache


def score(j: int, k: int, cache: PartialSumCache, h_table: np.ndarray) -> float:
    """S(j, k): class sums weighted by the neighborhood of node j.

    Terms are added in ascending class index; every strategy, including
    the cache-free naive search, evaluates this exact operand order.
    """
    return float(_kernels.score_at(np.ascontiguousarray(h_table[j]), cache._dt, k))


def represent_naive(matrix: DissimilarityMatrix, graph: MapGraph,
                    h_table: np.ndarray, classes,
                    stats: RepresentationStats | None = None) -> np.ndarray:
    """Exhaustive prototype search without the partial-sum cache.

    Class sums are rebuilt from the matrix for every node, which is what
    the N*M recorded score evaluations each pay for.
    """
    members, offsets = _as_csr(classes, graph.m)
    n, m = matrix.n, graph.m
    scores = np.empty(n, dtype=np.float64)
    row_buf = np.empty(n, dtype=np.float64)
    protos = np.empty(m, dtype=np.int64)
    reads = 0
    for j in range(m):
        reads += _kernels.naive_scores(
            matrix.values, members, offsets, np.ascontiguousarray(h_table[j]),
            row_buf, scores)
        protos[j] = _kernels.argmin_first(scores)
    if stats is not None:
        stats.score_evaluations += n * m
        stats.matrix_reads += int(reads)
    return protos


def represent_partial_sums(cache: PartialSumCache, h_table: np.ndarray,
                           stats: RepresentationStats | None = None) -> np.ndarray:
    """Exhaustive prototype search over the partial-sum cache."""
    n, m = cache.n, cache.m
    scores = np.empty(n, dtype=np.float64)
    protos = np.empty(m, dtype=np.int64)
    for j in range(m):
        _kernels.score_rows(np.ascontiguousarray(h_table[j]), cache._dt, scores)
        protos[j] = _kernels.argmin_first(scores)
    if stats is not None:
        stats.score_evaluations += n * m
    return protos


def bound(j: int, u: int, cache: PartialSumCache, h_table: np.ndarray,
          strategy="full", qual: float = math.inf,
          stats: RepresentationStats | None = None,
          graph: MapGraph | None = None) -> float:
    """Certified lower bound on min over class u of S(j, .).

    ``strategy`` is a bound kind or a :class:`Strategy`.  An empty class
    yields the +inf sentinel.  The short-circuit kinds stop summing as
    soon as the running total exceeds ``qual``; the ordered kind needs
    ``graph`` for its per-node term order.
    """
    kind = strategy.bound if isinstance(strategy, Strategy) else strategy
    code = _BOUND_CODES[kind]
    if cache._snap_offsets is None:
        raise ValueError("cache has not been computed for any partition")
    if cache._snap_offsets[u + 1] == cache._snap_offsets[u]:
        return math.inf
    if code == _kernels.BOUND_SHORT_CIRCUIT_ORDERED:
        if graph is None:
            raise ValueError("the ordered bound needs the map graph")
        order_row = np.ascontiguousarray(graph.visit_order[j])
    else:
        order_row = np.empty(0, dtype=np.int64)
    z, terms = _kernels.bound_value(
        np.ascontiguousarray(h_table[j]), cache.lambda_table, j, u,
        order_row, code, qual)
    if stats is not None:
        stats.bound_terms_summed += int(terms)
    return float(z)


def represent_bnb(cache: PartialSumCache, h_table: np.ndarray, graph: MapGraph,
                  classes, strategy: Strategy,
                  stats: RepresentationStats | None = None,
                  record_decisions: bool = False,
                  _bound_offset: float = 0.0):
    """Branch-and-bound prototype search (home class first, then classes by
    ascending graph distance, each pruned or scanned on its bound).

    Returns (prototypes, stats).  With ``record_decisions`` the stats
    carry an M x M int8 log: row j holds 1 where class u was searched, 0
    where pruned, -1 on the diagonal.  ``_bound_offset`` shifts every
    bound before the prune test; it exists for negative-control tests.
    """
    members, offsets = _as_csr(classes, graph.m)
    if stats is None:
        stats = RepresentationStats()
    m = graph.m
    kind = _BOUND_CODES[strategy.bound]
    counters = np.zeros(_kernels.N_COUNTERS, dtype=np.int64)
    decisions = np.full((m, m), -1, dtype=np.int8)
    protos = np.empty(m, dtype=np.int64)
    for j in range(m):
        best = _kernels.bnb_search_node(
            j, cache._dt, cache.lambda_table, np.ascontiguousarray(h_table[j]),
            members, offsets, np.ascontiguousarray(graph.visit_order[j]),
            kind, _bound_offset, counters, decisions[j], record_decisions)
        if best < 0:
            raise AssertionError("search ended with no candidate; empty partition?")
        protos[j] = best
    stats.score_evaluations += int(counters[_kernels.CTR_SCORE_EVALS])
    stats.exhaustive_searches += int(counters[_kernels.CTR_EXHAUSTIVE])
    stats.pruned_classes += int(counters[_kernels.CTR_PRUNED])
    stats.bound_terms_summed += int(counters[_kernels.CTR_BOUND_TERMS])
    stats.home_searches += int(counters[_kernels.CTR_HOME])
    if record_decisions:
        stats.decision_log = decisions
    return protos, stats


class PhaseRunner:
    """Executes one strategy's representation phase, owning the cache (and
    the memoization state it carries) across iterations of a run."""

    def __init__(self, matrix: DissimilarityMatrix, graph: MapGraph,
                 strategy: Strategy, _bound_offset: float = 0.0):
        if isinstance(strategy, str):
            strategy = Strategy.parse(strategy)
        self.matrix = matrix
        self.graph = graph
        self.strategy = strategy
        self._bound_offset = _bound_offset
        self.cache = (None if strategy.method == NAIVE
                      else PartialSumCache(matrix.n, graph.m))

    def run(self, classes, h_table: np.ndarray):
        """One representation phase; returns (prototypes, stats)."""
        strat = self.strategy
        stats = RepresentationStats()
        if strat.method == NAIVE:
            protos = represent_naive(self.matrix, self.graph, h_table, classes, stats)
            return protos, stats
        compute_partial_sums(self.matrix, classes, self.cache, strat.memoize, stats)
        if strat.method == PARTIAL_SUMS:
            protos = represent_partial_sums(self.cache, h_table, stats)
            return protos, stats
        return represent_bnb(self.cache, h_table, self.graph, classes, strat,
                             stats, _bound_offset=self._bound_offset)
