"""Prototype graph construction and the iteration-dependent neighborhood."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

HEXAGONAL = "hexagonal"
RECTANGULAR = "rectangular"
LAYOUTS = (HEXAGONAL, RECTANGULAR)

#: default final temperature; exp(-(1/0.3)**2) ~ 1.6e-5 makes the last
#: iterations behave like a Kronecker delta
DEFAULT_FINAL_TEMPERATURE = 0.3


@dataclass(frozen=True)
class MapGraph:
    """Undirected grid graph with precomputed node distances.

    ``delta`` holds the natural graph distance (edge count of a shortest
    path) between every node pair.  ``visit_order`` row j lists all nodes
    by ascending delta[j], ties by ascending node index; it is fixed for
    the lifetime of the map and drives both the class-visit order of the
    branch-and-bound search and the term order of the ordered bound.
    """

    rows: int
    cols: int
    layout: str
    edges: tuple[tuple[int, ...], ...]
    delta: np.ndarray
    visit_order: np.ndarray

    @property
    def m(self) -> int:
        """Node count."""
        return self.rows * self.cols

    @property
    def diameter(self) -> int:
        return int(self.delta.max())


@dataclass(frozen=True)
class NeighborhoodSchedule:
    """Exponentially decaying temperature over a fixed iteration budget."""

    t0: float
    tf: float
    total_iterations: int

    def __post_init__(self):
        if not (self.t0 >= self.tf > 0):
            raise ValueError(
                f"need t0 >= tf > 0, got t0={self.t0}, tf={self.tf}")
        if self.total_iterations < 1:
            raise ValueError(f"need at least one iteration, got {self.total_iterations}")


def _grid_neighbors(r: int, c: int, rows: int, cols: int, layout: str):
    if layout == RECTANGULAR:
        steps = ((0, 1), (0, -1), (1, 0), (-1, 0))
    else:
        # odd-row-offset hex tiling: even rows also link up-left/down-left,
        # odd rows up-right/down-right
        side = -1 if r % 2 == 0 else 1
        steps = ((0, 1), (0, -1), (1, 0), (-1, 0), (1, side), (-1, side))
    for dr, dc in steps:
        rr, cc = r + dr, c + dc
        if 0 <= rr < rows and 0 <= cc < cols:
            yield rr * cols + cc


def build_grid(rows: int, cols: int, layout: str = HEXAGONAL) -> MapGraph:
    """Build a rectangular or hexagonal grid with row-major node numbering.

    Node distances are computed by breadth-first search from every node;
    the resulting graph is always connected.
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"grid dimensions must be positive, got {rows}x{cols}")
    if layout not in LAYOUTS:
        raise ValueError(f"layout must be one of {LAYOUTS}, got {layout!r}")
    m = rows * cols
    edges = tuple(
        tuple(sorted(_grid_neighbors(j // cols, j % cols, rows, cols, layout)))
        for j in range(m)
    )
    delta = np.full((m, m), -1, dtype=np.int64)
    for start in range(m):
        delta[start, start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in edges[u]:
                if delta[start, v] < 0:
                    delta[start, v] = delta[start, u] + 1
                    queue.append(v)
    if (delta < 0).any():
        raise AssertionError("grid graph is not connected")
    visit_order = np.argsort(delta, axis=1, kind="stable").astype(np.int64)
    delta.setflags(write=False)
    visit_order.setflags(write=False)
    return MapGraph(rows, cols, layout, edges, delta, visit_order)


def temperature(schedule: NeighborhoodSchedule, l: int) -> float:
    """Temperature at iteration l (exponential decay from t0 to tf)."""
    total = schedule.total_iterations
    if not 0 <= l < total:
        raise ValueError(f"iteration {l} outside schedule of {total}")
    if total == 1:
        return schedule.tf
    return schedule.t0 * (schedule.tf / schedule.t0) ** (l / (total - 1))


def neighborhood(graph: MapGraph, schedule: NeighborhoodSchedule,
                 l: int, j: int, k: int) -> float:
    """Gaussian kernel of the scaled graph distance, h(j, k) = exp(-(delta/T)^2)."""
    x = graph.delta[j, k] / temperature(schedule, l)
    return math.exp(-(x * x))


def neighborhood_table(graph: MapGraph, schedule: NeighborhoodSchedule,
                       l: int) -> np.ndarray:
    """All pairwise neighborhood values for one iteration.

    Every strategy reads these values O(NM) times per iteration, so the
    table is computed once and shared.
    """
    x = graph.delta / temperature(schedule, l)
    h = np.exp(-(x * x))
    h.setflags(write=False)
    return h


def default_schedule(graph: MapGraph, iterations: int,
                     t0: float | None = None,
                     tf: float | None = None) -> NeighborhoodSchedule:
    """Schedule spanning the map at first and near-Kronecker at the end.

    t0 defaults to the graph diameter (floored at tf so one-node maps stay
    valid), tf to 0.3.
    """
    if tf is None:
        tf = DEFAULT_FINAL_TEMPERATURE
    if t0 is None:
        t0 = float(max(graph.diameter, tf))
    return NeighborhoodSchedule(t0=float(t0), tf=float(tf), total_iterations=iterations)
