import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dsom import DissimilarityMatrix, NeighborhoodSchedule, build_grid, neighborhood_table


@pytest.fixture
def worked_instance():
    """The hand-checkable 3-point / 2-node instance used throughout.

    d(0,1) = 1, d(0,2) = 4, d(1,2) = 1; nodes on a 2-node path; classes
    C_0 = {0, 1}, C_1 = {2}; temperature fixed at 1 so h(0,1) = exp(-1).
    """
    matrix = DissimilarityMatrix(np.array([
        [0.0, 1.0, 4.0],
        [1.0, 0.0, 1.0],
        [4.0, 1.0, 0.0],
    ]))
    graph = build_grid(1, 2, "rectangular")
    schedule = NeighborhoodSchedule(t0=1.0, tf=1.0, total_iterations=1)
    h = neighborhood_table(graph, schedule, 0)
    classes = [np.array([0, 1]), np.array([2])]
    return matrix, graph, h, classes


def random_instance(rng, n=None, m=None):
    """A random matrix, partition and neighborhood table for property tests."""
    n = n or int(rng.integers(5, 50))
    m = m or int(rng.choice([4, 9]))
    pts = rng.random((n, 2))
    from dsom import sq_euclidean_matrix

    matrix = sq_euclidean_matrix(pts)
    rows = {4: (2, 2), 9: (3, 3)}[m]
    graph = build_grid(rows[0], rows[1], "hexagonal")
    assignment = rng.integers(0, m, size=n)
    classes = [np.flatnonzero(assignment == j) for j in range(m)]
    temp = float(rng.uniform(0.25, max(graph.diameter, 1.0)))
    schedule = NeighborhoodSchedule(t0=temp, tf=temp, total_iterations=1)
    h = neighborhood_table(graph, schedule, 0)
    return matrix, graph, h, classes, assignment
