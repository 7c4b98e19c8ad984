"""Bit-exactness canaries for the compiled kernels.

These tests pin the property everything else relies on: kernels, numpy
elementwise accumulation, and plain python loops produce identical bits
when they add the same operands in the same order (no FMA contraction,
no reassociation).  A failure here would explain any equivalence failure
elsewhere.
"""

import numpy as np

from dsom import _kernels


def test_score_at_equals_score_rows_equals_python():
    rng = np.random.default_rng(0)
    n, m = 157, 23
    h = rng.random(m)
    dt = rng.random((n, m))
    out = np.empty(n)
    _kernels.score_rows(h, dt, out)
    for k in range(n):
        via_scalar = _kernels.score_at(h, dt, k)
        via_python = 0.0
        for u in range(m):
            via_python += float(h[u]) * float(dt[k, u])
        assert out[k] == via_scalar == via_python


def test_partial_sums_equal_python_accumulation():
    rng = np.random.default_rng(1)
    n = 60
    matrix = rng.random((n, n))
    assignment = rng.integers(0, 5, size=n)
    members = np.argsort(assignment, kind="stable").astype(np.int64)
    offsets = np.zeros(6, dtype=np.int64)
    np.cumsum(np.bincount(assignment, minlength=5), out=offsets[1:])
    dt = np.zeros((n, 5))
    dirty = np.ones(5, dtype=np.bool_)
    _kernels.fill_partial_sums(matrix, members, offsets, dirty, dt,
                               np.empty(n))
    for u in range(5):
        for k in range(0, n, 11):
            acc = 0.0
            for i in members[offsets[u]:offsets[u + 1]]:
                acc += float(matrix[i, k])
            assert dt[k, u] == acc


def test_naive_scores_equal_cached_score_rows():
    rng = np.random.default_rng(2)
    n, m = 80, 9
    matrix = rng.random((n, n))
    matrix = (matrix + matrix.T) / 2
    np.fill_diagonal(matrix, 0.0)
    assignment = rng.integers(0, m, size=n)
    members = np.argsort(assignment, kind="stable").astype(np.int64)
    offsets = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(np.bincount(assignment, minlength=m), out=offsets[1:])
    dt = np.zeros((n, m))
    _kernels.fill_partial_sums(matrix, members, offsets,
                               np.ones(m, dtype=np.bool_), dt, np.empty(n))
    h = rng.random(m)
    cached = np.empty(n)
    _kernels.score_rows(h, dt, cached)
    naive = np.empty(n)
    _kernels.naive_scores(matrix, members, offsets, h, np.empty(n), naive)
    assert np.array_equal(cached, naive)


def test_energy_kernel_equals_python():
    rng = np.random.default_rng(3)
    n, m = 70, 12
    matrix = rng.random((n, n))
    h = rng.random((m, m))
    assignment = rng.integers(0, m, size=n)
    protos = rng.integers(0, n, size=m)
    got = _kernels.energy_value(matrix, h, assignment, protos)
    want = 0.0
    for i in range(n):
        for j in range(m):
            want += float(h[assignment[i], j]) * float(matrix[i, protos[j]])
    assert got == want


def test_bound_value_full_equals_python():
    rng = np.random.default_rng(4)
    m = 16
    h = rng.random(m)
    lam = rng.random((m, m))
    order = np.arange(m, dtype=np.int64)
    for u in range(m):
        z, terms = _kernels.bound_value(h, lam, 3, u, order,
                                        _kernels.BOUND_FULL, np.inf)
        want = 0.0
        for v in range(m):
            want += float(h[v]) * float(lam[v, u])
        assert z == want and terms == m


def test_short_circuit_no_break_equals_full():
    rng = np.random.default_rng(5)
    m = 12
    h = rng.random(m)
    lam = rng.random((m, m))
    order = np.arange(m, dtype=np.int64)
    for u in range(m):
        zf, _ = _kernels.bound_value(h, lam, 0, u, order,
                                     _kernels.BOUND_FULL, np.inf)
        zs, terms = _kernels.bound_value(h, lam, 0, u, order,
                                         _kernels.BOUND_SHORT_CIRCUIT, np.inf)
        assert zf == zs and terms == m


def test_argmin_first_tie_break():
    values = np.array([3.0, 1.0, 1.0, 2.0])
    assert _kernels.argmin_first(values) == 1
    assert _kernels.argmin_first(np.array([7.0])) == 0
