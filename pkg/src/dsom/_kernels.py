"""Compiled inner loops shared by every training phase.

Every floating-point accumulation here runs in one fixed operand order:
partial sums add matrix rows in ascending member index, scores add class
terms in ascending class index, and the energy adds its terms with the
individual as the outer loop.  All six search strategies funnel through
these kernels, which is what makes their outputs comparable bit for bit
instead of merely "close".  None of the kernels use fastmath.
"""

import numpy as np
from numba import njit

BOUND_SINGLE_TERM = 0
BOUND_FULL = 1
BOUND_SHORT_CIRCUIT = 2
BOUND_SHORT_CIRCUIT_ORDERED = 3

# slots of the int64 counter vector threaded through the search kernels
CTR_SCORE_EVALS = 0
CTR_EXHAUSTIVE = 1
CTR_PRUNED = 2
CTR_BOUND_TERMS = 3
CTR_HOME = 4
N_COUNTERS = 5


@njit(cache=True)
def fill_partial_sums(matrix, members, offsets, dirty, dt, row_buf):
    """Recompute D(u, .) for every dirty class u.

    ``dt`` is stored transposed, dt[k, u] = D(u, k), so that per-candidate
    score loops read contiguous memory.  Returns the number of matrix
    elements read.
    """
    n = matrix.shape[0]
    m = offsets.shape[0] - 1
    reads = 0
    for u in range(m):
        if not dirty[u]:
            continue
        for k in range(n):
            row_buf[k] = 0.0
        for ii in range(offsets[u], offsets[u + 1]):
            i = members[ii]
            for k in range(n):
                row_buf[k] += matrix[i, k]
        for k in range(n):
            dt[k, u] = row_buf[k]
        reads += (offsets[u + 1] - offsets[u]) * n
    return reads


@njit(cache=True)
def fill_lambda(dt, members, offsets, dirty, lam):
    """Recompute lam[v, u] = min over k in class u of D(v, k).

    An entry is refreshed when class u or class v changed; a column for an
    empty class is the +inf sentinel.  Returns the number of entries
    recomputed.
    """
    m = offsets.shape[0] - 1
    entries = 0
    for u in range(m):
        lo = offsets[u]
        hi = offsets[u + 1]
        if dirty[u]:
            for v in range(m):
                lam[v, u] = np.inf
            for ii in range(lo, hi):
                k = members[ii]
                for v in range(m):
                    x = dt[k, v]
                    if x < lam[v, u]:
                        lam[v, u] = x
            entries += m
        else:
            for v in range(m):
                if not dirty[v]:
                    continue
                best = np.inf
                for ii in range(lo, hi):
                    x = dt[members[ii], v]
                    if x < best:
                        best = x
                lam[v, u] = best
                entries += 1
    return entries


@njit(cache=True)
def score_at(h_row, dt, k):
    """S(j, k) for one candidate, summing class terms in ascending class order."""
    s = 0.0
    for u in range(dt.shape[1]):
        s += h_row[u] * dt[k, u]
    return s


@njit(cache=True)
def score_rows(h_row, dt, out):
    """S(j, k) for every candidate k; same per-element order as score_at."""
    n, m = dt.shape
    for k in range(n):
        s = 0.0
        for u in range(m):
            s += h_row[u] * dt[k, u]
        out[k] = s


@njit(cache=True)
def argmin_first(values):
    """Index of the minimum; ties resolve to the smallest index."""
    best = 0
    bv = values[0]
    for k in range(1, values.shape[0]):
        if values[k] < bv:
            bv = values[k]
            best = k
    return best


@njit(cache=True)
def naive_scores(matrix, members, offsets, h_row, row_buf, out):
    """Score every candidate for one node without any cache.

    Re-sums the matrix class by class on the fly; the per-candidate
    operand order is identical to score_rows over a freshly built cache.
    Returns the number of matrix elements read.
    """
    n = matrix.shape[0]
    m = offsets.shape[0] - 1
    for k in range(n):
        out[k] = 0.0
    reads = 0
    for u in range(m):
        for k in range(n):
            row_buf[k] = 0.0
        for ii in range(offsets[u], offsets[u + 1]):
            i = members[ii]
            for k in range(n):
                row_buf[k] += matrix[i, k]
        reads += (offsets[u + 1] - offsets[u]) * n
        hv = h_row[u]
        for k in range(n):
            out[k] += hv * row_buf[k]
    return reads


@njit(cache=True)
def bound_value(h_row, lam, j, u, order_row, kind, qual):
    """Certified lower bound on min over class u of S(j, .).

    Nonnegative terms mean every partial sum is itself a valid bound, so
    the short-circuit kinds may stop as soon as the running sum exceeds
    ``qual``.  Returns (value, terms_summed).
    """
    m = lam.shape[0]
    if kind == BOUND_SINGLE_TERM:
        return h_row[j] * lam[j, u], 1
    z = 0.0
    terms = 0
    if kind == BOUND_FULL:
        for v in range(m):
            z += h_row[v] * lam[v, u]
        terms = m
    elif kind == BOUND_SHORT_CIRCUIT:
        for v in range(m):
            z += h_row[v] * lam[v, u]
            terms += 1
            if z > qual:
                break
    else:
        for t in range(m):
            v = order_row[t]
            z += h_row[v] * lam[v, u]
            terms += 1
            if z > qual:
                break
    return z, terms


@njit(cache=True)
def bnb_search_node(j, dt, lam, h_row, members, offsets, order_row, kind,
                    bound_offset, counters, decisions_row, record_decisions):
    """Branch-and-bound prototype search for one node.

    The home class is scanned exhaustively first; the remaining classes
    are visited in ascending graph distance from j (ties by node index)
    and each is either pruned on its bound or scanned in full.  Equal
    scores keep the earlier candidate.  ``bound_offset`` exists for
    negative-control tests and must be 0.0 in production use.
    """
    m = offsets.shape[0] - 1
    best = -1
    qual = np.inf
    for ii in range(offsets[j], offsets[j + 1]):
        k = members[ii]
        s = score_at(h_row, dt, k)
        counters[CTR_SCORE_EVALS] += 1
        if s < qual:
            qual = s
            best = k
    counters[CTR_HOME] += 1
    for t in range(m):
        u = order_row[t]
        if u == j:
            continue
        if offsets[u + 1] == offsets[u]:
            # empty class: +inf sentinel, never searched
            counters[CTR_PRUNED] += 1
            if record_decisions:
                decisions_row[u] = 0
            continue
        z, terms = bound_value(h_row, lam, j, u, order_row, kind, qual)
        counters[CTR_BOUND_TERMS] += terms
        if z + bound_offset < qual:
            counters[CTR_EXHAUSTIVE] += 1
            if record_decisions:
                decisions_row[u] = 1
            for ii in range(offsets[u], offsets[u + 1]):
                k = members[ii]
                s = score_at(h_row, dt, k)
                counters[CTR_SCORE_EVALS] += 1
                if s < qual:
                    qual = s
                    best = k
        else:
            counters[CTR_PRUNED] += 1
            if record_decisions:
                decisions_row[u] = 0
    return best


@njit(cache=True)
def affect_individuals(matrix, protos, delta, diameter, assignment,
                       cand_buf, score_buf):
    """Nearest-prototype assignment with radius-expanding tie resolution.

    Ties in the plain argmin are resolved by comparing, at growing radius
    r, the sum of distances to every prototype within r of each surviving
    candidate; a tie that survives the graph diameter goes to the lowest
    node index.  Returns (individuals_that_needed_resolution,
    summed_final_neighborhood_sizes).
    """
    n = matrix.shape[0]
    m = protos.shape[0]
    collisions = 0
    neighbor_sum = 0
    for i in range(n):
        best = matrix[i, protos[0]]
        for j in range(1, m):
            x = matrix[i, protos[j]]
            if x < best:
                best = x
        ncand = 0
        for j in range(m):
            if matrix[i, protos[j]] == best:
                cand_buf[ncand] = j
                ncand += 1
        r_final = 0
        if ncand > 1:
            collisions += 1
            for r in range(1, diameter + 1):
                bs = np.inf
                for t in range(ncand):
                    j = cand_buf[t]
                    s = 0.0
                    for v in range(m):
                        if delta[v, j] <= r:
                            s += matrix[i, protos[v]]
                    score_buf[t] = s
                    if s < bs:
                        bs = s
                nkeep = 0
                for t in range(ncand):
                    if score_buf[t] == bs:
                        cand_buf[nkeep] = cand_buf[t]
                        nkeep += 1
                ncand = nkeep
                r_final = r
                if ncand == 1:
                    break
        winner = cand_buf[0]
        assignment[i] = winner
        ball = 0
        for v in range(m):
            if delta[v, winner] <= r_final:
                ball += 1
        neighbor_sum += ball
    return collisions, neighbor_sum


@njit(cache=True)
def energy_value(matrix, h, assignment, protos):
    """Total weighted distortion, one accumulator, individuals outermost."""
    e = 0.0
    for i in range(matrix.shape[0]):
        for j in range(protos.shape[0]):
            e += h[assignment[i], j] * matrix[i, protos[j]]
    return e


@njit(cache=True)
def levenshtein_table(codes, lengths, out, prev, cur):
    """Pairwise normalized edit distances over code-point arrays.

    Same dynamic program as the scalar python implementation; distances
    are exact integers before the final division by the longer length.
    """
    n = lengths.shape[0]
    for i in range(n):
        out[i, i] = 0.0
        for j in range(i + 1, n):
            la = lengths[i]
            lb = lengths[j]
            if la == 0 and lb == 0:
                d = 0.0
            else:
                for q in range(lb + 1):
                    prev[q] = q
                for p in range(1, la + 1):
                    cur[0] = p
                    ca = codes[i, p - 1]
                    for q in range(1, lb + 1):
                        cost = 0 if ca == codes[j, q - 1] else 1
                        x = prev[q] + 1
                        y = cur[q - 1] + 1
                        z = prev[q - 1] + cost
                        if y < x:
                            x = y
                        if z < x:
                            x = z
                        cur[q] = x
                    for q in range(lb + 1):
                        prev[q] = cur[q]
                raw = prev[lb]
                longest = la if la > lb else lb
                d = raw / longest
            out[i, j] = d
            out[j, i] = d
