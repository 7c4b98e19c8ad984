"""Dissimilarity matrices: validation, generators, and text persistence."""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels

#: absolute tolerance applied when loading matrices from text files
LOAD_TOLERANCE = 1e-12


class MatrixFormatError(ValueError):
    """A matrix file failed to parse or violates a matrix invariant.

    ``row`` and ``col`` give the offending location when one exists
    (0-based matrix coordinates, not file line numbers).
    """

    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        super().__init__(message)
        self.row = row
        self.col = col


@dataclass(frozen=True)
class DissimilarityMatrix:
    """Dense symmetric nonnegative matrix with a zero diagonal.

    Individuals are anonymous indices 0..n-1; the matrix is the only view
    of the data.  The array is made read-only on construction so it can be
    shared freely between concurrent readers.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"matrix must be square, got shape {arr.shape}")
        if arr.shape[0] == 0:
            raise ValueError("matrix must contain at least one individual")
        diag = np.flatnonzero(np.diagonal(arr) != 0.0)
        if diag.size:
            i = int(diag[0])
            raise ValueError(f"nonzero diagonal at ({i}, {i}): {arr[i, i]!r}")
        neg = np.argwhere(arr < 0.0)
        if neg.size:
            i, j = (int(v) for v in neg[0])
            raise ValueError(f"negative value at ({i}, {j}): {arr[i, j]!r}")
        asym = np.argwhere(arr != arr.T)
        if asym.size:
            # report the lower-triangle coordinates of the first mismatch
            i, j = (int(v) for v in asym[0])
            if i < j:
                i, j = j, i
            raise ValueError(
                f"symmetry violation at ({i}, {j}): {arr[i, j]!r} != {arr[j, i]!r}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        """Number of individuals."""
        return self.values.shape[0]


def sq_euclidean_matrix(points) -> DissimilarityMatrix:
    """Squared euclidean distances between planar points.

    Parameters
    ----------
    points : sequence of (x, y) pairs

    Returns
    -------
    DissimilarityMatrix with values[i][j] = (x_i-x_j)**2 + (y_i-y_j)**2.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        raise ValueError("at least one point is required")
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"points must be (x, y) pairs, got shape {pts.shape}")
    dx = pts[:, 0][:, None] - pts[:, 0][None, :]
    dy = pts[:, 1][:, None] - pts[:, 1][None, :]
    return DissimilarityMatrix(dx * dx + dy * dy)


def levenshtein(a: str, b: str, normalized: bool = False):
    """Minimal number of single-character edits turning ``a`` into ``b``.

    Substitution, insertion and deletion each cost 1.  Strings are
    compared by raw code point; no case folding or unicode normalization
    is applied.  With ``normalized=True`` the count is divided by the
    length of the longer string, and the distance between two empty
    strings is 0.0.
    """
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    raw = prev[-1]
    if not normalized:
        return raw
    longest = len(a)
    return raw / longest if longest else 0.0


def levenshtein_matrix(words) -> DissimilarityMatrix:
    """Normalized Levenshtein distances between all pairs of words."""
    words = list(words)
    if not words:
        raise ValueError("at least one word is required")
    n = len(words)
    maxlen = max((len(w) for w in words), default=0)
    codes = np.zeros((n, max(maxlen, 1)), dtype=np.int32)
    lengths = np.empty(n, dtype=np.int64)
    for i, w in enumerate(words):
        lengths[i] = len(w)
        for p, ch in enumerate(w):
            codes[i, p] = ord(ch)
    out = np.zeros((n, n), dtype=np.float64)
    prev = np.empty(max(maxlen, 1) + 1, dtype=np.int64)
    cur = np.empty_like(prev)
    _kernels.levenshtein_table(codes, lengths, out, prev, cur)
    return DissimilarityMatrix(out)


def save_matrix(matrix: DissimilarityMatrix, path) -> None:
    """Write the text format: a line with N, then N rows of N decimals.

    Values are serialized with shortest round-trip precision so that a
    reload is value-identical.
    """
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{matrix.n}\n")
        for row in matrix.values:
            fh.write(" ".join(repr(float(v)) for v in row))
            fh.write("\n")


def load_matrix(path) -> DissimilarityMatrix:
    """Parse and validate the text format written by :func:`save_matrix`.

    The three matrix invariants are checked within an absolute tolerance
    of 1e-12; tolerated deviations are then normalized away (diagonal
    zeroed, tiny negatives clamped, upper triangle copied from the lower)
    so the returned matrix satisfies the invariants exactly.
    """
    text = Path(path).read_text(encoding="ascii").splitlines()
    rows = [line for line in text if line.strip()]
    if not rows:
        raise MatrixFormatError(f"{path}: empty matrix file")
    try:
        n = int(rows[0])
    except ValueError:
        raise MatrixFormatError(f"{path}: first line must be the matrix size, "
                                f"got {rows[0]!r}") from None
    if n < 1:
        raise MatrixFormatError(f"{path}: matrix size must be positive, got {n}")
    if len(rows) - 1 != n:
        raise MatrixFormatError(
            f"{path}: expected {n} matrix rows, found {len(rows) - 1}")
    values = np.empty((n, n), dtype=np.float64)
    for i, line in enumerate(rows[1:]):
        fields = line.split()
        if len(fields) != n:
            raise MatrixFormatError(
                f"{path}: row {i} has {len(fields)} values, expected {n}", row=i)
        for j, tok in enumerate(fields):
            try:
                values[i, j] = float(tok)
            except ValueError:
                raise MatrixFormatError(
                    f"{path}: unparseable value {tok!r} at ({i}, {j})",
                    row=i, col=j) from None
    for i in range(n):
        if abs(values[i, i]) > LOAD_TOLERANCE:
            raise MatrixFormatError(
                f"{path}: nonzero diagonal at ({i}, {i}): {values[i, i]!r}",
                row=i, col=i)
    neg = np.argwhere(values < -LOAD_TOLERANCE)
    if neg.size:
        i, j = (int(v) for v in neg[0])
        raise MatrixFormatError(
            f"{path}: negative value at ({i}, {j}): {values[i, j]!r}", row=i, col=j)
    asym = np.argwhere(np.abs(values - values.T) > LOAD_TOLERANCE)
    if asym.size:
        i, j = (int(v) for v in asym[0])
        if i < j:
            i, j = j, i
        raise MatrixFormatError(
            f"{path}: symmetry violation at ({i}, {j}): "
            f"{values[i, j]!r} != {values[j, i]!r}", row=i, col=j)
    np.fill_diagonal(values, 0.0)
    values[values < 0.0] = 0.0
    lower = np.tril(values)
    values = lower + np.tril(values, -1).T
    return DissimilarityMatrix(values)


def save_points(points, path) -> None:
    """Write one "x y" pair per line."""
    pts = np.asarray(points, dtype=np.float64)
    with open(path, "w", encoding="ascii") as fh:
        for x, y in pts:
            fh.write(f"{x!r} {y!r}\n")


def load_points(path) -> np.ndarray:
    """Read a point list, one "x y" pair per line; blank lines ignored."""
    pts = []
    for lineno, line in enumerate(Path(path).read_text(encoding="ascii").splitlines(), 1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'x y', got {line!r}")
        pts.append((float(fields[0]), float(fields[1])))
    if not pts:
        raise ValueError(f"{path}: no points found")
    return np.asarray(pts, dtype=np.float64)


def load_words(path) -> list[str]:
    """Read a word list, one word per line; blank lines ignored."""
    words = [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines()]
    words = [w for w in words if w]
    if not words:
        raise ValueError(f"{path}: no words found")
    return words


def bundled_words() -> list[str]:
    """The English word list shipped with the package."""
    ref = importlib.resources.files("dsom") / "data" / "words.txt"
    words = [w.strip() for w in ref.read_text(encoding="ascii").splitlines()]
    return [w for w in words if w]
