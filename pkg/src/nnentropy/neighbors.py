"""Exact k-nearest-neighbor queries with deterministic tie handling.

Distance ties are broken by ascending point index, and every code path
computes lengths through one shared arithmetic expression, so the
kd-tree-accelerated route and the exhaustive route return bitwise-identical
indices and lengths. The kd-tree is only trusted where its reported
neighbor distances are separated by a clear relative gap; rows containing
ties (or near-ties at floating-point resolution) are re-resolved
exhaustively against a distance ball.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .errors import InsufficientPointsError
from .points import as_point_set

__all__ = ["knn_all", "knn_query", "BRUTE_FORCE_DIMENSION"]

# Above this dimension a kd-tree degenerates towards a linear scan with
# extra overhead, so the exhaustive path is used instead.
BRUTE_FORCE_DIMENSION = 20

# Relative gap below which two reported kd-tree distances are treated as a
# potential tie and the row is re-resolved with the reference arithmetic.
# Cross-library float discrepancies are a few ulp (~1e-16 relative), so
# 1e-9 is a wide safety margin while being hit essentially never for
# continuous data.
_TIE_RTOL = 1e-9

# Cap on scratch elements per block in the exhaustive path.
_BLOCK_ELEMENTS = 2**24


def _row_sq_dists(points: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Squared distances from ``query`` to each row of ``points``.

    This expression is the single source of truth for distance arithmetic:
    all paths compute lengths through the same elementwise operations and
    the same reduction axis so that results agree bitwise.
    """
    diff = points - query
    return (diff * diff).sum(axis=-1)


def knn_all(points, k: int, method: str = "auto", workers: int = -1):
    """Indices and lengths of each point's ``k`` nearest other points.

    Parameters
    ----------
    points : PointSet or array_like, shape (n, d)
        The sample.
    k : int
        Number of neighbor ranks, ``1 <= k <= n - 1``.
    method : {"auto", "kdtree", "brute"}
        "auto" picks the kd-tree for ``d <= BRUTE_FORCE_DIMENSION`` and the
        exhaustive scan above that. Both methods return identical output.
    workers : int
        Worker threads for the kd-tree queries; -1 uses all cores.

    Returns
    -------
    indices : ndarray, shape (n, k), intp
        ``indices[i, j]`` is the (j+1)-th nearest other point of point
        ``i``, ordered by distance with ties broken by ascending index.
    lengths : ndarray, shape (n, k), float64
        The corresponding Euclidean distances (zero for duplicates).
    """
    ps = as_point_set(points)
    X = ps.points
    n, d = X.shape
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise ValueError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if k >= n:
        raise InsufficientPointsError(
            f"k={k} neighbor ranks requested but the sample has only {n} points "
            f"(need at least k + 1)"
        )
    if method == "auto":
        method = "kdtree" if d <= BRUTE_FORCE_DIMENSION else "brute"
    if method == "kdtree":
        return _knn_kdtree(X, k, workers)
    if method == "brute":
        return _knn_brute(X, k)
    raise ValueError(f"unknown method {method!r}")


def knn_query(points, index: int, k: int):
    """Neighbors of a single point, bitwise-consistent with :func:`knn_all`.

    Returns ``(indices, lengths)`` of shape ``(k,)`` — the ``k`` nearest
    other points of ``points[index]`` in tie-broken order.
    """
    ps = as_point_set(points)
    X = ps.points
    n = X.shape[0]
    if not (-n <= index < n):
        raise IndexError(f"query index {index} out of range for {n} points")
    index = int(index) % n
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if k >= n:
        raise InsufficientPointsError(
            f"k={k} neighbor ranks requested but the sample has only {n} points "
            f"(need at least k + 1)"
        )
    sq = _row_sq_dists(X, X[index])
    order = np.lexsort((np.arange(n), sq))
    order = order[order != index][:k]
    return order.copy(), np.sqrt(sq[order])


def _knn_brute(X: np.ndarray, k: int):
    """Exhaustive reference path: O(n^2 d) memory-blocked scan."""
    n, d = X.shape
    indices = np.empty((n, k), dtype=np.intp)
    lengths = np.empty((n, k), dtype=np.float64)
    block = max(1, _BLOCK_ELEMENTS // max(1, n * d))
    ar = np.arange(n)
    for start in range(0, n, block):
        stop = min(start + block, n)
        diff = X[start:stop, None, :] - X[None, :, :]
        sq = (diff * diff).sum(axis=-1)
        for row, i in enumerate(range(start, stop)):
            order = np.lexsort((ar, sq[row]))
            order = order[order != i][:k]
            indices[i] = order
            lengths[i] = np.sqrt(sq[row, order])
    return indices, lengths


def _knn_kdtree(X: np.ndarray, k: int, workers: int):
    """Accelerated path; falls back to exhaustive tie resolution per row."""
    n, d = X.shape
    m = min(k + 2, n)
    tree = cKDTree(X)
    dist_s, idx_s = tree.query(X, k=m, workers=workers)
    # A row is unambiguous when the point itself comes first and all
    # consecutive reported distances have a clear relative gap; only then
    # can scipy's ordering be trusted to match the tie-broken reference.
    gaps = np.diff(dist_s, axis=1)
    clear = (idx_s[:, 0] == np.arange(n)) & (gaps > _TIE_RTOL * dist_s[:, 1:]).all(axis=1)

    indices = np.empty((n, k), dtype=np.intp)
    lengths = np.empty((n, k), dtype=np.float64)

    rows = np.nonzero(clear)[0]
    if rows.size:
        sel = idx_s[rows, 1 : k + 1]
        diff = X[sel] - X[rows][:, None, :]
        indices[rows] = sel
        lengths[rows] = np.sqrt((diff * diff).sum(axis=-1))

    for i in np.nonzero(~clear)[0]:
        radius = float(dist_s[i, -1]) * (1.0 + _TIE_RTOL)
        while True:
            cand = np.asarray(tree.query_ball_point(X[i], radius), dtype=np.intp)
            if cand.size >= k + 1:
                sq = _row_sq_dists(X[cand], X[i])
                order = np.lexsort((cand, sq))
                keep = cand[order] != i
                chosen = cand[order][keep][:k]
                indices[i] = chosen
                lengths[i] = np.sqrt(sq[order][keep][:k])
                break
            # The ball was too tight (possible only through duplicate
            # pile-ups at radius zero); widen and retry.
            radius = max(radius * 2.0, 1e-300)
    return indices, lengths
