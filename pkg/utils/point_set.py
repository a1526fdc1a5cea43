"""
Tolerance-aware point set helpers shared by root closure, versor closure and
point arrays.

Points are rows of a float array (vector components, multivector coefficients
or flattened matrices). Two rows are "the same point" when they lie within
``tol`` of each other in the Euclidean norm. Deduplication walks the rows in
order and lets each unclaimed row claim every unclaimed row in its ``tol``
ball (a KD-tree query). The rounding hash only fixes the canonical order of
a finished set.
"""
from typing import Tuple

import numpy as np
from scipy.spatial import cKDTree

DEFAULT_TOL = 1e-9
DEFAULT_HASH_SCALE = 1e-6


def _as_rows(points) -> np.ndarray:
    rows = np.asarray(points, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1) if rows.size else rows.reshape(0, 0)
    return rows


def hash_keys(points, scale: float = DEFAULT_HASH_SCALE) -> np.ndarray:
    """Integer cell keys; integers have no signed zero, so -0.0 and 0.0 agree"""
    return np.rint(_as_rows(points) / scale).astype(np.int64)


def unique_points(points, tol: float = DEFAULT_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """
    Deduplicate rows within ``tol``.

    Returns (unique_rows, labels) where ``labels[i]`` is the index into
    ``unique_rows`` of row i. Representatives are the first occurrence of each
    cluster and appear in first-occurrence order; every row of a cluster lies
    within ``tol`` of its representative.
    """
    rows = _as_rows(points)
    n = len(rows)
    if n == 0:
        return rows, np.zeros(0, dtype=np.int64)

    tree = cKDTree(rows)
    labels = np.full(n, -1, dtype=np.int64)
    leaders = []
    for i in range(n):
        if labels[i] >= 0:
            continue
        members = np.asarray(tree.query_ball_point(rows[i], r=tol), dtype=np.int64)
        labels[members[labels[members] < 0]] = len(leaders)
        leaders.append(i)
    return rows[leaders].copy(), labels


def canonical_order(points, hash_scale: float = DEFAULT_HASH_SCALE) -> np.ndarray:
    """Permutation sorting rows lexicographically on their rounded coefficients"""
    keys = hash_keys(points, hash_scale)
    if len(keys) == 0:
        return np.zeros(0, dtype=np.int64)
    # lexsort treats the last key as primary
    return np.lexsort(keys.T[::-1])


class PointIndex:
    """
    Read-only membership index over a fixed set of rows
    """

    def __init__(self, points, tol: float = DEFAULT_TOL):
        self.points = _as_rows(points)
        self.tol = tol
        self._tree = cKDTree(self.points) if len(self.points) else None

    def __len__(self) -> int:
        return len(self.points)

    def index_of(self, queries) -> np.ndarray:
        """Index of the matching stored row for each query, or -1"""
        rows = _as_rows(queries)
        if self._tree is None or len(rows) == 0:
            return np.full(len(rows), -1, dtype=np.int64)
        dist, idx = self._tree.query(rows, k=1)
        idx = np.asarray(idx, dtype=np.int64)
        idx[np.asarray(dist) > self.tol] = -1
        return idx

    def contains(self, queries) -> np.ndarray:
        return self.index_of(queries) >= 0


def same_point_set(a, b, tol: float = DEFAULT_TOL) -> bool:
    """Set equality up to tol, ignoring order"""
    rows_a, rows_b = _as_rows(a), _as_rows(b)
    if len(rows_a) != len(rows_b):
        return False
    if len(rows_a) == 0:
        return True
    return bool(PointIndex(rows_b, tol).contains(rows_a).all()
                and PointIndex(rows_a, tol).contains(rows_b).all())


def max_set_deviation(a, b) -> float:
    """Largest nearest-neighbour distance from either set into the other"""
    rows_a, rows_b = _as_rows(a), _as_rows(b)
    if len(rows_a) == 0 and len(rows_b) == 0:
        return 0.0
    if len(rows_a) == 0 or len(rows_b) == 0:
        return float("inf")
    d_ab, _ = cKDTree(rows_b).query(rows_a, k=1)
    d_ba, _ = cKDTree(rows_a).query(rows_b, k=1)
    return float(max(np.max(d_ab), np.max(d_ba)))
