"""Point sets, neighbor-rank specifications, and axis-aligned cubes.

These are the small immutable value types shared by the graph layer, the
estimators, and the diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Integral

import numpy as np

from .errors import OutsideCubeError

__all__ = [
    "PointSet",
    "NeighborSpec",
    "Cube",
    "as_point_set",
    "as_neighbor_spec",
]


class PointSet:
    """An immutable collection of ``n`` points in ``R^d``.

    Parameters
    ----------
    points : array_like, shape (n, d)
        Point coordinates; must be finite. The data is copied into a
        C-contiguous float64 array which is then marked read-only.
    """

    __slots__ = ("_points",)

    def __init__(self, points) -> None:
        arr = np.array(points, dtype=np.float64, order="C", copy=True)
        if arr.ndim != 2:
            raise ValueError(f"points must be a 2-d array, got shape {arr.shape}")
        n, d = arr.shape
        if n < 1 or d < 1:
            raise ValueError(f"need at least one point and one coordinate, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("points must be finite")
        arr.flags.writeable = False
        self._points = arr

    @property
    def points(self) -> np.ndarray:
        """The ``(n, d)`` read-only coordinate array."""
        return self._points

    @property
    def n(self) -> int:
        return self._points.shape[0]

    @property
    def d(self) -> int:
        return self._points.shape[1]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"PointSet(n={self.n}, d={self.d})"


def as_point_set(obj) -> PointSet:
    """Coerce an array-like or :class:`PointSet` into a :class:`PointSet`."""
    if isinstance(obj, PointSet):
        return obj
    return PointSet(obj)


@dataclass(frozen=True)
class NeighborSpec:
    """Which neighbor ranks receive an edge from every vertex.

    ``indices`` is a sorted tuple of distinct positive integers; rank ``i``
    means "the i-th nearest other point". ``k`` is the largest rank and
    bounds the sample size required to build a graph (``n > k``).
    """

    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        try:
            raw = tuple(self.indices)
        except TypeError:
            raise ValueError("neighbor ranks must be an iterable of integers") from None
        if not raw:
            raise ValueError("neighbor spec needs at least one rank")
        for r in raw:
            if not isinstance(r, Integral):
                raise ValueError(f"neighbor ranks must be integers, got {r!r}")
        cleaned = tuple(sorted({int(r) for r in raw}))
        if cleaned[0] < 1:
            raise ValueError(f"neighbor ranks must be >= 1, got {cleaned[0]}")
        object.__setattr__(self, "indices", cleaned)

    @property
    def k(self) -> int:
        """The largest rank in the spec."""
        return self.indices[-1]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    @classmethod
    def single(cls, k: int) -> "NeighborSpec":
        """The spec ``{k}`` with a single rank."""
        return cls((k,))

    @classmethod
    def first(cls, k: int) -> "NeighborSpec":
        """The spec ``{1, ..., k}`` of all ranks up to ``k``."""
        return cls(tuple(range(1, int(k) + 1)))

    @classmethod
    def parse(cls, text: str) -> "NeighborSpec":
        """Parse a comma-separated rank list such as ``"1,2,3"``."""
        parts = [p.strip() for p in str(text).split(",") if p.strip()]
        if not parts:
            raise ValueError("neighbor spec needs at least one rank")
        try:
            ranks = tuple(int(p) for p in parts)
        except ValueError:
            raise ValueError(f"cannot parse neighbor ranks from {text!r}") from None
        return cls(ranks)


def as_neighbor_spec(obj) -> NeighborSpec:
    """Coerce a :class:`NeighborSpec`, iterable of ranks, or string."""
    if isinstance(obj, NeighborSpec):
        return obj
    if isinstance(obj, str):
        return NeighborSpec.parse(obj)
    return NeighborSpec(tuple(obj))


@dataclass(frozen=True)
class Cube:
    """The axis-aligned cube ``[lower, lower + side]^d``."""

    lower: np.ndarray
    side: float

    def __post_init__(self) -> None:
        lo = np.array(self.lower, dtype=np.float64, copy=True).reshape(-1)
        if lo.size < 1 or not np.isfinite(lo).all():
            raise ValueError("cube lower corner must be a finite vector")
        side = float(self.side)
        if not np.isfinite(side) or side <= 0.0:
            raise ValueError(f"cube side must be positive and finite, got {side}")
        lo.flags.writeable = False
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "side", side)

    @classmethod
    def unit(cls, d: int) -> "Cube":
        """The unit cube ``[0, 1]^d``."""
        return cls(np.zeros(int(d)), 1.0)

    @property
    def d(self) -> int:
        return self.lower.size

    @property
    def upper(self) -> np.ndarray:
        return self.lower + self.side

    def contains(self, points) -> bool:
        """Whether every point lies in the closed cube."""
        x = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return bool((x >= self.lower).all() and (x <= self.upper).all())

    def nearest_boundary(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Nearest boundary point and boundary distance for each point.

        For a point in the closed cube the nearest boundary point is its
        projection onto the closest face. Ties across axes go to the lowest
        axis; a tie between the two faces of that axis goes to the lower
        face. Returns ``(b, r)`` with ``b`` of shape ``(n, d)`` and ``r`` of
        shape ``(n,)`` where ``r[i] = ||x_i - b_i||`` is the distance to the
        boundary.

        Raises
        ------
        OutsideCubeError
            If any point lies outside the closed cube.
        """
        x = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if x.shape[1] != self.d:
            raise ValueError(f"points have dimension {x.shape[1]}, cube has {self.d}")
        d_lo = x - self.lower
        d_hi = self.upper - x
        if (d_lo < 0).any() or (d_hi < 0).any():
            bad = int(np.nonzero((d_lo < 0).any(axis=1) | (d_hi < 0).any(axis=1))[0][0])
            raise OutsideCubeError(f"point {bad} lies outside the cube")
        face = np.minimum(d_lo, d_hi)
        rows = np.arange(x.shape[0])
        axis = np.argmin(face, axis=1)  # argmin takes the lowest axis on ties
        r = face[rows, axis]
        b = x.copy()
        use_low = d_lo[rows, axis] <= d_hi[rows, axis]
        b[rows, axis] = np.where(use_low, self.lower[axis], self.upper[axis])
        return b, r
