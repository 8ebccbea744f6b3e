# This code is part of fakp and is licensed under the MIT license.
"""Fixed-radius neighborhoods, by brute force or on a uniform grid."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Literal, Sequence, Union

import numpy as np
import numpy.typing as npt

from fakp.exceptions import ShapeMismatchError
from fakp.geometry import as_array
from fakp.numgraph import Tensor

SearchMethod = Literal["bruteforce", "grid"]


def _squared_distances(points: np.ndarray, query: np.ndarray) -> np.ndarray:
    # explicit per-coordinate sum so both search methods agree bitwise
    d2 = np.zeros(np.broadcast_shapes(points.shape, query.shape)[:-1])
    for k in range(points.shape[-1]):
        d2 = d2 + (points[..., k] - query[..., k]) ** 2
    return d2


def _bruteforce(X: np.ndarray, Q: np.ndarray, r2: float) -> list[np.ndarray]:
    d2 = _squared_distances(X[None, :, :], Q[:, None, :])
    return [np.flatnonzero(row <= r2) for row in d2]


def _grid(X: np.ndarray, Q: np.ndarray, r: float, r2: float) -> list[np.ndarray]:
    d = X.shape[1]
    cells: dict[tuple, list[int]] = {}
    for i, key in enumerate(map(tuple, np.floor(X / r).astype(np.int64))):
        cells.setdefault(key, []).append(i)
    offsets = list(itertools.product((-1, 0, 1), repeat=d))

    result = []
    for q, qkey in zip(Q, np.floor(Q / r).astype(np.int64)):
        candidates = []
        for off in offsets:
            candidates.extend(cells.get(tuple(qkey + off), ()))
        if not candidates:
            result.append(np.empty(0, dtype=np.int64))
            continue
        candidates = np.sort(np.asarray(candidates, dtype=np.int64))
        d2 = _squared_distances(X[candidates], q[None, :])
        result.append(candidates[d2 <= r2])
    return result


def radius_neighbors(X: Union[Tensor, npt.ArrayLike],
                     queries: Union[Tensor, npt.ArrayLike], r: float,
                     method: SearchMethod = "bruteforce") -> list[np.ndarray]:
    """Indices of the points of ``X`` within distance ``r`` (inclusive) of
    each query, sorted ascending."""
    if r <= 0:
        raise ValueError(f"search radius must be positive, got {r}")
    X, Q = as_array(X), as_array(queries)
    if X.ndim != 2 or Q.ndim != 2 or X.shape[1] != Q.shape[1]:
        errmsg = f"cannot search {Q.shape} queries among {X.shape} points"
        raise ShapeMismatchError(errmsg)
    r2 = r * r
    if method == "bruteforce":
        return _bruteforce(X, Q, r2)
    if method == "grid":
        return _grid(X, Q, r, r2)
    raise ValueError(f"unknown neighbor search method '{method}'")


@dataclass(frozen=True)
class NeighborTable:
    """Neighbor lists padded to a common length.

    Padding slots hold the shadow index ``n_support``, one past the last
    real point.
    """
    indices: np.ndarray
    n_support: int

    @classmethod
    def from_lists(cls, lists: Sequence[Sequence[int]],
                   n_support: int) -> NeighborTable:
        width = max((len(ix) for ix in lists), default=0)
        table = np.full((len(lists), width), n_support, dtype=np.int64)
        for row, ix in enumerate(lists):
            table[row, :len(ix)] = ix
        table.setflags(write=False)
        return cls(indices=table, n_support=int(n_support))

    @property
    def mask(self) -> np.ndarray:
        return self.indices < self.n_support

    @property
    def n_queries(self) -> int:
        return self.indices.shape[0]

    def to_lists(self) -> list[list[int]]:
        return [row[row < self.n_support].tolist() for row in self.indices]
