# This code is part of fakp and is licensed under the MIT license.
from __future__ import annotations

from typing import Optional, Union

import numpy as np
import numpy.typing as npt

from fakp.geometry import as_array
from fakp.numgraph import Tensor, segment_mean


def grid_cells(X: Union[Tensor, npt.ArrayLike],
               cell: float) -> tuple[np.ndarray, int]:
    """Assign every point to its grid cell.

    Returns the cell id of each point and the number of non-empty cells;
    ids follow the lexicographic order of the integer cell coordinates.
    """
    if cell <= 0:
        raise ValueError(f"grid cell size must be positive, got {cell}")
    keys = np.floor(as_array(X) / cell).astype(np.int64)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    return inverse.reshape(-1), uniq.shape[0]


def grid_subsample(X: Union[Tensor, npt.ArrayLike], F: Optional[Tensor],
                   cell: float) -> tuple[Tensor, Optional[Tensor]]:
    """Replace the points of each non-empty cell by their barycenter.

    Features are averaged per cell (differentiably); pass ``F=None`` to
    subsample coordinates only.
    """
    inverse, m = grid_cells(X, cell)
    X = as_array(X)
    counts = np.bincount(inverse, minlength=m).astype(np.float64)
    sums = np.zeros((m, X.shape[1]))
    np.add.at(sums, inverse, X)
    coords = Tensor(sums / counts[:, None])
    if F is None:
        return coords, None
    return coords, segment_mean(F, inverse, m)
