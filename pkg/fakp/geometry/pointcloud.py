# This code is part of fakp and is licensed under the MIT license.
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt

from fakp.exceptions import EmptyCloudError, ShapeMismatchError
from fakp.numgraph import Tensor
from .transforms import EuclideanTransform, act_on_features, apply

SUPPORTED_DIMENSIONS = (2, 3)


@dataclass(frozen=True)
class PointCloud:
    """Coordinates ``X`` [n x d] and per-point features ``F`` [n x c]."""
    coords: Tensor
    features: Tensor

    def __post_init__(self):
        X, F = self.coords, self.features
        if X.ndim != 2 or F.ndim != 2:
            errmsg = (f"coordinates and features must be matrices, got "
                      f"{X.shape} and {F.shape}")
            raise ShapeMismatchError(errmsg)
        if X.shape[0] == 0:
            raise EmptyCloudError("a point cloud needs at least one point")
        if X.shape[1] not in SUPPORTED_DIMENSIONS:
            errmsg = (f"points must live in R^2 or R^3, got dimension "
                      f"{X.shape[1]}")
            raise ShapeMismatchError(errmsg)
        if F.shape[0] != X.shape[0]:
            errmsg = (f"{X.shape[0]} coordinates but {F.shape[0]} feature "
                      "rows")
            raise ShapeMismatchError(errmsg)

    @classmethod
    def from_arrays(cls, coords: npt.ArrayLike,
                    features: Optional[npt.ArrayLike] = None) -> PointCloud:
        """Build a cloud; features default to the ones-vector of width d."""
        X = np.asarray(coords, dtype=np.float64)
        if X.ndim != 2:
            raise ShapeMismatchError(f"expected an n x d matrix, got {X.shape}")
        F = np.ones_like(X) if features is None else features
        return cls(Tensor(X), Tensor(F))

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    @property
    def channels(self) -> int:
        return self.features.shape[1]

    def transformed(self, g: EuclideanTransform,
                    transform_features: bool = True) -> PointCloud:
        """``g . (X, F)``; features go through the reshape action."""
        X = apply(g, self.coords.data)
        F = self.features.data
        if transform_features:
            F = act_on_features(g, F, self.dimension)
        return PointCloud(Tensor(X), Tensor(F))

    def __len__(self):
        return self.n_points
