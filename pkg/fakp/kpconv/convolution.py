# This code is part of fakp and is licensed under the MIT license.
"""Rigid kernel point convolution.

For a query ``q`` with neighbors ``N_q`` the output row is::

    sum_{i in N_q} sum_{k < K} max(0, 1 - |X_i - q - x_k| / sigma) F_i W_k

Gradients flow into the features and the weights; coordinates are read
as constants.
"""
from __future__ import annotations

from typing import Optional, Sequence, Union

import numpy as np
import numpy.typing as npt

from fakp.exceptions import NeighborRadiusMismatchError, ShapeMismatchError
from fakp.geometry import as_array
from fakp.numgraph import Function, Tensor, matmul, reshape
from .kernel_points import (
    DispositionMethod,
    KernelDisposition,
    dispose_kernel_points,
    kernel_point_influences,
)
from .neighbors import NeighborTable

# slack on the neighbor radius check, relative to r^2
_RADIUS_SLACK = 1e-9


class KPConvLayer:
    """Kernel points with one ``c_in x c_out`` weight matrix each.

    Parameters
    ----------
    disposition : KernelDisposition
      the fixed kernel points and the convolution radius.
    weights : Tensor
      [K x c_in x c_out], trainable.
    sigma : float
      influence distance of each kernel point.
    """

    def __init__(self, disposition: KernelDisposition, weights: Tensor,
                 sigma: float):
        if weights.ndim != 3 or weights.shape[0] != disposition.K:
            errmsg = (f"weights of shape {weights.shape} do not match "
                      f"{disposition.K} kernel points")
            raise ShapeMismatchError(errmsg)
        if sigma <= 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        self.disposition = disposition
        self.weights = weights
        self.sigma = float(sigma)

    @classmethod
    def create(cls, c_in: int, c_out: int, K: int = 15, radius: float = 0.25,
               sigma_ratio: float = 0.3,
               method: DispositionMethod = "repulsion", seed: int = 0,
               rng: Optional[np.random.Generator] = None,
               d: int = 3) -> KPConvLayer:
        """New layer with He-uniform weights, ``U(-b, b)``,
        ``b = sqrt(6 / (K * c_in))``."""
        disposition = dispose_kernel_points(K, radius, method, seed, d)
        if rng is None:
            rng = np.random.default_rng(seed)
        bound = np.sqrt(6.0 / (K * c_in))
        W = rng.uniform(-bound, bound, size=(K, c_in, c_out))
        return cls(disposition, Tensor(W, requires_grad=True),
                   sigma_ratio * radius)

    @property
    def K(self) -> int:
        return self.disposition.K

    @property
    def radius(self) -> float:
        return self.disposition.radius

    @property
    def c_in(self) -> int:
        return self.weights.shape[1]

    @property
    def c_out(self) -> int:
        return self.weights.shape[2]

    def parameters(self) -> list[Tensor]:
        return [self.weights]

    def __repr__(self):
        return (f"KPConvLayer(K={self.K}, c_in={self.c_in}, c_out={self.c_out},"
                f" radius={self.radius}, sigma={self.sigma})")


class _KernelAggregate(Function):
    """Influence-weighted neighbor features, [m x (K * c)]."""

    def forward(self, F, influences, indices):
        n, c = F.shape
        m, _, K = influences.shape
        self.n, self.c = n, c
        self.influences, self.indices = influences, indices
        padded = np.vstack([F, np.zeros((1, c))])
        gathered = padded[indices]
        return np.einsum("mhk,mhc->mkc", influences, gathered).reshape(m, K * c)

    def backward(self, grad):
        m, _, K = self.influences.shape
        grad = grad.reshape(m, K, self.c)
        dgathered = np.einsum("mhk,mkc->mhc", self.influences, grad)
        dpadded = np.zeros((self.n + 1, self.c))
        np.add.at(dpadded, self.indices, dgathered)
        return (dpadded[:self.n],)


def _as_table(neighbors: Union[NeighborTable, Sequence[Sequence[int]]],
              n: int) -> NeighborTable:
    if isinstance(neighbors, NeighborTable):
        if neighbors.n_support != n:
            errmsg = (f"neighbor table was built for {neighbors.n_support} "
                      f"support points, got {n}")
            raise ShapeMismatchError(errmsg)
        return neighbors
    return NeighborTable.from_lists(neighbors, n)


def kpconv_forward(layer: KPConvLayer, X: Union[Tensor, npt.ArrayLike],
                   F: Tensor, queries: Union[Tensor, npt.ArrayLike],
                   neighbors: Union[NeighborTable, Sequence[Sequence[int]]]
                   ) -> Tensor:
    """Convolve features ``F`` on support points ``X`` at ``queries``.

    Queries with an empty neighborhood get a zero row.

    Raises
    ------
    ShapeMismatchError
      on inconsistent shapes.
    NeighborRadiusMismatchError
      if a listed neighbor lies farther than the layer radius (checked
      unless Python runs with -O).
    """
    X, Q = as_array(X), as_array(queries)
    d = layer.disposition.dimension
    if F.ndim != 2 or F.shape[1] != layer.c_in:
        errmsg = f"features {F.shape} do not match c_in={layer.c_in}"
        raise ShapeMismatchError(errmsg)
    if X.ndim != 2 or X.shape != (F.shape[0], d):
        errmsg = (f"support coordinates {X.shape} do not match features "
                  f"{F.shape} in R^{d}")
        raise ShapeMismatchError(errmsg)
    if Q.ndim != 2 or Q.shape[1] != d:
        raise ShapeMismatchError(f"queries {Q.shape} do not live in R^{d}")
    n = X.shape[0]
    table = _as_table(neighbors, n)
    if table.n_queries != Q.shape[0]:
        errmsg = (f"{table.n_queries} neighbor lists for {Q.shape[0]} "
                  "queries")
        raise ShapeMismatchError(errmsg)

    idx = table.indices
    if idx.size and (idx.min() < 0 or idx.max() > n):
        raise ShapeMismatchError(f"neighbor indices must lie in [0, {n})")
    mask = table.mask
    padded_X = np.vstack([X, np.zeros((1, d))])
    relative = padded_X[idx] - Q[:, None, :]

    if __debug__:
        r2 = layer.radius ** 2
        d2 = (relative ** 2).sum(axis=-1)
        if np.any(mask & (d2 > r2 * (1.0 + _RADIUS_SLACK))):
            errmsg = (f"neighbor lists reference points beyond the layer "
                      f"radius {layer.radius}")
            raise NeighborRadiusMismatchError(errmsg)

    influences = kernel_point_influences(relative, layer.disposition.points,
                                         layer.sigma)
    influences = influences * mask[..., None]
    aggregated = _KernelAggregate.apply(F, influences=influences, indices=idx)
    W = reshape(layer.weights, (layer.K * layer.c_in, layer.c_out))
    return matmul(aggregated, W)
