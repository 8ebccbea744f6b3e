# This code is part of fakp and is licensed under the MIT license.
"""Input-dependent frames of the Euclidean groups.

The frame of a cloud is built from its centroid ``c`` and the eigenvectors
``Q`` of its covariance. For groups containing rotations every sign flip of
the columns of ``Q`` is enumerated (only the proper ones for SO/SE), in
lexicographic order of the sign pattern with ``+`` before ``-``.
"""
from __future__ import annotations

import itertools
import logging
from typing import Iterator, Optional, Union

import numpy as np
import numpy.typing as npt

from fakp.exceptions import (
    DegenerateFrameError,
    EmptyCloudError,
    ShapeMismatchError,
    TooFewPointsError,
)
from fakp.geometry import EuclideanTransform, GroupSpec, as_array
from fakp.numgraph import Tensor
from .eigen import EigenDecomposition, sym_eig

logger = logging.getLogger(__name__)

DEFAULT_DEGENERACY_TOL = 1e-6
_GAP_EPS = 1e-12


def _points(X: Union[Tensor, npt.ArrayLike]) -> np.ndarray:
    X = as_array(X)
    if X.ndim != 2:
        raise ShapeMismatchError(f"expected an n x d matrix, got {X.shape}")
    if X.shape[0] == 0:
        raise EmptyCloudError("the cloud has no points")
    return X


def centroid(X: Union[Tensor, npt.ArrayLike]) -> np.ndarray:
    """Mean of the rows of ``X``."""
    return _points(X).mean(axis=0)


def covariance(X: Union[Tensor, npt.ArrayLike]) -> np.ndarray:
    """Un-normalized centered second moment ``(X - 1c^T)^T (X - 1c^T)``."""
    X = _points(X)
    centered = X - X.mean(axis=0)
    C = centered.T @ centered
    return 0.5 * (C + C.T)


def relative_gap(eigenvalues: np.ndarray) -> float:
    """Smallest gap between consecutive eigenvalues relative to the largest."""
    if len(eigenvalues) < 2:
        return float("inf")
    gaps = eigenvalues[:-1] - eigenvalues[1:]
    return float(gaps.min() / (eigenvalues[0] + _GAP_EPS))


class Frame:
    """An ordered, finite set of group elements attached to one cloud."""

    def __init__(self, elements, group: GroupSpec, degeneracy_gap: float,
                 eigen: Optional[EigenDecomposition] = None):
        self.elements: tuple[EuclideanTransform, ...] = tuple(elements)
        self.group = group
        self.degeneracy_gap = degeneracy_gap
        self.eigen = eigen

    def __len__(self):
        return len(self.elements)

    def __iter__(self) -> Iterator[EuclideanTransform]:
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def truncated(self, k: int) -> Frame:
        return Frame(self.elements[:k], self.group, self.degeneracy_gap,
                     self.eigen)

    def matches(self, other, atol: float = 1e-8) -> bool:
        """Whether both frames hold the same elements, in any order."""
        others = list(other)
        if len(others) != len(self):
            return False
        unused = list(range(len(others)))
        for h in self.elements:
            hit = next((j for j in unused if h.allclose(others[j], atol)), None)
            if hit is None:
                return False
            unused.remove(hit)
        return True

    def __repr__(self):
        return (f"Frame(group={self.group.display_name()}, "
                f"size={len(self)}, degeneracy_gap={self.degeneracy_gap:.3g})")


def sign_patterns(d: int, proper_only: bool,
                  basis: np.ndarray) -> list[np.ndarray]:
    patterns = []
    for signs in itertools.product((1.0, -1.0), repeat=d):
        signs = np.array(signs)
        if proper_only and np.linalg.det(basis * signs) < 0:
            continue
        patterns.append(signs)
    return patterns


def build_frame(X: Union[Tensor, npt.ArrayLike], group: GroupSpec,
                degeneracy_tol: float = DEFAULT_DEGENERACY_TOL) -> Frame:
    """Frame of ``X`` for ``group``.

    Coordinates are read without gradient tracking.

    Raises
    ------
    EmptyCloudError
      if ``X`` has no rows.
    TooFewPointsError
      if the group needs eigenvectors and ``n < d``.
    DegenerateFrameError
      if the relative eigenvalue gap is below ``degeneracy_tol``.
    """
    X = _points(X)
    n, d = X.shape
    c = centroid(X)

    if not group.has_rotation:
        return Frame([EuclideanTransform(np.eye(d), c)], group, float("inf"))

    if n < d:
        errmsg = (f"{group.display_name(d)} frames need at least {d} points, "
                  f"got {n}")
        raise TooFewPointsError(errmsg)

    eig = sym_eig(covariance(X))
    gap = relative_gap(eig.eigenvalues)
    if gap < degeneracy_tol:
        errmsg = (f"covariance eigenvalues {eig.eigenvalues.tolist()} are "
                  f"too close (relative gap {gap:.3g} < {degeneracy_tol:.3g}); "
                  "the frame is not well defined")
        raise DegenerateFrameError(errmsg, gap=gap)

    t = c if group.has_translation else np.zeros(d)
    Q = eig.eigenvectors
    elements = [EuclideanTransform(Q * signs, t)
                for signs in sign_patterns(d, not group.has_reflection, Q)]
    logger.debug("%s frame with %d elements, relative gap %.3g",
                 group.display_name(d), len(elements), gap)
    return Frame(elements, group, gap, eig)
