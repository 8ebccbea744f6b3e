# This code is part of fakp and is licensed under the MIT license.
"""Euclidean transforms ``g = (R, t)`` acting on row-major point sets.

A transform acts on an ``n x d`` coordinate matrix as ``X R^T + 1 t^T``.
Feature matrices whose width is a multiple of ``d`` are acted upon by
reshaping them to ``(n * c/d) x d`` rows first, translation included.
"""
from __future__ import annotations

from typing import Optional, TypeVar, Union

import numpy as np
import numpy.typing as npt

from fakp.exceptions import NotMultipleOfDimError, ShapeMismatchError
from fakp.numgraph import Tensor, add_bias, matmul, reshape
from .groups import GroupSpec

ORTHOGONALITY_TOL = 1e-9

Points = TypeVar("Points", Tensor, np.ndarray)


def _readonly(arr: npt.ArrayLike) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    out.setflags(write=False)
    return out


class EuclideanTransform:
    """An element ``(R, t)`` of E(d), R orthogonal.

    Parameters
    ----------
    rotation : array_like
      d x d orthogonal matrix; reflections (det -1) are allowed.
    translation : array_like, optional
      d-vector, zero if omitted.

    Raises
    ------
    ValueError
      if ``rotation`` is not orthogonal within 1e-9 or the translation has
      the wrong length.
    """
    __slots__ = ("rotation", "translation")

    def __init__(self, rotation: npt.ArrayLike,
                 translation: Optional[npt.ArrayLike] = None):
        R = _readonly(rotation)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise ShapeMismatchError(f"rotation must be square, got {R.shape}")
        d = R.shape[0]
        t = _readonly(np.zeros(d) if translation is None else translation)
        if t.shape != (d,):
            errmsg = f"translation must have shape ({d},), got {t.shape}"
            raise ShapeMismatchError(errmsg)
        deviation = np.abs(R.T @ R - np.eye(d)).max()
        if deviation > ORTHOGONALITY_TOL:
            errmsg = (f"rotation is not orthogonal: max |R^T R - I| = "
                      f"{deviation:.3g}")
            raise ValueError(errmsg)
        self.rotation = R
        self.translation = t

    @classmethod
    def identity(cls, d: int) -> EuclideanTransform:
        return cls(np.eye(d), np.zeros(d))

    @classmethod
    def pure_translation(cls, t: npt.ArrayLike) -> EuclideanTransform:
        t = np.asarray(t, dtype=np.float64)
        return cls(np.eye(t.shape[0]), t)

    @property
    def dimension(self) -> int:
        return self.rotation.shape[0]

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.rotation))

    def allclose(self, other: EuclideanTransform, atol: float = 1e-8) -> bool:
        return (self.dimension == other.dimension
                and np.allclose(self.rotation, other.rotation, rtol=0, atol=atol)
                and np.allclose(self.translation, other.translation, rtol=0,
                                atol=atol))

    def max_deviation(self, other: EuclideanTransform) -> float:
        return float(max(np.abs(self.rotation - other.rotation).max(),
                         np.abs(self.translation - other.translation).max()))

    def __repr__(self):
        return (f"EuclideanTransform(rotation={self.rotation.tolist()}, "
                f"translation={self.translation.tolist()})")


def _check_dims(g: EuclideanTransform, d: int) -> None:
    if g.dimension != d:
        errmsg = f"transform acts on R^{g.dimension}, points live in R^{d}"
        raise ShapeMismatchError(errmsg)


def apply(g: EuclideanTransform, X: Points) -> Points:
    """Return ``X R^T + 1 t^T``; differentiable when ``X`` is a Tensor."""
    if X.ndim != 2:
        raise ShapeMismatchError(f"expected an n x d matrix, got {X.shape}")
    _check_dims(g, X.shape[1])
    if isinstance(X, Tensor):
        return add_bias(matmul(X, Tensor(g.rotation.T)), Tensor(g.translation))
    return np.asarray(X, dtype=np.float64) @ g.rotation.T + g.translation


def inverse(g: EuclideanTransform) -> EuclideanTransform:
    """``(R^T, -R^T t)``."""
    Rt = g.rotation.T
    return EuclideanTransform(Rt, -Rt @ g.translation)


def compose(g2: EuclideanTransform, g1: EuclideanTransform) -> EuclideanTransform:
    """The transform acting as ``g2`` after ``g1``: ``(R2 R1, R2 t1 + t2)``."""
    if g1.dimension != g2.dimension:
        errmsg = (f"cannot compose transforms of R^{g2.dimension} and "
                  f"R^{g1.dimension}")
        raise ShapeMismatchError(errmsg)
    return EuclideanTransform(g2.rotation @ g1.rotation,
                              g2.rotation @ g1.translation + g2.translation)


def act_on_features(g: EuclideanTransform, F: Points, d: int) -> Points:
    """Act on an ``n x c`` feature matrix through the ``(n*k) x d`` reshape.

    Raises
    ------
    NotMultipleOfDimError
      if ``c`` is not a multiple of ``d``.
    """
    if F.ndim != 2:
        raise ShapeMismatchError(f"expected an n x c matrix, got {F.shape}")
    n, c = F.shape
    if c % d != 0:
        errmsg = (f"feature width {c} is not a multiple of the dimension {d}; "
                  "it cannot be acted upon by a Euclidean transform")
        raise NotMultipleOfDimError(errmsg)
    _check_dims(g, d)
    k = c // d
    if isinstance(F, Tensor):
        return reshape(apply(g, reshape(F, (n * k, d))), (n, c))
    return apply(g, np.asarray(F).reshape(n * k, d)).reshape(n, c)


def random_transform(group: GroupSpec, scale: float,
                     rng: np.random.Generator, d: int = 3) -> EuclideanTransform:
    """Draw a random element of ``group``.

    Rotations are Haar distributed (QR of a Gaussian matrix with the signs
    of ``diag(R)`` folded into ``Q``). For groups with reflections the
    determinant is -1 with probability 1/2. Translations are uniform in
    ``[-scale, scale]^d`` for groups containing T(d).
    """
    if scale <= 0:
        raise ValueError(f"translation scale must be positive, got {scale}")
    if d not in (2, 3):
        raise ValueError(f"only d=2 and d=3 are supported, got d={d}")

    R = np.eye(d)
    if group.has_rotation:
        q, r = np.linalg.qr(rng.standard_normal((d, d)))
        R = q * np.sign(np.diag(r))
        if np.linalg.det(R) < 0:
            R[:, 0] = -R[:, 0]
        if group.has_reflection and rng.random() < 0.5:
            R[:, 0] = -R[:, 0]
    t = np.zeros(d)
    if group.has_translation:
        t = rng.uniform(-scale, scale, size=d)
    return EuclideanTransform(R, t)


def as_array(X: Union[Tensor, npt.ArrayLike]) -> np.ndarray:
    """The float64 values of ``X`` without gradient tracking."""
    if isinstance(X, Tensor):
        return X.data
    return np.asarray(X, dtype=np.float64)
