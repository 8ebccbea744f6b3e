# This code is part of fakp and is licensed under the MIT license.
"""Symmetrization over an explicit finite group.

Used as an independent check of frame averaging: a frame-averaged
invariant function must also be invariant under every finite subgroup of
E(d).
"""
from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from fakp.exceptions import NotAGroupError
from fakp.geometry import EuclideanTransform, compose, inverse
from fakp.numgraph import Tensor
from .averaging import Mode, PointFunction, as_feature_tensor, average_over

GROUP_TOL = 1e-9


def _index_of(g: EuclideanTransform, elements: Sequence[EuclideanTransform],
              tol: float) -> int:
    for i, h in enumerate(elements):
        if g.allclose(h, atol=tol):
            return i
    return -1


def validate_finite_group(elements: Sequence[EuclideanTransform],
                          tol: float = GROUP_TOL) -> None:
    """Check closure under composition and inverse.

    Raises
    ------
    NotAGroupError
      naming the first offending pair or element.
    """
    if not elements:
        raise NotAGroupError("a group needs at least the identity element")
    for i, a in enumerate(elements):
        if _index_of(inverse(a), elements, tol) < 0:
            raise NotAGroupError(f"element {i} has no inverse in the set")
    for (i, a), (j, b) in itertools.product(enumerate(elements), repeat=2):
        if _index_of(compose(a, b), elements, tol) < 0:
            errmsg = (f"the composition of elements {i} and {j} is not in "
                      "the set")
            raise NotAGroupError(errmsg)


def group_average(inner: PointFunction,
                  finite_group: Sequence[EuclideanTransform], X, F,
                  mode: Mode) -> Tensor:
    """``1/|G| sum_g [g .] inner(g^-1 X, g^-1 F)`` over a finite group."""
    finite_group = list(finite_group)
    validate_finite_group(finite_group)
    return average_over(inner, finite_group, X, as_feature_tensor(F), mode)


def trivial_group(d: int = 3) -> list[EuclideanTransform]:
    return [EuclideanTransform.identity(d)]


def point_reflection_group(d: int = 3) -> list[EuclideanTransform]:
    """``{I, -I}``."""
    return [EuclideanTransform.identity(d), EuclideanTransform(-np.eye(d))]


def signed_permutation_group(d: int = 3,
                             proper: bool = True) -> list[EuclideanTransform]:
    """Symmetries of the cube centered at the origin.

    With ``proper=True`` only rotations are kept (24 elements for d=3),
    otherwise the full group of 2^d d! signed permutations.
    """
    elements = []
    for perm in itertools.permutations(range(d)):
        P = np.eye(d)[list(perm)]
        for signs in itertools.product((1.0, -1.0), repeat=d):
            R = P * np.array(signs)
            if proper and np.linalg.det(R) < 0:
                continue
            elements.append(EuclideanTransform(R))
    return elements
