# This code is part of fakp and is licensed under the MIT license.
from __future__ import annotations

from typing import Callable, Iterable, Literal, Union

import numpy as np
import numpy.typing as npt

from fakp.exceptions import NotMultipleOfDimError, ShapeMismatchError
from fakp.geometry import (
    EuclideanTransform,
    act_on_features,
    apply,
    as_array,
    inverse,
)
from fakp.numgraph import Tensor, reduce, reshape, stack

Mode = Literal["invariant", "equivariant"]
PointFunction = Callable[[Tensor, Tensor], Tensor]


def check_feature_width(F: Tensor, d: int, what: str = "input") -> None:
    if F.ndim not in (1, 2):
        raise ShapeMismatchError(f"{what} features must be a matrix or a "
                                 f"vector, got shape {F.shape}")
    width = F.shape[-1]
    if width % d != 0:
        errmsg = (f"{what} feature width {width} is not a multiple of the "
                  f"dimension {d}")
        raise NotMultipleOfDimError(errmsg)


def act_on_output(g: EuclideanTransform, Y: Tensor, d: int) -> Tensor:
    """Reshape action on a point-wise [n x c] or a pooled [c] output."""
    check_feature_width(Y, d, "output")
    if Y.ndim == 1:
        return reshape(act_on_features(g, reshape(Y, (1, Y.shape[0])), d),
                       Y.shape)
    return act_on_features(g, Y, d)


def average_over(fn: PointFunction, elements: Iterable[EuclideanTransform],
                 X: Union[Tensor, npt.ArrayLike], F: Tensor,
                 mode: Mode) -> Tensor:
    """``1/|S| sum_g [g .] fn(g^-1 X, g^-1 F)`` over the transforms ``S``.

    Branches are evaluated and averaged in the order of ``elements``.
    """
    if mode not in ("invariant", "equivariant"):
        raise ValueError(f"unknown symmetrization mode '{mode}'")
    X = as_array(X)
    d = X.shape[1]
    check_feature_width(F, d)

    outputs = []
    for g in elements:
        g_inv = inverse(g)
        Y = fn(Tensor(apply(g_inv, X)), act_on_features(g_inv, F, d))
        if mode == "equivariant":
            Y = act_on_output(g, Y, d)
        outputs.append(Y)
    return reduce(stack(outputs), 0, "mean")


def as_feature_tensor(F) -> Tensor:
    return F if isinstance(F, Tensor) else Tensor(np.asarray(F))
