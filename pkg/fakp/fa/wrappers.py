# This code is part of fakp and is licensed under the MIT license.
"""Frame averaging wrappers.

``fa_invariant`` turns any function of a point cloud into one that is
exactly invariant to a Euclidean group by averaging it over the frame of
the input; ``fa_equivariant`` additionally maps each branch output back with
the frame element. ``fa_composed`` nests two wrappers over groups that share
no component, e.g. translation invariance on top of rotation equivariance.
"""
from __future__ import annotations

import logging
from typing import Optional, Union

import numpy.typing as npt

from fakp.exceptions import GroupsIntersectError
from fakp.frames import DEFAULT_DEGENERACY_TOL, build_frame
from fakp.geometry import GroupSpec
from fakp.numgraph import Tensor
from .averaging import Mode, PointFunction, as_feature_tensor, average_over

logger = logging.getLogger(__name__)


class WrappedFunction:
    """A point-cloud function symmetrized by frame averaging.

    Parameters
    ----------
    inner : callable
      ``(X [n x d], F [n x c_in]) -> Tensor``; ``c_in`` must be a multiple
      of ``d``, as must the output width in equivariant mode.
    group : GroupSpec
      group of the (innermost) wrapper.
    mode : {"invariant", "equivariant"}
    composed_with : (GroupSpec, mode), optional
      an outer wrapper applied on top of this one; its group must share no
      component with ``group``.
    degeneracy_tol : float
      passed to :func:`fakp.frames.build_frame`.
    max_branches : int, optional
      evaluate only the first frame elements. This breaks the symmetry
      and exists for negative controls.

    Attributes
    ----------
    inner_calls : int
      number of times ``inner`` has been evaluated so far.
    """

    def __init__(self, inner: PointFunction, group: GroupSpec,
                 mode: Mode = "invariant",
                 composed_with: Optional[tuple[GroupSpec, Mode]] = None,
                 degeneracy_tol: float = DEFAULT_DEGENERACY_TOL,
                 max_branches: Optional[int] = None):
        if mode not in ("invariant", "equivariant"):
            raise ValueError(f"unknown frame averaging mode '{mode}'")
        if composed_with is not None:
            outer_group, outer_mode = composed_with
            if outer_mode not in ("invariant", "equivariant"):
                raise ValueError(
                    f"unknown frame averaging mode '{outer_mode}'")
            if group.intersects(outer_group):
                shared = sorted(c.value for c in
                                group.components & outer_group.components)
                errmsg = (f"cannot compose {group.display_name()} with "
                          f"{outer_group.display_name()}: both contain "
                          f"{', '.join(shared)}")
                raise GroupsIntersectError(errmsg)
        if max_branches is not None and max_branches < 1:
            raise ValueError("max_branches must be at least 1")
        self.inner = inner
        self.group = group
        self.mode = mode
        self.composed_with = composed_with
        self.degeneracy_tol = degeneracy_tol
        self.max_branches = max_branches
        self.inner_calls = 0

    def _counted_inner(self, X: Tensor, F: Tensor) -> Tensor:
        self.inner_calls += 1
        return self.inner(X, F)

    def _frame(self, X, group: GroupSpec):
        frame = build_frame(X, group, self.degeneracy_tol)
        if self.max_branches is not None:
            frame = frame.truncated(self.max_branches)
        return frame

    def symmetrize(self, fn: PointFunction, group: GroupSpec, mode: Mode,
                   X, F: Tensor) -> Tensor:
        frame = self._frame(X, group)
        logger.debug("averaging over %d %s frame elements", len(frame),
                     group.display_name())
        return average_over(fn, frame, X, F, mode)

    def branch_count(self, d: int = 3) -> int:
        """Inner evaluations per call for a generic cloud in R^d."""
        groups = [self.group]
        if self.composed_with is not None:
            groups.append(self.composed_with[0])
        count = 1
        for group in groups:
            size = group.frame_cardinality(d)
            if self.max_branches is not None:
                size = min(size, self.max_branches)
            count *= size
        return count

    def __call__(self, X: Union[Tensor, npt.ArrayLike], F) -> Tensor:
        F = as_feature_tensor(F)
        if self.composed_with is not None:
            return fa_composed(self, X, F)
        if self.mode == "invariant":
            return fa_invariant(self, X, F)
        return fa_equivariant(self, X, F)

    def __repr__(self):
        outer = ""
        if self.composed_with is not None:
            g2, m2 = self.composed_with
            outer = f", composed_with=({g2.display_name()}, {m2})"
        return (f"WrappedFunction(group={self.group.display_name()}, "
                f"mode={self.mode}{outer})")


def fa_invariant(wrapped: WrappedFunction, X, F) -> Tensor:
    """``1/|F(X)| sum_g f(g^-1 X, g^-1 F)``."""
    if wrapped.mode != "invariant":
        raise ValueError("fa_invariant needs a wrapper in invariant mode")
    return wrapped.symmetrize(wrapped._counted_inner, wrapped.group,
                              "invariant", X, as_feature_tensor(F))


def fa_equivariant(wrapped: WrappedFunction, X, F) -> Tensor:
    """``1/|F(X)| sum_g g . f(g^-1 X, g^-1 F)``; the output width must be a
    multiple of d."""
    if wrapped.mode != "equivariant":
        raise ValueError("fa_equivariant needs a wrapper in equivariant mode")
    return wrapped.symmetrize(wrapped._counted_inner, wrapped.group,
                              "equivariant", X, as_feature_tensor(F))


def fa_composed(wrapped: WrappedFunction, X, F) -> Tensor:
    """Outer wrapper ``composed_with`` applied to the function defined by the
    inner wrapper ``(group, mode)``."""
    if wrapped.composed_with is None:
        raise ValueError("fa_composed needs a wrapper with composed_with set")
    outer_group, outer_mode = wrapped.composed_with

    def inner_wrapper(Xg: Tensor, Fg: Tensor) -> Tensor:
        return wrapped.symmetrize(wrapped._counted_inner, wrapped.group,
                                  wrapped.mode, Xg, Fg)

    return wrapped.symmetrize(inner_wrapper, outer_group, outer_mode, X,
                              as_feature_tensor(F))

