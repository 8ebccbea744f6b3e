# This code is part of fakp and is licensed under the MIT license.
"""Settings of the miniature KP-CNN classifier and of its symmetrization."""
from __future__ import annotations

from typing import Any, Literal, Optional

try:
    from pydantic.v1 import root_validator, validator
except ImportError:  # -no-cov-
    from pydantic import root_validator, validator

from fakp.fa import WrappedFunction
from fakp.fa.averaging import PointFunction
from fakp.geometry import GroupSpec
from fakp.utils import SettingsModel


class KPCNNMiniConfig(SettingsModel):
    """Architecture and optimization settings of :class:`KPCNNMini`.

    ``channels[i]`` is the input width of block ``i``; block ``i`` outputs
    ``channels[i + 1]`` and the last block outputs ``embedding_width``.
    """

    num_classes: int = 6
    dimension: int = 3
    channels: list[int] = [3, 12, 24]
    """Input width of every block, each a multiple of ``dimension``."""
    embedding_width: int = 48
    """Output width of the last block, pooled into the global descriptor."""
    radii: list[float] = [0.25, 0.5, 1.0]
    """Convolution radius of every block."""
    subsample_cells: list[float] = [0.1, 0.2, 0.4]
    """Grid cell size used to pick the query points of every block."""
    K: int = 15
    """Number of kernel points."""
    sigma_ratio: float = 0.3
    """Kernel point influence distance, relative to the block radius."""
    leaky_slope: float = 0.1
    kernel_disposition: Literal['repulsion', 'shell'] = 'repulsion'
    global_pooling: Literal['mean', 'max'] = 'mean'
    input_features: Literal['ones', 'coords'] = 'ones'
    """``ones`` uses the cloud's own features, ``coords`` feeds the
    coordinates as features."""
    bn_momentum: float = 0.1
    bn_eps: float = 1e-5
    neighbor_search: Literal['bruteforce', 'grid'] = 'grid'
    degeneracy_tol: float = 1e-6
    """Smallest relative covariance eigenvalue gap accepted by the frames."""
    cache_size: int = 4096
    """Number of per-cloud neighborhood pyramids kept between passes."""
    lr: float = 0.01
    momentum: float = 0.9
    epochs: int = 20
    batch_size: int = 10
    seed: int = 0

    @validator('num_classes')
    def at_least_two_classes(cls, v):
        if v < 2:
            errmsg = f"num_classes must be at least 2, got {v}"
            raise ValueError(errmsg)
        return v

    @validator('dimension')
    def supported_dimension(cls, v):
        if v not in (2, 3):
            errmsg = f"dimension must be 2 or 3, got {v}"
            raise ValueError(errmsg)
        return v

    @validator('channels', 'radii', 'subsample_cells')
    def non_empty_positive(cls, v, field):
        if not v:
            raise ValueError(f"{field.name} must not be empty")
        if any(x <= 0 for x in v):
            errmsg = f"{field.name} must be positive values, got {v}"
            raise ValueError(errmsg)
        return v

    @validator('embedding_width', 'K', 'batch_size')
    def must_be_positive_int(cls, v, field):
        if v < 1:
            errmsg = f"{field.name} must be at least 1, got {v}"
            raise ValueError(errmsg)
        return v

    @validator('sigma_ratio', 'bn_eps')
    def must_be_positive(cls, v, field):
        if v <= 0:
            errmsg = f"{field.name} must be a positive value, got {v}"
            raise ValueError(errmsg)
        return v

    @validator('lr', 'epochs', 'cache_size', 'degeneracy_tol')
    def must_be_positive_or_zero(cls, v, field):
        if v < 0:
            errmsg = f"{field.name} must be zero or positive, got {v}"
            raise ValueError(errmsg)
        return v

    @validator('leaky_slope', 'momentum')
    def unit_interval(cls, v, field):
        if not 0 <= v < 1:
            errmsg = f"{field.name} must lie in [0, 1), got {v}"
            raise ValueError(errmsg)
        return v

    @validator('bn_momentum')
    def running_momentum(cls, v):
        if not 0 < v <= 1:
            errmsg = f"bn_momentum must lie in (0, 1], got {v}"
            raise ValueError(errmsg)
        return v

    @root_validator(skip_on_failure=True)
    def consistent_blocks(cls, values):
        d = values['dimension']
        channels = values['channels']
        widths = channels + [values['embedding_width']]
        if any(w % d for w in widths):
            errmsg = (f"channels {channels} and embedding_width "
                      f"{values['embedding_width']} must be multiples of the "
                      f"dimension {d}")
            raise ValueError(errmsg)
        if not (len(channels) == len(values['radii'])
                == len(values['subsample_cells'])):
            errmsg = ("channels, radii and subsample_cells need one entry per "
                      f"block, got {len(channels)}, {len(values['radii'])} "
                      f"and {len(values['subsample_cells'])}")
            raise ValueError(errmsg)
        return values

    @property
    def n_blocks(self) -> int:
        return len(self.channels)

    @classmethod
    def desk_scale(cls, **overrides) -> KPCNNMiniConfig:
        """Lighter network for benchmark runs on a single CPU.

        Compared to the defaults the blocks are half as wide, use 7 kernel
        points and coarser query grids, and training stops after 6 epochs
        at a doubled learning rate. Training and evaluating a baseline and
        an E(3) frame-averaged model on 60, 150 and 300 clouds of 256 points
        (300 test clouds) then fits in about 10 CPU minutes; the defaults
        need several times that, mostly in the 8 frame branches.
        """
        return cls(**{**DESK_SCALE, **overrides})


DESK_SCALE: dict[str, Any] = {
    "channels": [3, 6, 12],
    "embedding_width": 24,
    "radii": [0.3, 0.6, 1.2],
    "subsample_cells": [0.15, 0.3, 0.6],
    "K": 7,
    "epochs": 6,
    "lr": 0.02,
}


WrapperMode = Literal['none', 'invariant', 'equivariant', 'composed']


class WrapperSettings(SettingsModel):
    """How a model is symmetrized.

    ``composed`` makes the model equivariant to ``group`` and invariant to
    ``outer_group``; the two must share no component.
    """

    mode: WrapperMode = 'none'
    group: GroupSpec = GroupSpec.TRANSLATIONS_ROTATIONS_REFLECTIONS
    outer_group: GroupSpec = GroupSpec.TRANSLATIONS

    @validator('group', 'outer_group', pre=True)
    def group_from_tag(cls, v):
        if isinstance(v, str):
            return GroupSpec.from_tag(v)
        return v

    @root_validator(skip_on_failure=True)
    def disjoint_composition(cls, values):
        if values['mode'] == 'composed' and \
                values['group'].intersects(values['outer_group']):
            errmsg = (f"cannot compose {values['group'].display_name()} with "
                      f"{values['outer_group'].display_name()}: the groups "
                      "intersect")
            raise ValueError(errmsg)
        return values

    @property
    def is_wrapped(self) -> bool:
        return self.mode != 'none'

    def as_text_values(self) -> dict[str, Any]:
        return {"wrapper_mode": self.mode, "wrapper_group": self.group,
                "wrapper_outer_group": self.outer_group}

    def wrap(self, inner: PointFunction,
             degeneracy_tol: float) -> Optional[WrappedFunction]:
        if self.mode == 'none':
            return None
        if self.mode == 'composed':
            return WrappedFunction(inner, self.group, 'equivariant',
                                   composed_with=(self.outer_group,
                                                  'invariant'),
                                   degeneracy_tol=degeneracy_tol)
        return WrappedFunction(inner, self.group, self.mode,
                               degeneracy_tol=degeneracy_tol)
