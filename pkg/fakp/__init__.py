# This code is part of fakp and is licensed under the MIT license.
"""Kernel point convolution with exact Euclidean symmetry by frame
averaging."""
from importlib.metadata import version

from . import exceptions
from .numgraph import Tensor, backward
from .geometry import (
    EuclideanTransform,
    GroupSpec,
    PointCloud,
    act_on_features,
    apply,
    compose,
    inverse,
    random_transform,
)
from .frames import Frame, build_frame
from .kpconv import KPConvLayer, kpconv_forward
from .fa import WrappedFunction, fa_composed, fa_equivariant, fa_invariant
from .models import (
    KPCNNMini,
    KPCNNMiniConfig,
    WrapperSettings,
    build_model,
    evaluate,
    kpcnn_forward,
    train,
)

__version__ = version("fakp")
