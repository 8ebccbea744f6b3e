# This code is part of fakp and is licensed under the MIT license.
"""Rigid kernel point convolution and its geometric helpers."""

from .kernel_points import (
    KernelDisposition,
    dispose_kernel_points,
    correlation,
    kernel_point_influences,
)
from .neighbors import NeighborTable, radius_neighbors
from .subsampling import grid_cells, grid_subsample
from .convolution import KPConvLayer, kpconv_forward
