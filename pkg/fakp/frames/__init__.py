# This code is part of fakp and is licensed under the MIT license.
"""Frames of the Euclidean groups built from centroid and covariance."""

from fakp.geometry.groups import frame_cardinality
from .eigen import EigenDecomposition, sym_eig, canonicalize_signs
from .frame_construction import (
    DEFAULT_DEGENERACY_TOL,
    Frame,
    build_frame,
    centroid,
    covariance,
    relative_gap,
)
