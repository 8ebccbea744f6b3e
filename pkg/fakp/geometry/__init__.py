# This code is part of fakp and is licensed under the MIT license.
"""Point clouds and the Euclidean groups acting on them."""

from .groups import GroupComponent, GroupSpec, frame_cardinality
from .transforms import (
    EuclideanTransform,
    apply,
    inverse,
    compose,
    act_on_features,
    random_transform,
    as_array,
)
from .pointcloud import PointCloud
