import numpy as np
import pytest
from numpy import testing as npt

from fakp.exceptions import EmptyCloudError, ShapeMismatchError
from fakp.geometry import EuclideanTransform, PointCloud


def test_default_features_are_ones():
    cloud = PointCloud.from_arrays(np.zeros((4, 3)))
    npt.assert_array_equal(cloud.features.data, np.ones((4, 3)))
    assert cloud.channels == 3
    assert len(cloud) == 4


def test_empty_cloud():
    with pytest.raises(EmptyCloudError):
        PointCloud.from_arrays(np.zeros((0, 3)))


def test_unsupported_dimension():
    with pytest.raises(ShapeMismatchError):
        PointCloud.from_arrays(np.zeros((3, 4)))


def test_feature_rows_must_match():
    with pytest.raises(ShapeMismatchError):
        PointCloud.from_arrays(np.zeros((3, 3)), np.ones((2, 3)))


def test_transformed_features():
    R = np.diag([-1.0, 1.0, 1.0])
    g = EuclideanTransform(R, [1.0, 0.0, 0.0])
    cloud = PointCloud.from_arrays([[2.0, 0.0, 0.0]], [[1.0, 1.0, 1.0]])
    moved = cloud.transformed(g)
    npt.assert_allclose(moved.coords.data, [[-1.0, 0.0, 0.0]])
    npt.assert_allclose(moved.features.data, [[0.0, 1.0, 1.0]])
    kept = cloud.transformed(g, transform_features=False)
    npt.assert_array_equal(kept.features.data, [[1.0, 1.0, 1.0]])
