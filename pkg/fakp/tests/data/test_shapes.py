import numpy as np
import pytest
from numpy import testing as npt
try:
    from pydantic.v1 import ValidationError
except ImportError:
    from pydantic import ValidationError

from fakp.data import (
    SHAPE_KINDS,
    DatasetSpec,
    generate_shape,
    make_dataset,
    make_split,
    rotate_dataset,
    subset_per_class,
)
from fakp.exceptions import BadShapeKindError
from fakp.frames import covariance, relative_gap, sym_eig


@pytest.mark.parametrize('kind', SHAPE_KINDS)
def test_generic_clouds(kind):
    cloud = generate_shape(kind, 64, np.random.default_rng(11))
    assert cloud.n_points == 64
    npt.assert_array_equal(cloud.features.data, np.ones((64, 3)))
    gap = relative_gap(sym_eig(covariance(cloud.coords.data)).eigenvalues)
    assert gap >= 1e-3


@pytest.mark.parametrize('kind', SHAPE_KINDS)
def test_unit_sized(kind):
    X = generate_shape(kind, 200, np.random.default_rng(0),
                       noise_std=0.0).coords.data
    # unit shapes stretched by at most 1.4
    assert np.abs(X).max() <= 0.5 * 1.4 + 1e-12


def test_unknown_kind():
    with pytest.raises(BadShapeKindError, match="pyramid"):
        generate_shape("pyramid", 32, np.random.default_rng(0))


def test_too_few_points():
    with pytest.raises(ValueError):
        generate_shape("sphere", 8, np.random.default_rng(0))


class TestDatasetSpec:
    def test_defaults(self):
        spec = DatasetSpec()
        assert spec.classes == list(SHAPE_KINDS)
        assert spec.points_per_cloud == 256
        assert spec.train_count == spec.test_count == 50

    @pytest.mark.parametrize('changes', [
        {'classes': ['box', 'box']},
        {'classes': []},
        {'classes': ['pyramid']},
        {'anisotropy_range': (1.0, 1.01)},
        {'anisotropy_range': (0.0, 1.0)},
        {'points_per_cloud': 10},
        {'train_count': 0},
        {'noise_std': -1.0},
    ])
    def test_invalid(self, changes):
        with pytest.raises(ValidationError):
            DatasetSpec(**changes)


def test_split_layout(tiny_dataset_spec):
    samples = make_split(tiny_dataset_spec, "train")
    assert len(samples) == 12
    assert [s.label for s in samples[:6]] == list(range(6))
    assert samples[0].id == "train-sphere-0000"
    assert samples[7].id == "train-box-0001"
    assert {s.cloud.n_points for s in samples} == {32}


def test_dataset_is_seeded(tiny_dataset_spec):
    train_a, test_a = make_dataset(tiny_dataset_spec)
    train_b, _ = make_dataset(tiny_dataset_spec)
    for a, b in zip(train_a, train_b):
        npt.assert_array_equal(a.cloud.coords.data, b.cloud.coords.data)
    assert not np.array_equal(train_a[0].cloud.coords.data,
                              test_a[0].cloud.coords.data)


def test_larger_split_extends_smaller(tiny_dataset_spec):
    small = make_split(tiny_dataset_spec, "test")
    large = make_split(tiny_dataset_spec.copy(update={'test_count': 3}),
                       "test")
    for a, b in zip(small, large):
        assert a.id == b.id
        npt.assert_array_equal(a.cloud.coords.data, b.cloud.coords.data)


def test_subset_per_class(tiny_dataset_spec):
    samples = make_split(tiny_dataset_spec, "train")
    subset = subset_per_class(samples, 1)
    assert [s.id for s in subset] == [s.id for s in samples[:6]]
    assert subset_per_class(samples, 5) == samples


def test_rotate_dataset(tiny_dataset_spec):
    samples = make_split(tiny_dataset_spec, "test")
    rotated = rotate_dataset(samples, seed=1)
    again = rotate_dataset(samples, seed=1)
    for s, r, a in zip(samples, rotated, again):
        assert (r.label, r.id) == (s.label, s.id)
        npt.assert_allclose(np.linalg.norm(r.cloud.coords.data, axis=1),
                            np.linalg.norm(s.cloud.coords.data, axis=1))
        npt.assert_allclose(np.linalg.norm(r.cloud.features.data, axis=1),
                            np.sqrt(3.0))
        npt.assert_array_equal(r.cloud.coords.data, a.cloud.coords.data)


def test_rotate_dataset_keeps_features(tiny_dataset_spec):
    samples = make_split(tiny_dataset_spec, "test")[:2]
    rotated = rotate_dataset(samples, seed=1, transform_features=False)
    npt.assert_array_equal(rotated[0].cloud.features.data, np.ones((32, 3)))
