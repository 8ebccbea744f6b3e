import numpy as np
import pytest
from numpy import testing as npt

from fakp.exceptions import NotAGroupError
from fakp.fa import (
    WrappedFunction,
    group_average,
    point_reflection_group,
    signed_permutation_group,
    trivial_group,
    validate_finite_group,
)
from fakp.geometry import EuclideanTransform, GroupSpec, act_on_features, apply
from fakp.numgraph import Tensor, leaky_relu, matmul, reduce


@pytest.fixture
def pooled(rng):
    A = Tensor(rng.standard_normal((3, 4)))
    return lambda X, F: reduce(leaky_relu(matmul(X, A), 0.2), 0, "mean")


@pytest.mark.parametrize('proper,size', [(True, 24), (False, 48)])
def test_cube_groups(proper, size):
    elements = signed_permutation_group(3, proper=proper)
    assert len(elements) == size
    validate_finite_group(elements)


@pytest.mark.parametrize('elements', [trivial_group(), point_reflection_group(),
                                      signed_permutation_group(2, False)])
def test_small_groups(elements):
    validate_finite_group(elements)


def test_empty_set():
    with pytest.raises(NotAGroupError):
        validate_finite_group([])


def test_not_closed():
    quarter = EuclideanTransform([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0],
                                  [0.0, 0.0, 1.0]])
    with pytest.raises(NotAGroupError, match="no inverse"):
        validate_finite_group([EuclideanTransform.identity(3), quarter])


def test_translation_is_not_finite():
    shift = EuclideanTransform.pure_translation([1.0, 0.0, 0.0])
    with pytest.raises(NotAGroupError):
        validate_finite_group([EuclideanTransform.identity(3), shift])


def test_group_average_is_invariant(pooled, generic_points):
    cube = signed_permutation_group(3)
    F = np.ones((len(generic_points), 3))
    before = group_average(pooled, cube, generic_points, F, "invariant").data
    for g in cube[::5]:
        after = group_average(pooled, cube, apply(g, generic_points),
                              act_on_features(g, F, 3), "invariant").data
        npt.assert_allclose(after, before, atol=1e-12)


def test_frame_average_is_cube_invariant(pooled, generic_points):
    wrapped = WrappedFunction(pooled, GroupSpec.ROTATIONS, "invariant")
    F = np.ones((len(generic_points), 3))
    before = group_average(wrapped, signed_permutation_group(3),
                           generic_points, F, "invariant").data
    npt.assert_allclose(before, wrapped(generic_points, F).data, atol=1e-9)


def test_rejects_non_group(pooled, generic_points):
    with pytest.raises(NotAGroupError):
        group_average(pooled, [EuclideanTransform(-np.eye(3))],
                      generic_points, np.ones((40, 3)), "invariant")


def test_point_reflection_cancels_identity(generic_points):
    out = group_average(lambda X, F: X, point_reflection_group(3),
                        generic_points, np.ones_like(generic_points),
                        "invariant")
    assert out.shape == generic_points.shape
    npt.assert_allclose(out.data, 0.0, atol=1e-15)


def test_trivial_group_keeps_inner(pooled, generic_points):
    F = np.ones_like(generic_points)
    for inner, mode in [(pooled, "invariant"),
                        (lambda X, F: X + F, "equivariant")]:
        expected = inner(Tensor(generic_points), Tensor(F))
        out = group_average(inner, trivial_group(3), generic_points, F, mode)
        npt.assert_allclose(out.data, expected.data, rtol=0, atol=1e-14)
