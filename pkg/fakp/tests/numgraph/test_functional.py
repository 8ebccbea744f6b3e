import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from numpy import testing as npt

from fakp.exceptions import (
    DegenerateBatchError,
    EmptyAxisError,
    IndexOutOfRangeError,
    ShapeMismatchError,
)
from fakp.numgraph import (
    BatchNormStats,
    Tensor,
    add_bias,
    batch_norm,
    gather_rows,
    gradient_check,
    leaky_relu,
    matmul,
    reduce,
    reshape,
    segment_mean,
    softmax_cross_entropy,
    stack,
)


def weighted_total(y, weights):
    out = y * Tensor(weights)
    while out.ndim:
        out = reduce(out, 0, "sum")
    return out


def param(rng, *shape):
    return Tensor(rng.uniform(-2.0, 2.0, size=shape), requires_grad=True)


class TestForward:
    def test_matmul_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))

    def test_add_bias(self):
        out = add_bias(Tensor(np.zeros((2, 3))), Tensor([1.0, 2.0, 3.0]))
        npt.assert_array_equal(out.data, [[1, 2, 3], [1, 2, 3]])

    def test_add_bias_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            add_bias(Tensor(np.zeros((2, 3))), Tensor([1.0, 2.0]))

    def test_reshape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            reshape(Tensor(np.zeros(6)), (4, 2))

    def test_stack(self):
        out = stack([Tensor([1.0, 2.0]), Tensor([3.0, 4.0])])
        npt.assert_array_equal(out.data, [[1, 2], [3, 4]])

    def test_stack_empty(self):
        with pytest.raises(EmptyAxisError):
            stack([])

    @pytest.mark.parametrize('kind,expected', [
        ('sum', [4.0, 6.0]), ('mean', [2.0, 3.0]), ('max', [3.0, 4.0]),
    ])
    def test_reduce(self, kind, expected):
        x = Tensor([[1.0, 2.0], [3.0, 4.0]])
        npt.assert_allclose(reduce(x, 0, kind).data, expected)

    def test_reduce_empty_axis(self):
        with pytest.raises(EmptyAxisError):
            reduce(Tensor(np.zeros((0, 3))), 0, "mean")

    def test_max_ties_send_gradient_to_first(self):
        x = Tensor([[1.0, 5.0, 5.0]], requires_grad=True)
        reduce(reduce(x, 1, "max"), 0, "sum").backward()
        npt.assert_array_equal(x.grad, [[0.0, 1.0, 0.0]])

    def test_leaky_relu_gradient_at_zero_is_slope(self):
        x = Tensor([0.0, 1.0, -1.0], requires_grad=True)
        reduce(leaky_relu(x, 0.1), 0, "sum").backward()
        npt.assert_allclose(x.grad, [0.1, 1.0, 0.1])

    def test_leaky_relu_bad_slope(self):
        with pytest.raises(ValueError):
            leaky_relu(Tensor([1.0]), 1.0)

    def test_gather_rows_out_of_range(self):
        with pytest.raises(IndexOutOfRangeError):
            gather_rows(Tensor(np.zeros((3, 2))), [0, 3])

    def test_gather_rows_scatters_back(self):
        x = Tensor(np.zeros((3, 1)), requires_grad=True)
        reduce(reduce(gather_rows(x, [2, 2, 0]), 0, "sum"), 0,
               "sum").backward()
        npt.assert_array_equal(x.grad, [[1.0], [0.0], [2.0]])

    def test_segment_mean(self):
        x = Tensor([[1.0], [3.0], [10.0]])
        out = segment_mean(x, [0, 0, 1], 2)
        npt.assert_array_equal(out.data, [[2.0], [10.0]])

    def test_softmax_cross_entropy_uniform(self):
        loss = softmax_cross_entropy(Tensor(np.zeros((2, 4))), [1, 3])
        assert loss.item() == pytest.approx(np.log(4.0))

    def test_softmax_cross_entropy_large_logits_are_stable(self):
        loss = softmax_cross_entropy(Tensor([[1000.0, 0.0]]), [0])
        assert np.isfinite(loss.item())
        assert loss.item() == pytest.approx(0.0, abs=1e-12)

    def test_softmax_cross_entropy_bad_label(self):
        with pytest.raises(IndexOutOfRangeError):
            softmax_cross_entropy(Tensor(np.zeros((1, 3))), [3])


class TestBatchNorm:
    def test_training_standardizes(self, rng):
        x = Tensor(rng.normal(3.0, 2.0, size=(50, 2)))
        stats = BatchNormStats.fresh(2)
        out = batch_norm(x, Tensor(np.ones(2)), Tensor(np.zeros(2)), 1e-5,
                         stats, training=True)
        npt.assert_allclose(out.data.mean(axis=0), 0.0, atol=1e-12)
        npt.assert_allclose(out.data.std(axis=0), 1.0, atol=1e-5)
        assert stats.batches_seen == 1

    def test_running_stats_use_unbiased_variance(self):
        x = Tensor([[0.0], [2.0]])
        stats = BatchNormStats.fresh(1, momentum=1.0)
        batch_norm(x, Tensor([1.0]), Tensor([0.0]), 1e-5, stats, True)
        npt.assert_allclose(stats.mean, [1.0])
        npt.assert_allclose(stats.var, [2.0])

    def test_eval_uses_running_stats(self):
        stats = BatchNormStats(mean=np.array([1.0]), var=np.array([4.0]))
        out = batch_norm(Tensor([[5.0]]), Tensor([1.0]), Tensor([0.0]), 0.0001,
                         stats, training=False)
        npt.assert_allclose(out.data, [[4.0 / np.sqrt(4.0001)]])
        assert stats.batches_seen == 0

    def test_single_row_in_training(self):
        with pytest.raises(DegenerateBatchError):
            batch_norm(Tensor([[1.0, 2.0]]), Tensor(np.ones(2)),
                       Tensor(np.zeros(2)), 1e-5, BatchNormStats.fresh(2),
                       training=True)


class TestGradients:
    def test_matmul(self, rng):
        w = rng.uniform(-1, 1, size=(3, 2))
        err = gradient_check(lambda a, b: weighted_total(matmul(a, b), w),
                             [param(rng, 3, 4), param(rng, 4, 2)])
        assert err < 1e-5

    def test_batch_norm_training(self, rng):
        w = rng.uniform(-1, 1, size=(6, 2))
        err = gradient_check(
            lambda x, g, b: weighted_total(
                batch_norm(x, g, b, 1e-5, BatchNormStats.fresh(2), True), w),
            [param(rng, 6, 2), param(rng, 2), param(rng, 2)])
        assert err < 1e-5

    def test_batch_norm_eval(self, rng):
        w = rng.uniform(-1, 1, size=(3, 2))
        stats = BatchNormStats(mean=np.array([0.5, -0.5]),
                               var=np.array([2.0, 0.5]))
        err = gradient_check(
            lambda x, g, b: weighted_total(
                batch_norm(x, g, b, 1e-5, stats, False), w),
            [param(rng, 3, 2), param(rng, 2), param(rng, 2)])
        assert err < 1e-5

    def test_segment_mean(self, rng):
        w = rng.uniform(-1, 1, size=(3, 2))
        err = gradient_check(
            lambda x: weighted_total(segment_mean(x, [2, 0, 0, 1, 2], 3), w),
            [param(rng, 5, 2)])
        assert err < 1e-5

    def test_softmax_cross_entropy(self, rng):
        err = gradient_check(lambda z: softmax_cross_entropy(z, [2, 0, 1]),
                             [param(rng, 3, 4)])
        assert err < 1e-5

    def test_stack_and_reshape(self, rng):
        w = rng.uniform(-1, 1, size=(3, 2))
        err = gradient_check(
            lambda a, b: weighted_total(
                reshape(stack([a, b]), (3, 2)), w),
            [param(rng, 3), param(rng, 3)])
        assert err < 1e-5

    @settings(max_examples=25, deadline=None)
    @given(x=arrays(np.float64, (4, 3),
                    elements=st.floats(-3.0, 3.0).filter(
                        lambda v: abs(v) > 1e-3)),
           slope=st.floats(0.0, 0.9))
    def test_leaky_relu_property(self, x, slope):
        w = np.arange(12.0).reshape(4, 3) / 12.0
        err = gradient_check(lambda t: weighted_total(leaky_relu(t, slope), w),
                             [Tensor(x, requires_grad=True)])
        assert err < 1e-5

    @pytest.mark.parametrize('kind', ["sum", "mean", "max"])
    @pytest.mark.parametrize('axis', [0, 1])
    def test_reduce(self, rng, kind, axis):
        w = rng.uniform(-1, 1, size=3 if axis == 0 else 4)
        err = gradient_check(lambda t: weighted_total(reduce(t, axis, kind), w),
                             [param(rng, 4, 3)])
        assert err < 1e-5

    def test_gather_rows(self, rng):
        w = rng.uniform(-1, 1, size=(5, 2))
        err = gradient_check(
            lambda x: weighted_total(gather_rows(x, [1, 1, 0, 3, 2]), w),
            [param(rng, 4, 2)])
        assert err < 1e-5
