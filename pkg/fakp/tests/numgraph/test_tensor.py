import numpy as np
import pytest
from numpy import testing as npt

from fakp.exceptions import (
    GraphConsumedError,
    NotScalarError,
    ShapeMismatchError,
)
from fakp.numgraph import ComputeGraph, Tensor, backward, matmul, reduce


class TestTensor:
    def test_data_is_read_only_float64(self):
        t = Tensor([[1, 2], [3, 4]])
        assert t.data.dtype == np.float64
        assert t.shape == (2, 2)
        with pytest.raises(ValueError):
            t.data[0, 0] = 5.0

    def test_copy_on_construction(self):
        arr = np.array([1.0, 2.0])
        t = Tensor(arr)
        arr[0] = 10.0
        assert t.data[0] == 1.0

    def test_item(self):
        assert Tensor([[3.5]]).item() == 3.5

    def test_item_not_scalar(self):
        with pytest.raises(NotScalarError):
            Tensor([1.0, 2.0]).item()

    def test_detach_drops_history(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        y = (x * 2.0).detach()
        assert y.is_leaf
        assert not y.requires_grad

    def test_operators(self):
        a = Tensor([1.0, 2.0])
        b = Tensor([3.0, 5.0])
        npt.assert_array_equal((a + b).data, [4.0, 7.0])
        npt.assert_array_equal((b - a).data, [2.0, 3.0])
        npt.assert_array_equal((a * b).data, [3.0, 10.0])
        npt.assert_array_equal((-a).data, [-1.0, -2.0])
        npt.assert_array_equal(([1.0, 1.0] - a).data, [0.0, -1.0])
        npt.assert_array_equal((2.0 * a).data, [2.0, 4.0])

    @pytest.mark.parametrize("other", [1.0, [1.0, 2.0, 3.0], [[1.0, 2.0]]])
    def test_operators_do_not_broadcast(self, other):
        a = Tensor([1.0, 2.0])
        with pytest.raises(ShapeMismatchError):
            a + other
        with pytest.raises(ShapeMismatchError):
            other - a
        with pytest.raises(ShapeMismatchError):
            a * Tensor(other)


class TestBackward:
    def test_shared_parent_accumulates(self):
        x = Tensor([2.0], requires_grad=True)
        y = x * x + x
        backward(reduce(y, 0, "sum"))
        npt.assert_allclose(x.grad, [5.0])

    def test_no_grad_for_constants(self):
        w = Tensor([[1.0, 2.0]], requires_grad=True)
        c = Tensor([[3.0], [4.0]])
        reduce(reduce(matmul(w, c), 0, "sum"), 0, "sum").backward()
        npt.assert_allclose(w.grad, [[3.0, 4.0]])
        assert c.grad is None

    def test_requires_scalar(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        with pytest.raises(NotScalarError):
            backward(x * 2.0)

    def test_second_backward_raises(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        loss = reduce(x * 3.0, 0, "sum")
        loss.backward()
        with pytest.raises(GraphConsumedError):
            loss.backward()

    def test_graph_in_topological_order(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        loss = reduce((x * 2.0) * x, 0, "sum")
        graph = ComputeGraph.from_output(loss)
        indices = [node.index for node in graph]
        assert indices == sorted(indices)
        assert len(graph) == 3

    def test_leaf_loss(self):
        x = Tensor([4.0], requires_grad=True)
        backward(x)
        npt.assert_array_equal(x.grad, [1.0])
