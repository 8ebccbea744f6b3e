# This code is part of fakp and is licensed under the MIT license.
"""Dense float64 tensors with tape-style reverse-mode differentiation.

A :class:`Tensor` wraps a read-only ``numpy`` array. Operations are
implemented as :class:`Function` subclasses; applying one to tensors that
require gradients records a :class:`Node` holding the parent references.
Nodes receive a global, strictly increasing index when they are created, so
parents always precede their children and the graph is acyclic by
construction. :func:`backward` collects the nodes reachable from a scalar
loss into a :class:`ComputeGraph` and walks them in reverse insertion order.
"""
from __future__ import annotations

import itertools
import logging
from typing import Any, Iterator, Optional, Sequence, Union

import numpy as np
import numpy.typing as npt

from fakp.exceptions import GraphConsumedError, NotScalarError

logger = logging.getLogger(__name__)

ArrayLike = Union[npt.ArrayLike, "Tensor"]

_node_counter = itertools.count()


def _frozen(data: npt.ArrayLike) -> np.ndarray:
    arr = np.array(data, dtype=np.float64)
    arr.setflags(write=False)
    return arr


class Tensor:
    """A dense multidimensional array of 64-bit floats.

    Parameters
    ----------
    data : array_like
      values, copied into a read-only float64 array.
    requires_grad : bool
      whether gradients should be accumulated into :attr:`grad`.
    """
    __array_priority__ = 1000

    def __init__(self, data: ArrayLike, requires_grad: bool = False, *,
                 _node: Optional[Node] = None):
        if isinstance(data, Tensor):
            data = data.data
        self.data: np.ndarray = _frozen(data)
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None
        self.node = _node

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def is_leaf(self) -> bool:
        return self.node is None

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.size != 1:
            raise NotScalarError(
                f"item() needs a single element, tensor has shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def detach(self) -> Tensor:
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        backward(self)

    def __repr__(self):
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{flag})"

    def __len__(self):
        return self.shape[0]

    # operator sugar, all routed through fakp.numgraph.functional
    def __add__(self, other):
        from . import functional as fn
        return fn.add(self, _as_tensor(other))

    __radd__ = __add__

    def __sub__(self, other):
        from . import functional as fn
        return fn.sub(self, _as_tensor(other))

    def __rsub__(self, other):
        from . import functional as fn
        return fn.sub(_as_tensor(other), self)

    def __mul__(self, other):
        from . import functional as fn
        if np.isscalar(other):
            return fn.scale(self, float(other))
        return fn.mul(self, _as_tensor(other))

    __rmul__ = __mul__

    def __neg__(self):
        from . import functional as fn
        return fn.scale(self, -1.0)

    def __matmul__(self, other):
        from . import functional as fn
        return fn.matmul(self, _as_tensor(other))


def _as_tensor(value: ArrayLike) -> Tensor:
    # no broadcasting: the elementwise ops reject operands of another shape
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=np.float64))


class Node:
    """One recorded operation: the function instance and its parents."""
    __slots__ = ("index", "function", "parents", "output", "consumed")

    def __init__(self, function: Function, parents: Sequence[Tensor]):
        self.index = next(_node_counter)
        self.function = function
        self.parents = tuple(parents)
        self.output: Optional[Tensor] = None
        self.consumed = False


class Function:
    """Base class of differentiable operations.

    Subclasses implement :meth:`forward` on raw arrays and :meth:`backward`,
    which maps the gradient of the output to one gradient per input
    (``None`` for inputs that need none). Anything needed by the backward
    pass is stored on ``self`` during :meth:`forward`.
    """

    def __init__(self, *tensors: Tensor):
        self.tensors = tensors

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError()

    def backward(self, grad: np.ndarray) -> tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError()

    @classmethod
    def apply(cls, *tensors: Tensor, **kwargs: Any) -> Tensor:
        func = cls(*tensors)
        out_data = func.forward(*(t.data for t in tensors), **kwargs)
        requires_grad = any(t.requires_grad for t in tensors)
        if not requires_grad:
            return Tensor(out_data)
        node = Node(func, tensors)
        out = Tensor(out_data, requires_grad=True, _node=node)
        node.output = out
        return out


class ComputeGraph:
    """The nodes reachable from one output, in insertion order."""

    def __init__(self, nodes: list[Node]):
        self.nodes = nodes

    @classmethod
    def from_output(cls, output: Tensor) -> ComputeGraph:
        seen: set[int] = set()
        nodes: list[Node] = []
        stack = [output.node] if output.node is not None else []
        while stack:
            node = stack.pop()
            if node.index in seen:
                continue
            seen.add(node.index)
            nodes.append(node)
            for parent in node.parents:
                if parent.node is not None and parent.node.index not in seen:
                    stack.append(parent.node)
        nodes.sort(key=lambda n: n.index)
        return cls(nodes)

    def __len__(self):
        return len(self.nodes)

    def __iter__(self) -> Iterator[Node]:
        return iter(self.nodes)

    def reversed(self) -> Iterator[Node]:
        return reversed(self.nodes)


def _accumulate(tensor: Tensor, grad: np.ndarray) -> None:
    if tensor.grad is None:
        tensor.grad = np.array(grad, dtype=np.float64).reshape(tensor.shape)
    else:
        tensor.grad = tensor.grad + grad.reshape(tensor.shape)


def backward(loss: Tensor) -> None:
    """Populate ``grad`` of every tensor the scalar ``loss`` depends on.

    The seed gradient is 1. A recorded graph can be traversed once; a
    second call raises :class:`GraphConsumedError`.

    Raises
    ------
    NotScalarError
      if ``loss`` has more than one element.
    GraphConsumedError
      if the graph behind ``loss`` was already back-propagated.
    """
    if loss.size != 1:
        raise NotScalarError(
            f"backward() needs a scalar loss, got shape {loss.shape}")
    if loss.node is None:
        if loss.requires_grad:
            _accumulate(loss, np.ones(loss.shape))
        return

    graph = ComputeGraph.from_output(loss)
    if any(node.consumed for node in graph):
        raise GraphConsumedError(
            "this graph was already back-propagated; run the forward pass "
            "again to record a new one")

    _accumulate(loss, np.ones(loss.shape))
    for node in graph.reversed():
        node.consumed = True
        out = node.output
        if out.grad is None:
            continue
        parent_grads = node.function.backward(out.grad)
        for parent, pgrad in zip(node.parents, parent_grads):
            if pgrad is None or not parent.requires_grad:
                continue
            _accumulate(parent, pgrad)
        # saved forward state is no longer needed
        node.function.tensors = ()
    logger.debug("back-propagated through %d nodes", len(graph))
