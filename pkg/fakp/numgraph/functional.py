# This code is part of fakp and is licensed under the MIT license.
"""Differentiable operations on :class:`~fakp.numgraph.tensor.Tensor`.

Only the per-row / per-channel patterns the point networks need are
supported; there is no general broadcasting; reshape explicitly instead.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from fakp.exceptions import (
    DegenerateBatchError,
    EmptyAxisError,
    IndexOutOfRangeError,
    ShapeMismatchError,
)
from .tensor import Function, Tensor

ReduceKind = Literal["sum", "mean", "max"]


def _check_same_shape(a: Tensor, b: Tensor, opname: str) -> None:
    if a.shape != b.shape:
        errmsg = f"{opname}: shapes {a.shape} and {b.shape} differ"
        raise ShapeMismatchError(errmsg)


class _Add(Function):
    def forward(self, a, b):
        return a + b

    def backward(self, grad):
        return grad, grad


class _Sub(Function):
    def forward(self, a, b):
        return a - b

    def backward(self, grad):
        return grad, -grad


class _Mul(Function):
    def forward(self, a, b):
        self.a, self.b = a, b
        return a * b

    def backward(self, grad):
        return grad * self.b, grad * self.a


class _Scale(Function):
    def forward(self, x, factor):
        self.factor = factor
        return x * factor

    def backward(self, grad):
        return (grad * self.factor,)


class _AddBias(Function):
    def forward(self, x, bias):
        return x + bias

    def backward(self, grad):
        return grad, grad.sum(axis=0)


class _MatMul(Function):
    def forward(self, a, b):
        self.a, self.b = a, b
        return a @ b

    def backward(self, grad):
        return grad @ self.b.T, self.a.T @ grad


class _Reshape(Function):
    def forward(self, x, shape):
        self.in_shape = x.shape
        return x.reshape(shape)

    def backward(self, grad):
        return (grad.reshape(self.in_shape),)


class _Stack(Function):
    def forward(self, *arrays):
        return np.stack(arrays, axis=0)

    def backward(self, grad):
        return tuple(grad[i] for i in range(grad.shape[0]))


class _LeakyReLU(Function):
    def forward(self, x, slope):
        self.local = np.where(x > 0, 1.0, slope)
        return np.where(x > 0, x, slope * x)

    def backward(self, grad):
        return (grad * self.local,)


class _Reduce(Function):
    def forward(self, x, axis, kind):
        self.in_shape = x.shape
        self.axis = axis
        self.kind = kind
        if kind == "sum":
            return x.sum(axis=axis)
        if kind == "mean":
            return x.mean(axis=axis)
        # first argmax takes the gradient
        self.argmax = np.argmax(x, axis=axis)
        return x.max(axis=axis)

    def backward(self, grad):
        expanded = np.expand_dims(grad, self.axis)
        if self.kind == "sum":
            return (np.broadcast_to(expanded, self.in_shape).copy(),)
        if self.kind == "mean":
            n = self.in_shape[self.axis]
            return (np.broadcast_to(expanded / n, self.in_shape).copy(),)
        out = np.zeros(self.in_shape)
        idx = np.expand_dims(self.argmax, self.axis)
        np.put_along_axis(out, idx, expanded, axis=self.axis)
        return (out,)


class _GatherRows(Function):
    def forward(self, x, idx):
        self.n = x.shape[0]
        self.idx = idx
        return x[idx]

    def backward(self, grad):
        out = np.zeros((self.n,) + grad.shape[1:])
        np.add.at(out, self.idx, grad)
        return (out,)


class _SegmentMean(Function):
    def forward(self, x, segments, num_segments):
        counts = np.bincount(segments, minlength=num_segments).astype(np.float64)
        self.segments = segments
        self.counts = counts
        out = np.zeros((num_segments,) + x.shape[1:])
        np.add.at(out, segments, x)
        return out / np.maximum(counts, 1.0).reshape((-1,) + (1,) * (x.ndim - 1))

    def backward(self, grad):
        scaled = grad / np.maximum(self.counts, 1.0).reshape(
            (-1,) + (1,) * (grad.ndim - 1))
        return (scaled[self.segments],)


class _SoftmaxCrossEntropy(Function):
    def forward(self, logits, labels):
        b = logits.shape[0]
        shifted = logits - logits.max(axis=1, keepdims=True)
        exp = np.exp(shifted)
        sumexp = exp.sum(axis=1, keepdims=True)
        log_probs = shifted - np.log(sumexp)
        self.probs = exp / sumexp
        self.labels = labels
        return np.array(-log_probs[np.arange(b), labels].mean())

    def backward(self, grad):
        b = self.probs.shape[0]
        dlogits = self.probs.copy()
        dlogits[np.arange(b), self.labels] -= 1.0
        return (grad * dlogits / b,)


class _BatchNorm(Function):
    def forward(self, x, gamma, beta, mean, var, eps, use_batch):
        self.use_batch = use_batch
        inv_std = 1.0 / np.sqrt(var + eps)
        xhat = (x - mean) * inv_std
        self.xhat, self.inv_std, self.gamma = xhat, inv_std, gamma
        return xhat * gamma + beta

    def backward(self, grad):
        dgamma = (grad * self.xhat).sum(axis=0)
        dbeta = grad.sum(axis=0)
        dxhat = grad * self.gamma
        if not self.use_batch:
            return dxhat * self.inv_std, dgamma, dbeta
        n = grad.shape[0]
        dx = (self.inv_std / n) * (
            n * dxhat
            - dxhat.sum(axis=0)
            - self.xhat * (dxhat * self.xhat).sum(axis=0)
        )
        return dx, dgamma, dbeta


def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise sum of two tensors of identical shape."""
    _check_same_shape(a, b, "add")
    return _Add.apply(a, b)


def sub(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "sub")
    return _Sub.apply(a, b)


def mul(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "mul")
    return _Mul.apply(a, b)


def scale(x: Tensor, factor: float) -> Tensor:
    return _Scale.apply(x, factor=float(factor))


def add_bias(x: Tensor, bias: Tensor) -> Tensor:
    """Add a per-channel vector ``bias`` [c] to every row of ``x`` [n x c]."""
    if x.ndim != 2 or bias.shape != (x.shape[1],):
        errmsg = f"add_bias: cannot add bias {bias.shape} to rows of {x.shape}"
        raise ShapeMismatchError(errmsg)
    return _AddBias.apply(x, bias)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product of ``a`` [m x k] and ``b`` [k x p].

    Raises
    ------
    ShapeMismatchError
      if the operands are not matrices or the inner dimensions differ.
    """
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        errmsg = f"matmul: cannot multiply {a.shape} by {b.shape}"
        raise ShapeMismatchError(errmsg)
    return _MatMul.apply(a, b)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    shape = tuple(int(s) for s in shape)
    if int(np.prod(shape)) != x.size:
        errmsg = f"reshape: cannot view {x.shape} as {shape}"
        raise ShapeMismatchError(errmsg)
    return _Reshape.apply(x, shape=shape)


def stack(tensors: Sequence[Tensor]) -> Tensor:
    """Stack equally shaped tensors along a new leading axis."""
    if not tensors:
        raise EmptyAxisError("stack needs at least one tensor")
    for t in tensors[1:]:
        _check_same_shape(tensors[0], t, "stack")
    return _Stack.apply(*tensors)


def leaky_relu(x: Tensor, slope: float) -> Tensor:
    """Elementwise ``max(x, slope * x)``.

    The gradient is 1 for ``x > 0`` and ``slope`` otherwise, including at
    exactly zero.
    """
    if not 0.0 <= slope < 1.0:
        raise ValueError(f"leaky_relu slope must lie in [0, 1), got {slope}")
    return _LeakyReLU.apply(x, slope=float(slope))


def reduce(x: Tensor, axis: int, kind: ReduceKind) -> Tensor:
    """Sum, mean or max along ``axis``.

    ``max`` sends the gradient to the first (lowest index) maximizer.

    Raises
    ------
    EmptyAxisError
      if the reduced axis has length zero.
    """
    if kind not in ("sum", "mean", "max"):
        raise ValueError(f"unknown reduction kind '{kind}'")
    if not -x.ndim <= axis < x.ndim:
        errmsg = f"reduce: axis {axis} out of range for rank {x.ndim}"
        raise ShapeMismatchError(errmsg)
    axis = axis % x.ndim
    if x.shape[axis] == 0:
        raise EmptyAxisError(f"cannot {kind}-reduce an empty axis {axis}")
    return _Reduce.apply(x, axis=axis, kind=kind)


def gather_rows(x: Tensor, idx: Sequence[int]) -> Tensor:
    """Select rows of ``x``; the backward pass scatter-adds into them."""
    idx = np.asarray(idx, dtype=np.int64).reshape(-1)
    n = x.shape[0]
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        errmsg = f"gather_rows: indices must lie in [0, {n})"
        raise IndexOutOfRangeError(errmsg)
    return _GatherRows.apply(x, idx=idx)


def segment_mean(x: Tensor, segments: Sequence[int], num_segments: int) -> Tensor:
    """Average the rows of ``x`` sharing a segment id."""
    segments = np.asarray(segments, dtype=np.int64).reshape(-1)
    if segments.shape[0] != x.shape[0]:
        errmsg = (f"segment_mean: {segments.shape[0]} segment ids for "
                  f"{x.shape[0]} rows")
        raise ShapeMismatchError(errmsg)
    if segments.size and (segments.min() < 0 or segments.max() >= num_segments):
        raise IndexOutOfRangeError(
            f"segment ids must lie in [0, {num_segments})")
    return _SegmentMean.apply(x, segments=segments,
                              num_segments=int(num_segments))


def softmax_cross_entropy(logits: Tensor, labels: Sequence[int]) -> Tensor:
    """Mean negative log-likelihood of ``labels`` under ``softmax(logits)``.

    Uses a max-shifted log-sum-exp; the gradient is
    ``(softmax - onehot) / b``.
    """
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if logits.ndim != 2 or labels.shape[0] != logits.shape[0]:
        errmsg = (f"softmax_cross_entropy: {labels.shape[0]} labels for "
                  f"logits of shape {logits.shape}")
        raise ShapeMismatchError(errmsg)
    n_classes = logits.shape[1]
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        errmsg = f"labels must lie in [0, {n_classes})"
        raise IndexOutOfRangeError(errmsg)
    return _SoftmaxCrossEntropy.apply(logits, labels=labels)


@dataclass
class BatchNormStats:
    """Running statistics of a batch-normalization layer."""
    mean: np.ndarray
    var: np.ndarray
    momentum: float = 0.1
    batches_seen: int = 0

    @classmethod
    def fresh(cls, channels: int, momentum: float = 0.1) -> BatchNormStats:
        return cls(mean=np.zeros(channels), var=np.ones(channels),
                   momentum=momentum)

    def update(self, batch_mean: np.ndarray, unbiased_var: np.ndarray) -> None:
        m = self.momentum
        self.mean = (1.0 - m) * self.mean + m * batch_mean
        self.var = (1.0 - m) * self.var + m * unbiased_var
        self.batches_seen += 1


def batch_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float,
               running_stats: BatchNormStats, training: bool) -> Tensor:
    """Per-channel standardization of ``x`` [n x c].

    In training mode the biased batch statistics normalize the input and
    ``running_stats`` is updated (with the unbiased variance); otherwise the
    running statistics are used.

    Raises
    ------
    DegenerateBatchError
      if ``n == 1`` in training mode.
    """
    if x.ndim != 2 or gamma.shape != (x.shape[1],) or beta.shape != gamma.shape:
        errmsg = (f"batch_norm: input {x.shape} incompatible with gamma "
                  f"{gamma.shape} / beta {beta.shape}")
        raise ShapeMismatchError(errmsg)
    if eps <= 0:
        raise ValueError(f"batch_norm eps must be positive, got {eps}")
    n = x.shape[0]
    if n == 0:
        raise EmptyAxisError("batch_norm on an empty batch")
    if training:
        if n == 1:
            errmsg = ("batch_norm in training mode needs more than one row; "
                      "use eval mode or larger inputs")
            raise DegenerateBatchError(errmsg)
        mean = x.data.mean(axis=0)
        var = x.data.var(axis=0)
        running_stats.update(mean, var * n / (n - 1))
    else:
        mean, var = running_stats.mean, running_stats.var
    return _BatchNorm.apply(x, gamma, beta, mean=mean, var=var, eps=float(eps),
                            use_batch=bool(training))


def gradient_check(fn, inputs: Sequence[Tensor], step: float = 1e-6) -> float:
    """Max relative error of analytic vs central-difference gradients.

    ``fn`` maps the ``inputs`` to a scalar tensor. Every element of every
    input is perturbed in turn.

    Returns
    -------
    float
      the largest relative error ``|a - n| / max(1, |a|, |n|)``.
    """
    for t in inputs:
        t.zero_grad()
    out = fn(*inputs)
    out.backward()
    analytic = [np.zeros(t.shape) if t.grad is None else t.grad.copy()
                for t in inputs]

    worst = 0.0
    for i, t in enumerate(inputs):
        base = t.data.copy()
        for j in range(base.size):
            plus = base.copy().reshape(-1)
            minus = base.copy().reshape(-1)
            plus[j] += step
            minus[j] -= step
            args_p = [Tensor(plus.reshape(base.shape)) if k == i else inputs[k]
                      for k in range(len(inputs))]
            args_m = [Tensor(minus.reshape(base.shape)) if k == i else inputs[k]
                      for k in range(len(inputs))]
            numeric = (fn(*args_p).item() - fn(*args_m).item()) / (2 * step)
            a = analytic[i].reshape(-1)[j]
            err = abs(a - numeric) / max(1.0, abs(a), abs(numeric))
            worst = max(worst, err)
    return worst
