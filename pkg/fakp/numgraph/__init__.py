# This code is part of fakp and is licensed under the MIT license.
"""Dense float64 arrays with reverse-mode gradients."""

from .tensor import Tensor, Function, Node, ComputeGraph, backward
from .functional import (
    add,
    sub,
    mul,
    scale,
    add_bias,
    matmul,
    reshape,
    stack,
    leaky_relu,
    reduce,
    gather_rows,
    segment_mean,
    softmax_cross_entropy,
    batch_norm,
    BatchNormStats,
    gradient_check,
)
from .optim import SGDState, sgd_step
