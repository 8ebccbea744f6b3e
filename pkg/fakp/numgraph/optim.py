# This code is part of fakp and is licensed under the MIT license.
"""Stochastic gradient descent with momentum."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from fakp.exceptions import MissingGradError
from .tensor import Tensor, _frozen


@dataclass
class SGDState:
    """Velocity buffers, keyed by the position of the parameter."""
    velocities: dict[int, np.ndarray] = field(default_factory=dict)
    steps: int = 0


def sgd_step(params: Sequence[Tensor], lr: float, momentum: float,
             state: SGDState) -> None:
    """One momentum SGD update, ``v <- momentum * v + grad; p <- p - lr * v``.

    Gradients are zeroed afterwards. Parameters are rebound to fresh
    arrays, so tensors saved by earlier graphs keep their values.

    Raises
    ------
    MissingGradError
      if a parameter has no gradient.
    """
    if lr < 0:
        raise ValueError(f"learning rate must be non-negative, got {lr}")
    for i, p in enumerate(params):
        if p.grad is None:
            errmsg = (f"parameter {i} of shape {p.shape} has no gradient; "
                      "call backward() before sgd_step()")
            raise MissingGradError(errmsg)

    for i, p in enumerate(params):
        v = state.velocities.get(i)
        v = p.grad.copy() if v is None else momentum * v + p.grad
        state.velocities[i] = v
        p.data = _frozen(p.data - lr * v)
        p.zero_grad()
    state.steps += 1
