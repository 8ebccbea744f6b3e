# This code is part of fakp and is licensed under the MIT license.
"""Rigid kernel point dispositions and their linear influence."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from fakp.exceptions import BadKError

logger = logging.getLogger(__name__)

DispositionMethod = Literal["repulsion", "shell"]

REPULSION_ITERATIONS = 1000
REPULSION_STEP = 0.01
SHELL_RADIUS_RATIO = 0.66


@dataclass(frozen=True)
class KernelDisposition:
    """K fixed kernel points inside the ball of radius ``radius``."""
    points: np.ndarray
    radius: float
    method: str = "repulsion"

    @property
    def K(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


def _uniform_ball(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    directions = rng.standard_normal((count, d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.random(count) ** (1.0 / d)
    return directions * radii[:, None]


def _repulsion(K: int, d: int, seed: int) -> np.ndarray:
    """Points in the unit ball; the first one is pinned at the origin."""
    rng = np.random.default_rng(seed)
    points = np.vstack([np.zeros((1, d)), _uniform_ball(rng, K - 1, d)])
    for _ in range(REPULSION_ITERATIONS):
        diff = points[:, None, :] - points[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        np.fill_diagonal(dist, np.inf)
        dist = np.maximum(dist, 1e-12)
        # -grad of sum 1/|xi - xj| + sum |xi|^2
        force = (diff / dist[..., None] ** 3).sum(axis=1) - 2.0 * points
        norms = np.linalg.norm(force, axis=1, keepdims=True)
        step = REPULSION_STEP * force / np.maximum(norms, 1e-12)
        step[0] = 0.0
        points = points + step
        lengths = np.linalg.norm(points, axis=1, keepdims=True)
        points = np.where(lengths > 1.0, points / np.maximum(lengths, 1e-12),
                          points)
    return points


def _icosahedron() -> np.ndarray:
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    vertices = []
    for a in (1.0, -1.0):
        for b in (phi, -phi):
            vertices += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
    vertices = np.array(vertices)
    return vertices / np.linalg.norm(vertices, axis=1, keepdims=True)


def _fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    rho = np.sqrt(1.0 - z * z)
    theta = np.pi * (1.0 + np.sqrt(5.0)) * i
    return np.stack([rho * np.cos(theta), rho * np.sin(theta), z], axis=1)


def _shell(K: int, d: int) -> np.ndarray:
    count = K - 1
    if d == 3 and count == 12:
        outer = _icosahedron()
    elif d == 3:
        outer = _fibonacci_sphere(count)
    else:
        angles = 2.0 * np.pi * np.arange(count) / count
        outer = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return np.vstack([np.zeros((1, d)), SHELL_RADIUS_RATIO * outer])


def dispose_kernel_points(K: int, r: float, method: DispositionMethod = "repulsion",
                          seed: int = 0, d: int = 3) -> KernelDisposition:
    """Place ``K`` kernel points in the ball of radius ``r``.

    Both methods keep one point at the origin. ``repulsion`` relaxes the
    remaining points under an inverse-distance repulsion plus a quadratic
    pull towards the origin with a projected, normalized gradient descent;
    ``shell`` puts them at ``0.66 r`` on an icosahedron (d=3, K=13), a
    Fibonacci sphere (other K in 3D) or a regular polygon (2D).

    Raises
    ------
    BadKError
      if ``K < 1``.
    """
    if int(K) != K or K < 1:
        raise BadKError(f"the number of kernel points must be >= 1, got {K}")
    if r <= 0:
        raise ValueError(f"kernel radius must be positive, got {r}")
    if d not in (2, 3):
        raise ValueError(f"only d=2 and d=3 are supported, got d={d}")
    K = int(K)

    if K == 1:
        unit = np.zeros((1, d))
    elif method == "repulsion":
        unit = _repulsion(K, d, seed)
    elif method == "shell":
        unit = _shell(K, d)
    else:
        raise ValueError(f"unknown kernel disposition method '{method}'")

    points = unit * r
    points.setflags(write=False)
    logger.debug("disposed %d kernel points in R^%d (%s, r=%g)", K, d,
                 method, r)
    return KernelDisposition(points=points, radius=float(r), method=method)


def correlation(y, xk, sigma: float) -> float:
    """Linear influence ``max(0, 1 - |y - xk| / sigma)``."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    dist = float(np.linalg.norm(np.asarray(y, dtype=np.float64)
                                - np.asarray(xk, dtype=np.float64)))
    return max(0.0, 1.0 - dist / sigma)


def kernel_point_influences(relative: np.ndarray, kernel_points: np.ndarray,
                            sigma: float) -> np.ndarray:
    """Influence of every kernel point on every relative position.

    ``relative`` has shape [..., d]; the result has shape [..., K].
    """
    diff = relative[..., None, :] - kernel_points
    dist = np.linalg.norm(diff, axis=-1)
    return np.maximum(0.0, 1.0 - dist / sigma)
