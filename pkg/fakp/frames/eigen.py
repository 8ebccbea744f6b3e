# This code is part of fakp and is licensed under the MIT license.
"""Cyclic Jacobi eigensolver for small symmetric matrices."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from fakp.exceptions import NotSymmetricError, ShapeMismatchError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class EigenDecomposition:
    """``C = Q diag(eigenvalues) Q^T``.

    Attributes
    ----------
    eigenvalues : np.ndarray
      sorted in descending order.
    eigenvectors : np.ndarray
      unit columns, column ``i`` paired with ``eigenvalues[i]``; each column
      has its largest-magnitude entry positive.
    sweeps : int
      number of Jacobi sweeps performed.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.T


def _off_diagonal_norm(A: np.ndarray) -> float:
    # summed over the off-diagonal entries only; subtracting the diagonal
    # from the full norm cancels to zero when the diagonal dominates
    off = A[~np.eye(A.shape[0], dtype=bool)]
    return float(np.sqrt(np.sum(off ** 2)))


def _rotate(A: np.ndarray, V: np.ndarray, p: int, q: int) -> None:
    """Annihilate ``A[p, q]`` in place with one Jacobi rotation."""
    apq = A[p, q]
    if apq == 0.0:
        return
    theta = (A[q, q] - A[p, p]) / (2.0 * apq)
    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c

    col_p, col_q = A[:, p].copy(), A[:, q].copy()
    A[:, p] = c * col_p - s * col_q
    A[:, q] = s * col_p + c * col_q
    row_p, row_q = A[p, :].copy(), A[q, :].copy()
    A[p, :] = c * row_p - s * row_q
    A[q, :] = s * row_p + c * row_q
    A[p, q] = A[q, p] = 0.0

    v_p, v_q = V[:, p].copy(), V[:, q].copy()
    V[:, p] = c * v_p - s * v_q
    V[:, q] = s * v_p + c * v_q


def canonicalize_signs(Q: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry of each is positive."""
    Q = np.array(Q, dtype=np.float64)
    for j in range(Q.shape[1]):
        i = int(np.argmax(np.abs(Q[:, j])))
        if Q[i, j] < 0:
            Q[:, j] = -Q[:, j]
    return Q


def sym_eig(C: npt.ArrayLike, tol: float = 1e-13,
            max_sweeps: int = 100) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * max(1, ||C||_F)``.

    Raises
    ------
    NotSymmetricError
      if ``max |C - C^T| >= 1e-9``.
    """
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got {C.shape}")
    asym = np.abs(C - C.T).max() if C.size else 0.0
    if asym >= SYMMETRY_TOL:
        errmsg = f"matrix is not symmetric: max |C - C^T| = {asym:.3g}"
        raise NotSymmetricError(errmsg)

    d = C.shape[0]
    A = 0.5 * (C + C.T)
    V = np.eye(d)
    threshold = tol * max(1.0, float(np.linalg.norm(C)))

    sweeps = 0
    while _off_diagonal_norm(A) >= threshold:
        if sweeps == max_sweeps:
            logger.warning("Jacobi eigensolver stopped after %d sweeps with "
                           "off-diagonal norm %.3g", sweeps,
                           _off_diagonal_norm(A))
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                _rotate(A, V, p, q)
        sweeps += 1

    eigenvalues = np.diag(A).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return EigenDecomposition(eigenvalues=eigenvalues[order],
                              eigenvectors=canonicalize_signs(V[:, order]),
                              sweeps=sweeps)
