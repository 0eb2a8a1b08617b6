"""Cyclic Jacobi eigen-decomposition for small dense symmetric matrices."""
from __future__ import annotations

import math

import numpy as np

from .errors import BadInput


def _off_norm(a):
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigh(a, tol=1e-12, max_sweeps=50, sym_tol=1e-9):
    """Eigenvalues and eigenvectors of a real symmetric matrix.

    Plane rotations are applied to every off-diagonal pair in row-cyclic
    order until the off-diagonal Frobenius norm drops below
    ``tol * max(1, ||a||_F)`` or ``max_sweeps`` sweeps have been done.

    Parameters
    ----------
    a : array_like, shape (n, n)
        Symmetric matrix.
    tol : float
        Relative stopping threshold on the off-diagonal norm.
    max_sweeps : int
        Hard cap on the number of cyclic sweeps.
    sym_tol : float
        Largest tolerated asymmetry ``max|a - a.T|``.

    Returns
    -------
    w : ndarray, shape (n,)
        Eigenvalues in ascending order.
    v : ndarray, shape (n, n)
        Orthonormal eigenvectors, ``v[:, k]`` belongs to ``w[k]``.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise BadInput(f"expected a square matrix, got shape {a.shape}")
    if a.size and np.max(np.abs(a - a.T)) > sym_tol:
        raise BadInput("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        if _off_norm(a) < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * (abs(a[p, p]) + abs(a[q, q])):
                    # below rounding level of the diagonal; drop it
                    a[p, q] = a[q, p] = 0.0
                    continue
                # stable rotation angle (Golub & Van Loan, Alg. 8.4.1)
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    w = np.diag(a).copy()
    order = np.argsort(w)
    return w[order], v[:, order]


def jacobi_eigvalsh(a, **kwargs):
    """Ascending eigenvalues of a symmetric matrix (see `jacobi_eigh`)."""
    return jacobi_eigh(a, **kwargs)[0]
