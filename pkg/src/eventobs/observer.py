"""ISS observers, the quadratic certificate of the robot observer, and LMI checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BadInput, InvalidSplit
from .jacobi import jacobi_eigvalsh
from .kinf import KinfFn
from .plant import ROBOT, RobotArmParams

# Observer gain of the robot case study (4x2).
OBSERVER_L = np.array([
    [0.58, -42.96],
    [-4.67, 2.83],
    [3.16, 49.25],
    [16.34, 88.46],
])

# Certificate fixture, version 1.  Generated offline with cvxpy by solving
#   minimise t  s.t.  1e-3 I <= P <= t I,
#   P (A - L C + G_i) + (A - L C + G_i)^T P <= -1.01 I,  i = 1, 2,
# with the robot matrices, OBSERVER_L and the vertex matrices of `vertex_matrices`,
# then rounded to 6 decimals.  Only verified at runtime (see `verify_lmi`).
FIXTURE_P_VERSION = 1
FIXTURE_P = np.array([
    [2.249947, -0.034731, 0.224054, -0.005624],
    [-0.034731, 2.04362, -0.320954, 0.072942],
    [0.224054, -0.320954, 3.311533, -0.611841],
    [-0.005624, 0.072942, -0.611841, 0.331386],
])


def vertex_matrices(params: RobotArmParams = ROBOT):
    """The two polytope vertices bounding the slope of ``G * 3.3 sin(x_3)``."""
    g1 = np.zeros((4, 4))
    g1[3, 2] = params.gain
    return g1, -g1


@dataclass(frozen=True)
class ObserverModel:
    """Observer ``z' = f_o(z, u, ybar, yhat)``, ``xhat = psi(z)``, ``yhat = h(psi(z))``."""

    n_z: int
    f_o: Callable
    psi: Callable = field(default=lambda z: z)
    name: str = "observer"


def luenberger_flow(z, u, ybar, L=OBSERVER_L, params: RobotArmParams = ROBOT):
    """Robot observer ``A z + B u + G * 3.3 sin(z_3) + L (ybar - C z)``."""
    z = np.asarray(z, dtype=float)
    return (params.A @ z + params.B * float(u) + params.G * params.sigma(z)
            + L @ (np.asarray(ybar, dtype=float) - params.C @ z))


def luenberger_observer(L=OBSERVER_L, params: RobotArmParams = ROBOT) -> ObserverModel:
    """ObserverModel of the robot Luenberger observer (``z = xhat``)."""
    L = np.asarray(L, dtype=float)
    A, B, G = params.A, params.B, params.G
    gain = params.gain

    def f_o(z, u, ybar, yhat):
        return A @ z + B * u + G * (gain * math.sin(z[2])) + L @ (ybar - yhat)

    return ObserverModel(n_z=4, f_o=f_o, name="luenberger")


def eval_V(x, z, P=FIXTURE_P) -> float:
    """Quadratic Lyapunov function ``(x - z)^T P (x - z)``."""
    xi = np.asarray(x, dtype=float) - np.asarray(z, dtype=float)
    return float(xi @ P @ xi)


@dataclass
class LmiReport:
    feasible: bool
    worst_eigenvalues: list
    min_eig_P: float

    @property
    def worst(self) -> float:
        return max(self.worst_eigenvalues)


def verify_lmi(P, W, Q, G1, G2, tol=1e-8, params: RobotArmParams = ROBOT) -> LmiReport:
    """Check ``PA - WC + PG_i + G_i^T P + A^T P - C^T W^T <= -Q`` for each vertex.

    For every vertex the symmetric part of the left-hand side plus ``Q`` is
    formed and its largest eigenvalue (cyclic Jacobi) compared against
    ``tol``.  ``P`` must also be positive definite.

    Returns
    -------
    LmiReport
        ``feasible`` and the largest eigenvalue per vertex.
    """
    P = np.asarray(P, dtype=float)
    if P.shape != (4, 4) or np.max(np.abs(P - P.T)) > 1e-9:
        raise BadInput("P must be a symmetric 4x4 matrix")
    W = np.asarray(W, dtype=float)
    Q = np.asarray(Q, dtype=float)
    A, C = params.A, params.C
    worst = []
    for Gi in (np.asarray(G1, dtype=float), np.asarray(G2, dtype=float)):
        M = P @ A - W @ C + P @ Gi + Gi.T @ P + A.T @ P - C.T @ W.T + Q
        M = 0.5 * (M + M.T)
        worst.append(float(jacobi_eigvalsh(M)[-1]))
    min_eig_P = float(jacobi_eigvalsh(P)[0])
    feasible = min_eig_P > 0 and all(w <= tol for w in worst)
    return LmiReport(feasible, worst, min_eig_P)


@dataclass(frozen=True)
class IssCertificate:
    """Quadratic ISS certificate ``V = xi^T P xi`` of the robot observer."""

    P: np.ndarray = field(default_factory=lambda: FIXTURE_P.copy())
    L: np.ndarray = field(default_factory=lambda: OBSERVER_L.copy())
    Q: np.ndarray = field(default_factory=lambda: np.eye(4))
    c_v: float = 0.2
    c_1: float = 0.2
    c_2: float = 0.2


@dataclass(frozen=True)
class IssGains:
    alpha: KinfFn
    theta: KinfFn
    gamma: tuple

    @property
    def a(self) -> float:
        return self.alpha.k


def iss_gains(cert: IssCertificate) -> IssGains:
    """Decay rate and gains ``(a s, theta, gamma_1, gamma_2)`` of the certificate.

    ``a = (lmin(Q) - c_v - c_1 - c_2) / lmax(P)``,
    ``theta(s) = ||P||^2 s^2 / c_v``, ``gamma_i(s) = ||P L_i||^2 s^2 / c_i``.
    """
    splits = (cert.c_v, cert.c_1, cert.c_2)
    if min(splits) <= 0:
        raise InvalidSplit("splitting constants must be positive")
    eig_P = jacobi_eigvalsh(cert.P)
    if eig_P[0] <= 0:
        raise BadInput("P is not positive definite")
    margin = jacobi_eigvalsh(cert.Q)[0] - sum(splits)
    if margin <= 0:
        raise InvalidSplit(
            f"lambda_min(Q) - c_v - c_1 - c_2 = {margin:.6g} must be positive")
    norm_P = float(eig_P[-1])
    PL = cert.P @ cert.L
    gammas = tuple(
        KinfFn.quadratic(np.linalg.norm(PL[:, i], 2) ** 2 / c)
        for i, c in enumerate((cert.c_1, cert.c_2))
    )
    return IssGains(
        alpha=KinfFn.linear(margin / norm_P),
        theta=KinfFn.quadratic(norm_P ** 2 / cert.c_v),
        gamma=gammas,
    )
