"""Plant models: the generic evaluator triple and the flexible-joint robot arm."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class PlantModel:
    """Plant ``x' = f(x, u, v)``, ``y = h(x)`` with output Jacobian ``dh/dx``.

    ``partition`` lists the output width of each sensor node; node ``i``
    (1-based) owns ``y[offsets[i-1]:offsets[i]]``.  ``f`` must be locally
    Lipschitz in ``x`` and ``h`` continuously differentiable; neither is
    checked.
    """

    n_x: int
    n_u: int
    n_v: int
    partition: tuple
    f: Callable
    h: Callable
    jac: Callable
    name: str = "plant"

    def __post_init__(self):
        if any(int(w) < 1 for w in self.partition):
            raise ValueError("node output widths must be positive")

    @property
    def n_y(self) -> int:
        return int(sum(self.partition))

    @property
    def n_nodes(self) -> int:
        return len(self.partition)

    @property
    def offsets(self) -> tuple:
        return tuple(int(o) for o in np.concatenate([[0], np.cumsum(self.partition)]))

    def node_slice(self, i: int) -> slice:
        off = self.offsets
        return slice(off[i - 1], off[i])

    def error_flow(self, x, u, v, node: int | None = None):
        """Flow of the network-induced error, ``-dh/dx(x) f(x, u, v)``.

        Returns the block of node ``node`` (1-based) or the full stacked
        vector when ``node`` is None.
        """
        g = -(self.jac(x) @ self.f(x, u, v))
        if node is None:
            return g
        return g[self.node_slice(node)]


@dataclass(frozen=True)
class RobotArmParams:
    """Matrices of the flexible-joint robot arm ``x' = Ax + Bu + G*sig(Hx) + v``."""

    A: np.ndarray = field(default_factory=lambda: np.array([
        [0.0, 1.0, 0.0, 0.0],
        [-48.6, -1.25, 48.6, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [19.5, 0.0, -19.5, 0.0],
    ]))
    B: np.ndarray = field(default_factory=lambda: np.array([0.0, 21.6, 0.0, 0.0]))
    G: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 0.0, -1.0]))
    H: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0, 0.0]))
    C: np.ndarray = field(default_factory=lambda: np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
    ]))
    gain: float = 3.3
    partition: tuple = (1, 1)

    def sigma(self, x):
        """Joint nonlinearity ``3.3 sin(Hx)``."""
        return self.gain * math.sin(float(self.H @ x))


ROBOT = RobotArmParams()


def robot_flow(x, u, v=None, params: RobotArmParams = ROBOT):
    """Robot-arm vector field ``Ax + Bu + G * 3.3 sin(x_3) + v``."""
    x = np.asarray(x, dtype=float)
    dx = params.A @ x + params.B * float(u) + params.G * params.sigma(x)
    if v is not None:
        dx = dx + v
    return dx


def robot_arm(params: RobotArmParams = ROBOT) -> PlantModel:
    """PlantModel for the robot arm with two single-output sensor nodes."""
    C = params.C
    return PlantModel(
        n_x=4, n_u=1, n_v=4, partition=tuple(params.partition),
        f=lambda x, u, v: robot_flow(x, u, v, params),
        h=lambda x: C @ x,
        jac=lambda x: C,
        name="robot_arm",
    )


def error_flow(plant: PlantModel, x, u, v, node: int):
    """``g_i(x, u, v) = -dh_i/dx f(x, u, v)`` for 1-based ``node``."""
    return plant.error_flow(x, u, v, node)


@dataclass(frozen=True)
class RobotSignals:
    """Exogenous signals of the robot case study.

    ``u = sin t``, ``v = 0.02 (0,1,0,1) sin 0.4t``, ``m = 0.01 (0,1) sin 0.3t``.
    The disturbance and the noise can be switched off independently.
    """

    enable_v: bool = True
    enable_m: bool = True
    enable_u: bool = True
    v_amp: float = 0.02
    v_freq: float = 0.4
    m_amp: float = 0.01
    m_freq: float = 0.3
    v_dir: tuple = (0.0, 1.0, 0.0, 1.0)
    m_dir: tuple = (0.0, 1.0)

    def u(self, t):
        return math.sin(t) if self.enable_u else 0.0

    def u_dot(self, t):
        return math.cos(t) if self.enable_u else 0.0

    def v(self, t):
        if not self.enable_v:
            return np.zeros(4)
        return self.v_amp * math.sin(self.v_freq * t) * np.asarray(self.v_dir)

    def m(self, t):
        if not self.enable_m:
            return np.zeros(2)
        return self.m_amp * math.sin(self.m_freq * t) * np.asarray(self.m_dir)

    def m_dot(self, t):
        if not self.enable_m:
            return np.zeros(2)
        return self.m_amp * self.m_freq * math.cos(self.m_freq * t) * np.asarray(self.m_dir)

    def v_sup(self) -> float:
        """Closed-form ``sup_t |v(t)|``."""
        if not self.enable_v:
            return 0.0
        return self.v_amp * float(np.linalg.norm(self.v_dir))

    def m_bounds(self) -> np.ndarray:
        """Per-node amplitude bounds of the measurement noise."""
        if not self.enable_m:
            return np.zeros(len(self.m_dir))
        return self.m_amp * np.abs(np.asarray(self.m_dir, dtype=float))


def exogenous_signals(t: float, enable_v: bool = True, enable_m: bool = True):
    """The case-study signals ``(u, v, m)`` at time ``t``."""
    sig = RobotSignals(enable_v=enable_v, enable_m=enable_m)
    return sig.u(t), sig.v(t), sig.m(t)


@dataclass(frozen=True)
class FunctionSignals:
    """Exogenous signals given by plain callables (synthetic scenarios).

    Missing callables default to zero of the declared width.
    """

    n_u: int = 1
    n_v: int = 0
    n_y: int = 1
    u_fn: Callable | None = None
    u_dot_fn: Callable | None = None
    v_fn: Callable | None = None
    m_fn: Callable | None = None
    m_dot_fn: Callable | None = None
    v_bound: float = 0.0
    m_bound: Sequence | None = None

    def _z(self, n):
        return 0.0 if n == 1 else np.zeros(n)

    def u(self, t):
        return self.u_fn(t) if self.u_fn else self._z(self.n_u)

    def u_dot(self, t):
        return self.u_dot_fn(t) if self.u_dot_fn else self._z(self.n_u)

    def v(self, t):
        return self.v_fn(t) if self.v_fn else np.zeros(self.n_v)

    def m(self, t):
        return self.m_fn(t) if self.m_fn else np.zeros(self.n_y)

    def m_dot(self, t):
        return self.m_dot_fn(t) if self.m_dot_fn else np.zeros(self.n_y)

    def v_sup(self) -> float:
        return float(self.v_bound)

    def m_bounds(self) -> np.ndarray:
        if self.m_bound is None:
            return np.zeros(self.n_y)
        return np.asarray(self.m_bound, dtype=float)
