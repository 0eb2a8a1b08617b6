"""Closed loop of plant, observer, ZOH network and per-node ETMs as a hybrid system."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadInput
from .etm import INPUT_CHANNEL, NodeEtmParams, check_noise_floor
from .hybrid import HybridState, StateLayout
from .network import NoiseModel


def _norm(v):
    return abs(v[0]) if len(v) == 1 else math.sqrt(float(v @ v))


class ClosedLoop:
    """Hybrid model ``q = (x, z, e, eta, hold)`` of the networked observer.

    Output nodes have ids ``1..N`` (in the plant's partition order); when
    ``input_params`` is given an input channel with id ``0`` is appended,
    whose error is ``e_u = ubar - u`` and whose held value ``ubar`` drives
    both the plant and the observer.

    With noise enabled the integrated error is ``e~_i = ybar~_i - y_i - m_i``
    and the observer receives ``h(x) + m + e~``.

    Parameters
    ----------
    plant : PlantModel
    observer : ObserverModel
    nodes : sequence of NodeEtmParams
        One entry per output node.
    signals
        Object with ``u, u_dot, v, m, m_dot`` methods (see `plant.RobotSignals`).
    input_params : NodeEtmParams, optional
        Enables the input-channel ETM.
    check_noise : bool
        Reject ``eps_i <= gamma_i(2 m_i)`` when the signals carry noise.
    """

    def __init__(self, plant, observer, nodes: Sequence[NodeEtmParams], signals,
                 input_params: NodeEtmParams | None = None, check_noise: bool = True):
        if len(nodes) != plant.n_nodes:
            raise BadInput(f"expected {plant.n_nodes} node parameter sets, got {len(nodes)}")
        self.plant = plant
        self.observer = observer
        self.signals = signals
        self.noise = NoiseModel.from_signals(signals, plant.partition)
        if check_noise and self.noise.enabled:
            check_noise_floor(nodes, self.noise.bounds)
        self.params = list(nodes)
        widths = list(plant.partition)
        ids = list(range(1, plant.n_nodes + 1))
        if input_params is not None:
            widths.append(plant.n_u)
            ids.append(INPUT_CHANNEL)
            self.params.append(input_params)
        self.input_params = input_params
        self.layout = StateLayout(plant.n_x, observer.n_z, tuple(widths), tuple(ids))
        self.node_ids = self.layout.node_ids
        L = self.layout
        self._e_sl = [L.node_e(i) for i in ids]
        self._h_sl = [L.node_hold(i) for i in ids]
        self._eta_ix = [L.node_eta(i) for i in ids]
        self._ny = plant.n_y
        self._x_sl, self._z_sl = L.x, L.z
        self._ey_sl = slice(L.e.start, L.e.start + plant.n_y)
        self._hy_sl = slice(L.hold.start, L.hold.start + plant.n_y)
        self._hold_sl = L.hold
        self._sigma = np.array([p.sigma for p in self.params])
        self._eps = np.array([p.epsilon for p in self.params])
        self._c = np.array([p.c for p in self.params])
        self._b = np.array([p.b for p in self.params])
        self._alpha = [p.alpha for p in self.params]
        self._gamma = [p.gamma for p in self.params]

    # -- hybrid-system interface -------------------------------------------
    def _u_applied(self, t, q):
        u = self.signals.u(t)
        if self.input_params is None:
            return u
        eu = q[self._e_sl[-1]]
        return u + eu[0] if self.plant.n_u == 1 else u + eu

    def flow(self, t, q):
        x, z = q[self._x_sl], q[self._z_sl]
        sig = self.signals
        plant = self.plant
        u = self._u_applied(t, q)
        fx = plant.f(x, u, sig.v(t))
        ybar = plant.h(x) + sig.m(t) + q[self._ey_sl]
        yhat = plant.h(self.observer.psi(z))
        out = np.empty_like(q)
        out[self._x_sl] = fx
        out[self._z_sl] = self.observer.f_o(z, u, ybar, yhat)
        out[self._ey_sl] = -(plant.jac(x) @ fx) - sig.m_dot(t)
        out[self._hold_sl] = 0.0
        if self.input_params is not None:
            out[self._e_sl[-1]] = -np.atleast_1d(sig.u_dot(t))
        for k, ix in enumerate(self._eta_ix):
            out[ix] = (-self._alpha[k](q[ix])
                       + self._c[k] * self._gamma[k](_norm(q[self._e_sl[k]])))
        return out

    def margins(self, t, q):
        m = np.empty(len(self._eta_ix))
        for k, ix in enumerate(self._eta_ix):
            m[k] = (self._gamma[k](_norm(q[self._e_sl[k]]))
                    - self._sigma[k] * self._alpha[k](q[ix]) - self._eps[k])
        return m

    def jump(self, t, q, node):
        k = self.node_ids.index(node)
        out = q.copy()
        out[self._e_sl[k]] = 0.0
        out[self._eta_ix[k]] = self._b[k] * q[self._eta_ix[k]]
        if node == INPUT_CHANNEL:
            out[self._h_sl[k]] = np.atleast_1d(self.signals.u(t))
        else:
            x = q[self._x_sl]
            sl = self.plant.node_slice(node)
            out[self._h_sl[k]] = (self.plant.h(x) + self.signals.m(t))[sl]
        return out

    # -- helpers -----------------------------------------------------------
    def initial_state(self, x0, z0=None, eta0=None, ybar0=None, ubar0=None) -> HybridState:
        """Initial hybrid state; by default ``ybar(0) = y(0) + m(0)`` so ``e(0) = 0``."""
        x0 = np.asarray(x0, dtype=float)
        z0 = np.zeros(self.observer.n_z) if z0 is None else np.asarray(z0, dtype=float)
        n = len(self.node_ids)
        eta0 = np.zeros(n) if eta0 is None else np.asarray(eta0, dtype=float)
        if len(eta0) == self.plant.n_nodes and n > len(eta0):
            eta0 = np.append(eta0, 0.0)
        if np.any(eta0 < 0):
            raise BadInput("eta(0) must be nonnegative")
        y0 = self.plant.h(x0) + self.signals.m(0.0)
        ybar = y0 if ybar0 is None else np.asarray(ybar0, dtype=float)
        e = ybar - y0
        hold = ybar
        if self.input_params is not None:
            u0 = np.atleast_1d(self.signals.u(0.0))
            ubar = u0 if ubar0 is None else np.atleast_1d(np.asarray(ubar0, dtype=float))
            e = np.concatenate([e, ubar - u0])
            hold = np.concatenate([hold, ubar])
        return HybridState(x0, z0, e, eta0, hold)

    def algebraic_error(self, trace) -> np.ndarray:
        """``hold - (y + m)`` recomputed at every sample (output nodes only)."""
        L = self.layout
        out = np.empty((len(trace.t), self._ny))
        for k, (t, q) in enumerate(zip(trace.t, trace.states)):
            y = self.plant.h(q[L.x]) + self.signals.m(t)
            out[k] = q[L.hold.start:L.hold.start + self._ny] - y
        return out

    def output_errors(self, trace) -> np.ndarray:
        L = self.layout
        return trace.states[:, L.e.start:L.e.start + self._ny]


def robot_loop(nodes: Sequence[NodeEtmParams], signals=None, L=None,
               input_params: NodeEtmParams | None = None, check_noise: bool = True):
    """ClosedLoop of the robot arm and its Luenberger observer."""
    from .observer import OBSERVER_L, luenberger_observer
    from .plant import RobotSignals, robot_arm
    signals = RobotSignals() if signals is None else signals
    obs = luenberger_observer(OBSERVER_L if L is None else L)
    return ClosedLoop(robot_arm(), obs, nodes, signals, input_params, check_noise)


@dataclass(frozen=True)
class BaselineEtm:
    """Per-node parameters of the robot case study (linear alpha, quadratic gamma)."""

    sigma: tuple = (600.0, 800.0)
    c: tuple = (0.001, 0.001)
    b: tuple = (1.0, 1.0)
    a: tuple = (2.0, 3.0)
    epsilon: tuple = (10.0, 10.0)
    ell: tuple = (5.0, 5.0)

    def nodes(self) -> list:
        from .kinf import KinfFn
        return [NodeEtmParams(sigma=self.sigma[i], c=self.c[i], b=self.b[i],
                              epsilon=self.epsilon[i], alpha=KinfFn.linear(self.a[i]),
                              gamma=KinfFn.quadratic(self.ell[i]))
                for i in range(len(self.sigma))]
