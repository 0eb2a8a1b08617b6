"""Compiled robot-arm kernel for Monte-Carlo sweeps.

`simulate_robot` runs the same closed loop as ``robot_loop`` +
``run_hybrid`` (RK4 on the ``k * dt`` grid, bisection localisation, jump
priority, ascending-id resolution) for the linear-alpha / quadratic-gamma
ETM family, without recording the state trajectory.  Only the quantities
a sweep needs are returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import FiniteEscape, ZenoSuspected
from .observer import FIXTURE_P, OBSERVER_L
from .plant import ROBOT

_A = ROBOT.A.copy()
_B = ROBOT.B.copy()
_G = ROBOT.G.copy()

OK, ESCAPE, ZENO, OVERFLOW = 0, 1, 2, 3


@njit(cache=True)
def _flow(t, q, out, A, B, G, L, a, c, ell, v_on, m_on):
    u = math.sin(t)
    sv = 0.02 * math.sin(0.4 * t) if v_on else 0.0
    m2 = 0.01 * math.sin(0.3 * t) if m_on else 0.0
    md2 = 0.003 * math.cos(0.3 * t) if m_on else 0.0
    sx = 3.3 * math.sin(q[2])
    sz = 3.3 * math.sin(q[6])
    r0 = q[0] + q[8] - q[4]
    r1 = q[1] + m2 + q[9] - q[5]
    for i in range(4):
        fx = B[i] * u + G[i] * sx
        fz = B[i] * u + G[i] * sz + L[i, 0] * r0 + L[i, 1] * r1
        for k in range(4):
            fx += A[i, k] * q[k]
            fz += A[i, k] * q[4 + k]
        out[i] = fx
        out[4 + i] = fz
    out[1] += sv
    out[3] += sv
    out[8] = -out[0]
    out[9] = -out[1] - md2
    for i in range(2):
        out[10 + i] = -a[i] * q[10 + i] + c[i] * ell[i] * q[8 + i] * q[8 + i]


@njit(cache=True)
def _rk4(t, q, h, A, B, G, L, a, c, ell, v_on, m_on, k1, k2, k3, k4, tmp, res):
    _flow(t, q, k1, A, B, G, L, a, c, ell, v_on, m_on)
    for i in range(12):
        tmp[i] = q[i] + 0.5 * h * k1[i]
    _flow(t + 0.5 * h, tmp, k2, A, B, G, L, a, c, ell, v_on, m_on)
    for i in range(12):
        tmp[i] = q[i] + 0.5 * h * k2[i]
    _flow(t + 0.5 * h, tmp, k3, A, B, G, L, a, c, ell, v_on, m_on)
    for i in range(12):
        tmp[i] = q[i] + h * k3[i]
    _flow(t + h, tmp, k4, A, B, G, L, a, c, ell, v_on, m_on)
    for i in range(12):
        res[i] = q[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


@njit(cache=True)
def _margin(q, i, sigma, a, ell, eps):
    return ell[i] * q[8 + i] * q[8 + i] - sigma[i] * a[i] * q[10 + i] - eps[i]


@njit(cache=True)
def _U(q, P, d):
    u = 0.0
    for i in range(4):
        for k in range(4):
            u += (q[i] - q[4 + i]) * P[i, k] * (q[k] - q[4 + k])
    return u + d[0] * q[10] + d[1] * q[11]


@njit(cache=True)
def _sample(t, q, A, B, G, L, a, c, ell, v_on, m_on, kbuf, win_lo, win_hi, stats):
    # stats: [xi_max, E, finite-flag]
    if t >= win_lo and t <= win_hi:
        s = 0.0
        for i in range(4):
            s += (q[i] - q[4 + i]) ** 2
        s = math.sqrt(s)
        if s > stats[0]:
            stats[0] = s
    _flow(t, q, kbuf, A, B, G, L, a, c, ell, v_on, m_on)
    for i in range(2):
        r = abs(kbuf[8 + i])
        if r > stats[1]:
            stats[1] = r


@njit(cache=True)
def _simulate(x0, z0, eta0, sigma, c, b, a, ell, eps, L, v_on, m_on, T, dt,
              tol_event, tol_margin, win_lo, win_hi, P, d, max_events, A, B, G):
    q = np.zeros(12)
    q[0:4] = x0
    q[4:8] = z0
    q[10:12] = eta0
    k1 = np.empty(12); k2 = np.empty(12); k3 = np.empty(12); k4 = np.empty(12)
    tmp = np.empty(12); q1 = np.empty(12); qs = np.empty(12); kb = np.empty(12)
    ev_t = np.empty(max_events)
    ev_n = np.empty(max_events, dtype=np.int64)
    stats = np.zeros(2)
    worst_du = -np.inf
    n_ev = 0
    n_grid = int(round(T / dt))
    if abs(n_grid * dt - T) > 1e-9 * max(1.0, T):
        n_grid = int(math.ceil(T / dt))
    t = 0.0
    k = 0
    burst = 0
    pend0 = False
    pend1 = False
    have_pending = False
    _sample(t, q, A, B, G, L, a, c, ell, v_on, m_on, kb, win_lo, win_hi, stats)
    while True:
        if have_pending:
            h0, h1 = pend0, pend1
            have_pending = False
        else:
            h0 = _margin(q, 0, sigma, a, ell, eps) >= 0.0
            h1 = _margin(q, 1, sigma, a, ell, eps) >= 0.0
        if h0 or h1:
            for i in range(2):
                if (i == 0 and h0) or (i == 1 and h1):
                    if n_ev >= max_events:
                        return ev_t, ev_n, n_ev, stats[0], stats[1], worst_du, OVERFLOW
                    u_pre = _U(q, P, d)
                    q[8 + i] = 0.0
                    q[10 + i] = b[i] * q[10 + i]
                    du = (_U(q, P, d) - u_pre) / (1.0 + abs(u_pre))
                    if du > worst_du:
                        worst_du = du
                    ev_t[n_ev] = t
                    ev_n[n_ev] = i + 1
                    n_ev += 1
                    burst += 1
            if burst > 5:
                return ev_t, ev_n, n_ev, stats[0], stats[1], worst_du, ZENO
            continue
        if k >= n_grid:
            break
        t_next = min((k + 1) * dt, T)
        h = t_next - t
        _rk4(t, q, h, A, B, G, L, a, c, ell, v_on, m_on, k1, k2, k3, k4, tmp, q1)
        for i in range(12):
            if not math.isfinite(q1[i]):
                return ev_t, ev_n, n_ev, stats[0], stats[1], worst_du, ESCAPE
        if (_margin(q1, 0, sigma, a, ell, eps) >= 0.0
                or _margin(q1, 1, sigma, a, ell, eps) >= 0.0):
            lo = 0.0
            hi = h
            qs[:] = q1
            while hi - lo > tol_event:
                mid = 0.5 * (lo + hi)
                _rk4(t, q, mid, A, B, G, L, a, c, ell, v_on, m_on, k1, k2, k3, k4, tmp, qs)
                if (_margin(qs, 0, sigma, a, ell, eps) >= 0.0
                        or _margin(qs, 1, sigma, a, ell, eps) >= 0.0):
                    hi = mid
                else:
                    lo = mid
            _rk4(t, q, hi, A, B, G, L, a, c, ell, v_on, m_on, k1, k2, k3, k4, tmp, qs)
            pend0 = _margin(qs, 0, sigma, a, ell, eps) >= -tol_margin
            pend1 = _margin(qs, 1, sigma, a, ell, eps) >= -tol_margin
            have_pending = True
            if hi >= h:
                q[:] = q1
                t = t_next
                k += 1
            else:
                q[:] = qs
                t = t + hi
        else:
            q[:] = q1
            t = t_next
            k += 1
        burst = 0
        _sample(t, q, A, B, G, L, a, c, ell, v_on, m_on, kb, win_lo, win_hi, stats)
    return ev_t, ev_n, n_ev, stats[0], stats[1], worst_du, OK


@dataclass
class FastResult:
    """Summary of one compiled run.

    ``events`` is a list of ``(t, node)``; ``xi_max`` is the largest
    ``|x - xhat|`` over samples inside the window; ``E`` the largest rate
    of an integrated output error; ``worst_dU`` the largest change of
    ``U`` across a jump relative to ``1 + |U|`` before it (``-inf``
    without events).
    """

    event_t: np.ndarray
    event_node: np.ndarray
    xi_max: float
    E: float
    worst_dU: float

    def event_times(self, node: int) -> np.ndarray:
        return self.event_t[self.event_node == node]

    def count(self, node: int | None = None) -> int:
        if node is None:
            return len(self.event_t)
        return int(np.sum(self.event_node == node))


def simulate_robot(x0, etm, enable_v=True, enable_m=True, T=30.0, dt=1e-3, z0=None,
                   eta0=(10.0, 10.0), window=(20.0, 30.0), L=OBSERVER_L, P=FIXTURE_P,
                   d=(1.0, 1.0), tol_event=1e-9, tol_margin=1e-10, max_events=200_000):
    """Run the robot closed loop with a `loop.BaselineEtm`-like parameter set.

    Raises
    ------
    FiniteEscape, ZenoSuspected
        Same conditions as the generic engine.
    """
    f = lambda v: np.ascontiguousarray(v, dtype=float)
    z0 = np.zeros(4) if z0 is None else z0
    ev_t, ev_n, n, xi, E, du, status = _simulate(
        f(x0), f(z0), f(eta0), f(etm.sigma), f(etm.c), f(etm.b), f(etm.a), f(etm.ell),
        f(etm.epsilon), f(L), bool(enable_v), bool(enable_m), float(T), float(dt),
        float(tol_event), float(tol_margin), float(window[0]), float(window[1]),
        f(P), f(d), int(max_events), _A, _B, _G)
    if status == ESCAPE:
        raise FiniteEscape("non-finite state in compiled robot run")
    if status == ZENO:
        raise ZenoSuspected("too many jumps without flow in compiled robot run")
    if status == OVERFLOW:
        raise RuntimeError("event buffer exhausted; raise max_events")
    return FastResult(ev_t[:n].copy(), ev_n[:n].copy(), float(xi), float(E), float(du))
