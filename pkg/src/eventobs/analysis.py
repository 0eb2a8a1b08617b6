"""Post-hoc metrics and certificate checks over simulated traces."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadInput, BadWindow
from .etm import NodeEtmParams, Theorem3Design, dwell_time_constant, tau_min

JUMP_RTOL = 1e-9
ENVELOPE_RTOL = 1e-6


def _times(source, node) -> np.ndarray:
    if hasattr(source, "event_times"):
        return np.asarray(source.event_times(node))
    return np.asarray(source[node], dtype=float)


def inter_event_times(trace, node) -> np.ndarray:
    """Gaps in continuous time between consecutive events of ``node``.

    ``trace`` may be a SimTrace (or anything with ``event_times``) or a
    mapping from node id to event times.
    """
    t = _times(trace, node)
    if len(t) < 2:
        return np.zeros(0)
    return np.diff(t)


def event_count(trace, node, window: tuple | None = None) -> int:
    """Number of ``node`` events with time inside the closed ``window``."""
    t = trace.event_times(node)
    if window is None:
        return len(t)
    return int(np.sum((t >= window[0]) & (t <= window[1])))


def _check_window(trace, window):
    lo, hi = window
    t_end = float(trace.t[-1])
    if lo < 0 or hi < lo or hi > t_end + 1e-12 or lo > t_end:
        raise BadWindow(f"window [{lo:g}, {hi:g}] not inside [0, {t_end:g}]")


def ultimate_bound(trace, window=(20.0, 30.0)) -> float:
    """Largest Euclidean ``|x - xhat|`` over samples in the closed ``window``.

    The observer state is taken as the estimate (``psi`` = identity).
    """
    _check_window(trace, window)
    mask = (trace.t >= window[0]) & (trace.t <= window[1])
    xi = trace.x[mask] - trace.z[mask]
    if len(xi) == 0:
        return 0.0
    return float(np.max(np.linalg.norm(xi, axis=1)))


@dataclass
class Metrics:
    """Per-node event statistics and the estimation-error bound of one trace."""

    node_ids: tuple
    counts: dict
    min_iet: dict
    mean_iet: dict
    xi_max: float
    total_jumps: int
    count_window: tuple
    xi_window: tuple
    zeno_suspected: bool = False
    finite_escape: bool = False

    def rows(self) -> list:
        """Flat rows ``(node, count, min_iet, mean_iet)`` for CSV output."""
        return [(n, self.counts[n], self.min_iet[n], self.mean_iet[n]) for n in self.node_ids]


def compute_metrics(trace, count_window=None, xi_window=(20.0, 30.0)) -> Metrics:
    t_end = float(trace.t[-1])
    count_window = (0.0, t_end) if count_window is None else tuple(count_window)
    xi_window = (min(xi_window[0], t_end), min(xi_window[1], t_end))
    counts, mins, means = {}, {}, {}
    for n in trace.node_ids:
        gaps = inter_event_times(trace, n)
        counts[n] = event_count(trace, n, count_window)
        mins[n] = float(gaps.min()) if len(gaps) else math.nan
        means[n] = float(gaps.mean()) if len(gaps) else math.nan
    return Metrics(tuple(trace.node_ids), counts, mins, means,
                   ultimate_bound(trace, xi_window), len(trace.events),
                   count_window, xi_window)


def lyapunov_values(trace, P, d) -> np.ndarray:
    """``U = (x - z)^T P (x - z) + sum d_i eta_i`` at every sample."""
    xi = trace.x - trace.z
    V = np.einsum("ki,ij,kj->k", xi, np.asarray(P, dtype=float), xi)
    eta = trace.eta
    d = np.asarray(d, dtype=float)
    return V + eta[:, :len(d)] @ d


def _jump_pairs(trace):
    j = trace.j
    return np.nonzero(j[1:] == j[:-1] + 1)[0]


@dataclass
class JumpCheck:
    worst: float
    passed: bool


def verify_jump_nonincrease(trace, P, d) -> JumpCheck:
    """Largest ``U(q+) - U(q)`` over all logged jumps.

    Passes when every increase is at most ``1e-9 (1 + U(q))``.
    """
    U = lyapunov_values(trace, P, d)
    k = _jump_pairs(trace)
    if len(k) == 0:
        return JumpCheck(-math.inf, True)
    dU = U[k + 1] - U[k]
    ok = bool(np.all(dU <= JUMP_RTOL * (1.0 + np.abs(U[k]))))
    return JumpCheck(float(dU.max()), ok)


@dataclass
class EnvelopeCheck:
    worst: float
    passed: bool
    U0: float


def verify_theorem3_envelope(trace, design: Theorem3Design, theta, P, v_norm=0.0
                             ) -> EnvelopeCheck:
    """Worst excess of ``U`` over ``exp(-a_U t) U(0) + mu + theta(|v|) / a_U``.

    ``v_norm`` is either a constant bound on ``sup |v|`` or a callable
    ``t -> sup_{[0, t]} |v|``.  Passes when the excess never exceeds
    ``1e-6 U(0)``.
    """
    if not isinstance(design, Theorem3Design):
        raise BadInput("envelope check needs a Theorem3Design from design_theorem3")
    U = lyapunov_values(trace, P, design.d)
    t = trace.t
    if callable(v_norm):
        vn = np.array([v_norm(s) for s in t])
    else:
        vn = np.full(len(t), float(v_norm))
    bound = np.exp(-design.a_U * t) * U[0] + design.mu + theta(vn) / design.a_U
    excess = U - bound
    worst = float(excess.max())
    return EnvelopeCheck(worst, worst <= ENVELOPE_RTOL * U[0], float(U[0]))


def estimate_E(trace, system, per_node: bool = False):
    """Largest rate of the integrated network errors along the trace.

    For each sample the flow of every node's error block is evaluated and
    its norm taken; noise-free this is ``|dh_i/dx f_p|``.  The value
    depends on the trace: the bound is checked here, not imposed.
    """
    L = system.layout
    out = np.zeros(L.n_nodes)
    slices = [L.node_e(n) for n in L.node_ids]
    for t, q in zip(trace.t, trace.states):
        dq = system.flow(t, q)
        for k, sl in enumerate(slices):
            r = float(np.linalg.norm(dq[sl]))
            if r > out[k]:
                out[k] = r
    return out if per_node else float(out.max(initial=0.0))


def detect_stop(trace, params: Sequence[NodeEtmParams], tail=None) -> dict:
    """Per node: whether it has stopped transmitting over the ``tail`` window.

    A node counts as stopped when ``|e_i| < gamma_i^{-1}(eps_i)`` at every
    sample in the window and none of its events fall inside it.  The
    default window is the last 10% of the horizon.
    """
    t_end = float(trace.t[-1])
    tail = (0.9 * t_end, t_end) if tail is None else tuple(tail)
    _check_window(trace, tail)
    mask = (trace.t >= tail[0]) & (trace.t <= tail[1])
    L = trace.layout
    out = {}
    for k, n in enumerate(L.node_ids):
        e = trace.states[mask][:, L.node_e(n)]
        level = params[k].gamma.inverse(params[k].epsilon)
        quiet = bool(np.all(np.linalg.norm(e, axis=1) < level))
        ev = trace.event_times(n)
        out[n] = quiet and not np.any((ev >= tail[0]) & (ev <= tail[1]))
    return out


@dataclass
class IetCheck:
    tau: dict
    min_iet: dict
    passed: bool


def check_min_iet(source, params: Sequence[NodeEtmParams], node_ids, E: float,
                  dt: float) -> IetCheck:
    """Measured minimum IET of every node against ``tau_i(E) - dt``."""
    taus, mins, ok = {}, {}, True
    for p, n in zip(params, node_ids):
        taus[n] = tau_min(p, E) if E > 0 else math.inf
        gaps = inter_event_times(source, n)
        mins[n] = float(gaps.min()) if len(gaps) else math.inf
        ok &= mins[n] >= taus[n] - dt
    return IetCheck(taus, mins, bool(ok))


def adt_violation(t, j, tau: float, n0: int) -> float:
    """Largest ``(j' - j) - (t' - t) / tau - n0`` over sample pairs with ``t <= t'``.

    The average dwell-time inequality holds iff the result is ``<= 0``.
    Uses a running minimum of ``j_k - t_k / tau``, so the check is linear
    in the number of samples.
    """
    t = np.asarray(t, dtype=float)
    j = np.asarray(j, dtype=float)
    if len(t) == 0:
        return -float(n0)
    if not tau > 0:
        raise ValueError("tau must be positive")
    f = j - t / tau
    run_min = np.minimum.accumulate(f)
    return float(np.max(f - run_min) - n0)


def event_arc(event_t) -> tuple:
    """Hybrid-time samples ``(t, j)`` of the jumps: before and after each one."""
    event_t = np.asarray(event_t, dtype=float)
    n = len(event_t)
    t = np.repeat(event_t, 2)
    j = np.empty(2 * n)
    j[0::2] = np.arange(n)
    j[1::2] = np.arange(1, n + 1)
    return t, j


def error_consistency(trace, system) -> float:
    """Largest gap between integrated output errors and ``ybar - y`` (noise included)."""
    return float(np.max(np.abs(system.output_errors(trace) - system.algebraic_error(trace)),
                        initial=0.0))


@dataclass
class CertificateReport:
    """Lyapunov and dwell-time checks of one trace."""

    U: np.ndarray
    worst_jump_dU: float
    jump_ok: bool
    E: float
    tau: dict
    min_iet: dict
    iet_ok: bool
    adt_worst: float
    worst_envelope: float | None = None
    envelope_ok: bool | None = None

    @property
    def passed(self) -> bool:
        ok = self.jump_ok and self.iet_ok and self.adt_worst <= 0
        return ok and self.envelope_ok is not False


def certificate_report(trace, system, P, d, design: Theorem3Design | None = None,
                       theta=None, v_norm=0.0) -> CertificateReport:
    """Run every certificate check that applies to ``trace``."""
    jc = verify_jump_nonincrease(trace, P, d)
    E = estimate_E(trace, system)
    dt = float(trace.meta.get("dt", 0.0))
    iet = check_min_iet(trace, system.params, system.node_ids, E, dt)
    taus = [iet.tau[n] for n in system.node_ids]
    tau = dwell_time_constant(taus)
    adt = adt_violation(trace.t, trace.j, tau, len(taus)) if math.isfinite(tau) else -1.0
    rep = CertificateReport(lyapunov_values(trace, P, d), jc.worst, jc.passed, E,
                            iet.tau, iet.min_iet, iet.passed, adt)
    if design is not None:
        env = verify_theorem3_envelope(trace, design, theta, P, v_norm)
        rep.worst_envelope, rep.envelope_ok = env.worst, env.passed
    return rep
