"""Flow/jump integration over hybrid time domains.

A hybrid system here is any object exposing

``layout``
    a `StateLayout` describing how ``(x, z, e, eta, hold)`` is packed
    into one flat vector;
``node_ids``
    the identifiers of the triggering nodes, aligned with the output of
    ``margins``;
``flow(t, q)``
    the flow map ``F`` evaluated on the flat state;
``margins(t, q)``
    one trigger margin per node, node ``i`` is in its jump set iff its
    margin is ``>= 0``;
``jump(t, q, node)``
    the jump map of one node.

Flows use classical fixed-step RK4 on the grid ``k * dt``; a margin that
turns nonnegative inside a step is localised by bisection on the RK4
reconstruction from the step start.  Jumps have priority over flows and
simultaneous triggers are resolved in ascending node id.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import FiniteEscape, InconsistentJump, NoEvent, ZenoSuspected

TOL_EVENT = 1e-9
TOL_MARGIN = 1e-10


class HybridTime(NamedTuple):
    t: float
    j: int


@dataclass(frozen=True)
class StateLayout:
    """Packing of ``q = (x, z, e, eta, hold)`` into a flat vector.

    ``widths[k]`` is the error width of the node ``node_ids[k]``; each node
    has one filter state and a held value as wide as its error.
    """

    n_x: int
    n_z: int
    widths: tuple
    node_ids: tuple

    @property
    def n_e(self) -> int:
        return int(sum(self.widths))

    @property
    def n_nodes(self) -> int:
        return len(self.widths)

    @property
    def size(self) -> int:
        return self.n_x + self.n_z + 2 * self.n_e + self.n_nodes

    @property
    def x(self) -> slice:
        return slice(0, self.n_x)

    @property
    def z(self) -> slice:
        return slice(self.n_x, self.n_x + self.n_z)

    @property
    def e(self) -> slice:
        s = self.n_x + self.n_z
        return slice(s, s + self.n_e)

    @property
    def eta(self) -> slice:
        s = self.n_x + self.n_z + self.n_e
        return slice(s, s + self.n_nodes)

    @property
    def hold(self) -> slice:
        s = self.n_x + self.n_z + self.n_e + self.n_nodes
        return slice(s, s + self.n_e)

    def position(self, node) -> int:
        return self.node_ids.index(node)

    def node_e(self, node) -> slice:
        k = self.position(node)
        s = self.e.start + int(sum(self.widths[:k]))
        return slice(s, s + self.widths[k])

    def node_hold(self, node) -> slice:
        k = self.position(node)
        s = self.hold.start + int(sum(self.widths[:k]))
        return slice(s, s + self.widths[k])

    def node_eta(self, node) -> int:
        return self.eta.start + self.position(node)

    def pack(self, state: "HybridState") -> np.ndarray:
        return np.concatenate([
            np.atleast_1d(state.x), np.atleast_1d(state.z), np.atleast_1d(state.e),
            np.atleast_1d(state.eta), np.atleast_1d(state.hold),
        ]).astype(float)

    def unpack(self, q) -> "HybridState":
        q = np.asarray(q, dtype=float)
        return HybridState(q[self.x].copy(), q[self.z].copy(), q[self.e].copy(),
                           q[self.eta].copy(), q[self.hold].copy())


@dataclass
class HybridState:
    """Plant state ``x``, observer state ``z``, network errors ``e``, filter
    states ``eta`` and the channel's held values ``hold``."""

    x: np.ndarray
    z: np.ndarray
    e: np.ndarray
    eta: np.ndarray
    hold: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass
class SimTrace:
    """Samples of a hybrid arc plus its event log.

    ``t[k], j[k], states[k]`` is the k-th sample; each jump contributes a
    pre-jump and a post-jump sample at the same ``t``.  ``events`` holds
    ``(t, j, node)`` with ``j`` the jump counter before the jump.
    """

    t: np.ndarray
    j: np.ndarray
    states: np.ndarray
    events: list
    layout: StateLayout
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    @property
    def x(self):
        return self.states[:, self.layout.x]

    @property
    def z(self):
        return self.states[:, self.layout.z]

    @property
    def e(self):
        return self.states[:, self.layout.e]

    @property
    def eta(self):
        return self.states[:, self.layout.eta]

    @property
    def hold(self):
        return self.states[:, self.layout.hold]

    @property
    def samples(self):
        return [(HybridTime(float(t), int(j)), self.layout.unpack(q))
                for t, j, q in zip(self.t, self.j, self.states)]

    def event_times(self, node) -> np.ndarray:
        return np.array([t for t, _, n in self.events if n == node])

    @property
    def node_ids(self):
        return self.layout.node_ids


def rk4_step(flow, t: float, q: np.ndarray, h: float) -> np.ndarray:
    k1 = flow(t, q)
    k2 = flow(t + 0.5 * h, q + (0.5 * h) * k1)
    k3 = flow(t + 0.5 * h, q + (0.5 * h) * k2)
    k4 = flow(t + h, q + h * k3)
    return q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _as_vector(system, q):
    if isinstance(q, HybridState):
        return system.layout.pack(q), True
    return np.asarray(q, dtype=float), False


def integrate_flow_step(system, q, t: float, dt: float):
    """Advance ``q`` by one RK4 step of size ``dt`` starting at time ``t``.

    Accepts and returns either a `HybridState` or a flat vector.

    Raises
    ------
    FiniteEscape
        If any component of the result is not finite.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    vec, structured = _as_vector(system, q)
    out = rk4_step(system.flow, t, vec, dt)
    if not np.all(np.isfinite(out)):
        raise FiniteEscape(f"non-finite state after flow step at t={t + dt:.9g}")
    return system.layout.unpack(out) if structured else out


def locate_event(system, t: float, q_pre, dt: float, tol_event: float = TOL_EVENT,
                 tol_margin: float = TOL_MARGIN):
    """Earliest time in ``(0, dt]`` at which some trigger margin reaches zero.

    Bisects on ``s -> margins(t + s, RK4(q_pre, s))`` until the bracket is
    narrower than ``tol_event``.

    Returns
    -------
    s : float
        Offset of the event from ``t`` (right end of the final bracket, so
        the triggering margin is nonnegative there).
    triggered : tuple
        Every node whose margin is ``>= -tol_margin`` at ``t + s``, in
        ascending id order.

    Raises
    ------
    NoEvent
        If no margin is nonnegative at the end of the step.
    """
    q_pre, _ = _as_vector(system, q_pre)
    flow = system.flow
    end = rk4_step(flow, t, q_pre, dt)
    if np.max(system.margins(t + dt, end)) < 0.0:
        raise NoEvent(f"no trigger crossing in [{t:.9g}, {t + dt:.9g}]")
    if np.max(system.margins(t, q_pre)) >= 0.0:
        return 0.0, _triggered(system, system.margins(t, q_pre), tol_margin)
    lo, hi, m_hi = 0.0, dt, system.margins(t + dt, end)
    while hi - lo > tol_event:
        mid = 0.5 * (lo + hi)
        m_mid = system.margins(t + mid, rk4_step(flow, t, q_pre, mid))
        if np.max(m_mid) >= 0.0:
            hi, m_hi = mid, m_mid
        else:
            lo = mid
    return hi, _triggered(system, m_hi, tol_margin)


def _triggered(system, margins, tol_margin):
    ids = system.node_ids
    return tuple(sorted(ids[k] for k in range(len(ids)) if margins[k] >= -tol_margin))


def apply_jumps(system, q, t: float, j: int, triggered: Sequence,
                tol_margin: float = TOL_MARGIN):
    """Apply the jump maps of ``triggered`` nodes one after the other.

    Nodes are processed in ascending id with no flow in between; each jump
    increments ``j`` by one.

    Returns
    -------
    (q_plus, j_plus)

    Raises
    ------
    InconsistentJump
        If a listed node's margin is below ``-tol_margin`` when its turn comes.
    """
    if not triggered:
        raise ValueError("triggered node set is empty")
    vec, structured = _as_vector(system, q)
    ids = system.node_ids
    for node in sorted(triggered):
        m = system.margins(t, vec)[ids.index(node)]
        if m < -tol_margin:
            raise InconsistentJump(
                f"node {node} not in its jump set at t={t:.9g} (margin {m:.3g})")
        vec = system.jump(t, vec, node)
        j += 1
    return (system.layout.unpack(vec) if structured else vec), j


def run_hybrid(system, q0, horizon: float, dt: float, tol_event: float = TOL_EVENT,
               tol_margin: float = TOL_MARGIN, max_jumps_per_instant: int | None = None,
               meta: dict | None = None) -> SimTrace:
    """Simulate a hybrid system on ``[0, horizon]`` and record its arc.

    Samples are taken on the grid ``k * dt`` and at every event (before and
    after each jump).  The run is deterministic.

    Raises
    ------
    FiniteEscape
        A state component became non-finite.
    ZenoSuspected
        More than ``max_jumps_per_instant`` (default ``2 N + 1``) jumps
        happened without any flow.
    """
    if not dt > 0 or not horizon > 0:
        raise ValueError("dt and horizon must be positive")
    layout = system.layout
    ids = system.node_ids
    if max_jumps_per_instant is None:
        max_jumps_per_instant = 2 * len(ids) + 1
    flow, margins, jump = system.flow, system.margins, system.jump
    q, _ = _as_vector(system, q0)
    q = q.copy()
    if not np.all(np.isfinite(q)):
        raise FiniteEscape("non-finite initial state")

    n_grid = int(round(horizon / dt))
    if abs(n_grid * dt - horizon) > 1e-9 * max(1.0, horizon):
        n_grid = int(math.ceil(horizon / dt))
    ts, js, qs = [0.0], [0], [q]
    events = []
    t, j, k = 0.0, 0, 0
    pending = None
    burst = 0
    while True:
        m = margins(t, q)
        if pending is None:
            hits = [ids[i] for i in range(len(ids)) if m[i] >= 0.0]
        else:
            hits = list(pending)
            pending = None
        if hits:
            for node in sorted(hits):
                mi = margins(t, q)[ids.index(node)]
                if mi < -tol_margin:
                    raise InconsistentJump(f"node {node} margin {mi:.3g} at t={t:.9g}")
                q = jump(t, q, node)
                events.append((t, j, node))
                j += 1
                ts.append(t)
                js.append(j)
                qs.append(q)
            burst += len(hits)
            if burst > max_jumps_per_instant:
                raise ZenoSuspected(f"{burst} jumps at t={t:.9g} without flow")
            continue
        if k >= n_grid:
            break
        t_next = min((k + 1) * dt, horizon)
        h = t_next - t
        q1 = rk4_step(flow, t, q, h)
        if not np.all(np.isfinite(q1)):
            raise FiniteEscape(f"non-finite state after flow step at t={t_next:.9g}")
        m1 = margins(t_next, q1)
        if np.max(m1) >= 0.0:
            s, trig = locate_event(system, t, q, h, tol_event, tol_margin)
            if s >= h:
                q, t, k = q1, t_next, k + 1
            else:
                q = rk4_step(flow, t, q, s)
                t = t + s
            pending = trig
        else:
            q, t, k = q1, t_next, k + 1
        burst = 0
        ts.append(t)
        js.append(j)
        qs.append(q)

    info = {"dt": dt, "horizon": horizon, "tol_event": tol_event, "tol_margin": tol_margin}
    if meta:
        info.update(meta)
    return SimTrace(np.array(ts), np.array(js, dtype=int), np.array(qs), events, layout, info)
