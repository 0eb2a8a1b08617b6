"""Per-node dynamic event-triggering mechanisms and their parameter design.

Each node ``i`` runs a scalar filter

    eta_i' = -alpha_i(eta_i) + c_i * gamma_i(|e_i|),   eta_i+ = b_i * eta_i

and transmits when ``gamma_i(|e_i|) >= sigma_i * alpha_i(eta_i) + epsilon_i``.
A node only ever reads its own ``(eta_i, e_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DecayUnachievable, ParameterViolation
from .kinf import KinfFn

INPUT_CHANNEL = 0


@dataclass(frozen=True)
class NodeEtmParams:
    sigma: float
    c: float
    b: float
    epsilon: float
    alpha: KinfFn = field(default_factory=lambda: KinfFn.linear(1.0))
    gamma: KinfFn = field(default_factory=lambda: KinfFn.quadratic(1.0))

    def __post_init__(self):
        if self.sigma < 0:
            raise ParameterViolation(f"sigma >= 0 violated (sigma={self.sigma})")
        if self.c < 0:
            raise ParameterViolation(f"c >= 0 violated (c={self.c})")
        if not 0.0 <= self.b <= 1.0:
            raise ParameterViolation(f"b in [0, 1] violated (b={self.b})")
        if not self.epsilon > 0:
            raise ParameterViolation(f"epsilon > 0 violated (epsilon={self.epsilon})")

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma, "c": self.c, "b": self.b, "epsilon": self.epsilon,
            "alpha": self.alpha.to_dict(), "gamma": self.gamma.to_dict(),
        }

    @classmethod
    def from_dict(cls, d) -> "NodeEtmParams":
        return cls(
            sigma=float(d["sigma"]), c=float(d["c"]), b=float(d.get("b", 1.0)),
            epsilon=float(d["epsilon"]),
            alpha=KinfFn.from_dict(d.get("alpha", {"k": 1.0, "p": 1.0})),
            gamma=KinfFn.from_dict(d.get("gamma", {"k": 1.0, "p": 2.0})),
        )


@dataclass
class NodeEtmState:
    eta: float
    ybar: np.ndarray
    e: np.ndarray

    @property
    def e_norm(self) -> float:
        return float(np.linalg.norm(np.atleast_1d(self.e)))


def eta_flow(state: NodeEtmState, params: NodeEtmParams) -> float:
    """``-alpha_i(eta_i) + c_i gamma_i(|e_i|)``."""
    return -params.alpha(state.eta) + params.c * params.gamma(state.e_norm)


def trigger_margin(state: NodeEtmState, params: NodeEtmParams) -> float:
    """``gamma_i(|e_i|) - sigma_i alpha_i(eta_i) - epsilon_i``; transmit iff >= 0."""
    return (params.gamma(state.e_norm) - params.sigma * params.alpha(state.eta)
            - params.epsilon)


def should_transmit(state: NodeEtmState, params: NodeEtmParams) -> bool:
    return trigger_margin(state, params) >= 0.0


# The input channel is structurally identical: e_u = ubar - u.
def input_etm_step(eta_u: float, e_u, params: NodeEtmParams) -> float:
    """Filter derivative of the input-channel ETM."""
    return eta_flow(NodeEtmState(eta_u, np.zeros(0), np.atleast_1d(e_u)), params)


def input_trigger(eta_u: float, e_u, params: NodeEtmParams) -> bool:
    """Transmission decision of the input-channel ETM."""
    return should_transmit(NodeEtmState(eta_u, np.zeros(0), np.atleast_1d(e_u)), params)


@dataclass
class Theorem1Report:
    sigma_star: np.ndarray
    c_star: np.ndarray
    eps_star: np.ndarray
    d_star: np.ndarray
    d: np.ndarray
    delta: np.ndarray
    nu_min: float
    nu: float
    sigma_zero: list

    def lines(self) -> list:
        out = []
        for i in range(len(self.d)):
            flag = " (sigma*=0 corner)" if self.sigma_zero[i] else ""
            out.append(f"node {i + 1}: d*={self.d_star[i]:.6g} d={self.d[i]:.6g} "
                       f"delta={self.delta[i]:.6g}{flag}")
        out.append(f"nu >= {self.nu_min:.6g} (using nu={self.nu:.6g})")
        return out


def validate_theorem1(sigma_star: Sequence, c_star: Sequence, eps_star: Sequence,
                      d: Sequence | None = None, nu: float | None = None) -> Theorem1Report:
    """Check the Lyapunov-design inequalities and derive ``d*``, ``delta``, ``nu``.

    Per node, ``sigma* c* < 1`` is required, ``d* = sigma*/(1 - sigma* c*)``,
    ``d > d*`` and ``delta = d - sigma*(1 + d c*) > 0``.  The practical
    offset must satisfy ``nu >= sum (1 + d c*) eps*``.  When ``d`` is None
    it defaults to ``2 d*`` (or 1 when ``d* = 0``); when ``nu`` is None the
    smallest admissible value is used.

    Raises
    ------
    ParameterViolation
        Naming the first inequality that fails.
    """
    s = np.asarray(sigma_star, dtype=float)
    c = np.asarray(c_star, dtype=float)
    eps = np.asarray(eps_star, dtype=float)
    if not (s.shape == c.shape == eps.shape):
        raise ParameterViolation("sigma*, c*, eps* must have one entry per node")
    if np.any(s < 0) or np.any(c < 0):
        raise ParameterViolation("sigma* >= 0 and c* >= 0 required")
    if np.any(eps <= 0):
        raise ParameterViolation("eps* > 0 required")
    prod = s * c
    for i, p in enumerate(prod):
        if p >= 1.0:
            raise ParameterViolation(
                f"node {i + 1}: sigma*_i c*_i < 1 violated ({s[i]:g}*{c[i]:g} = {p:g})")
    d_star = s / (1.0 - prod)
    if d is None:
        d = np.where(d_star > 0, 2.0 * d_star, 1.0)
    d = np.asarray(d, dtype=float)
    for i in range(len(s)):
        if not d[i] > d_star[i]:
            raise ParameterViolation(
                f"node {i + 1}: d_i > d*_i violated (d={d[i]:g}, d*={d_star[i]:g})")
    delta = d - s * (1.0 + d * c)
    for i in range(len(s)):
        if not delta[i] > 0:
            raise ParameterViolation(f"node {i + 1}: delta_i > 0 violated ({delta[i]:g})")
    nu_min = float(np.sum((1.0 + d * c) * eps))
    if nu is None:
        nu = nu_min
    elif nu < nu_min:
        raise ParameterViolation(
            f"sum (1 + d_i c*_i) eps*_i <= nu violated ({nu_min:g} > {nu:g})")
    return Theorem1Report(s, c, eps, d_star, d, delta, nu_min, float(nu),
                          [bool(x == 0) for x in s])


@dataclass
class Theorem3Design:
    """Linear-decay design: ETM parameters guaranteeing decay ``a_U`` up to ``mu``."""

    a: float
    a_U: float
    mu: float
    sigma_star: np.ndarray
    c_star: np.ndarray
    a_star: np.ndarray
    d: np.ndarray
    varsigma: float
    eps_budget: float
    sigma_zero: list

    @property
    def n_nodes(self) -> int:
        return len(self.d)

    @property
    def eps_star(self) -> np.ndarray:
        """Even split of the epsilon budget over the nodes."""
        return np.full(self.n_nodes, self.eps_budget / self.n_nodes)

    def node_params(self, gammas: Sequence[KinfFn], b: Sequence | float = 1.0) -> list:
        """ETM parameters at the design point (``sigma = sigma*``, ``c = c*``,
        ``a_i = a*_i``, ``eps_i = eps*_i``) with the certificate gains ``gammas``."""
        b = np.broadcast_to(np.asarray(b, dtype=float), (self.n_nodes,))
        return [
            NodeEtmParams(sigma=float(self.sigma_star[i]), c=float(self.c_star[i]),
                          b=float(b[i]), epsilon=float(self.eps_star[i]),
                          alpha=KinfFn.linear(self.a_star[i]), gamma=gammas[i])
            for i in range(self.n_nodes)
        ]

    def admits(self, params: Sequence[NodeEtmParams]) -> bool:
        """Whether concrete node parameters fall inside the design's ranges."""
        if len(params) != self.n_nodes:
            return False
        eps = np.array([p.epsilon for p in params])
        if eps.sum() > self.eps_budget * (1 + 1e-12):
            return False
        for i, p in enumerate(params):
            if p.alpha.p != 1.0 or p.alpha.k < self.a_star[i] * (1 - 1e-12):
                return False
            if p.sigma > self.sigma_star[i] or p.c > self.c_star[i]:
                return False
        return True


def design_theorem3(a: float, a_U: float, mu: float, sigma_star: Sequence,
                    c_star: Sequence, headroom: float = 0.05,
                    d: Sequence | None = None) -> Theorem3Design:
    """Choose ``a*_i``, ``d_i`` and the epsilon budget for decay rate ``a_U``.

    ``a*_i = (1 + headroom) a_U / (1 - sigma*_i c*_i)`` (strictly above the
    bound), ``d_i = sigma*_i / (1 - sigma*_i c*_i - a_U / a*_i)``,
    ``varsigma = max_i d_i c*_i`` and ``sum eps*_i <= a_U mu / (1 + varsigma)``.

    A node with ``sigma*_i = 0`` gets ``d_i = 0`` from the formula; such a
    node is flagged and ``d`` may supply an explicit positive value.
    """
    if not 0 < a_U <= a:
        raise DecayUnachievable(f"need 0 < a_U <= a (a_U={a_U:g}, a={a:g})")
    if mu <= 0:
        raise ParameterViolation("mu > 0 required")
    s = np.asarray(sigma_star, dtype=float)
    c = np.asarray(c_star, dtype=float)
    prod = s * c
    if np.any(prod >= 1.0):
        raise ParameterViolation("sigma*_i c*_i < 1 violated")
    a_star = (1.0 + headroom) * a_U / (1.0 - prod)
    d_formula = s / (1.0 - prod - a_U / a_star)
    sigma_zero = [bool(x == 0) for x in s]
    if d is not None:
        d_arr = np.asarray(d, dtype=float)
        d_formula = np.where(s == 0, d_arr, d_formula)
    varsigma = float(np.max(d_formula * c)) if len(s) else 0.0
    budget = a_U * mu / (1.0 + varsigma)
    return Theorem3Design(float(a), float(a_U), float(mu), s, c, a_star, d_formula,
                          varsigma, budget, sigma_zero)


def tau_min(params: NodeEtmParams, E: float) -> float:
    """Minimum inter-event time ``gamma_i^{-1}(eps_i) / E`` of one node."""
    if not E > 0:
        raise ValueError("E must be positive")
    return float(params.gamma.inverse(params.epsilon)) / E


def dwell_time_constant(taus: Sequence[float]) -> float:
    """Average dwell-time constant ``min_i tau_i / N``."""
    return min(taus) / len(taus)


def noise_floor(params: NodeEtmParams, m_bound: float) -> float:
    """Smallest admissible epsilon under noise of amplitude ``m_bound``: ``gamma_i(2 m)``."""
    if m_bound < 0:
        raise ValueError("noise bound must be nonnegative")
    return float(params.gamma(2.0 * m_bound))


def check_noise_floor(nodes: Sequence[NodeEtmParams], bounds: Sequence[float]):
    """Raise `ParameterViolation` unless ``eps_i > gamma_i(2 m_i)`` for every noisy node."""
    for i, (p, m) in enumerate(zip(nodes, bounds)):
        if m > 0 and not p.epsilon > noise_floor(p, m):
            raise ParameterViolation(
                f"node {i + 1}: eps_i > gamma_i(2 m_i) violated "
                f"({p.epsilon:g} <= {noise_floor(p, m):g})")
