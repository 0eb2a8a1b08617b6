"""Scenario configuration, single runs, Monte-Carlo sweeps and CSV output.

Configurations are JSON documents (``schema_version`` 1)::

    {
      "schema_version": 1,
      "name": "baseline",
      "plant": "robot_arm",
      "observer": {"L": [[...], ...], "P": [[...], ...]},
      "etm": {"nodes": [{"sigma": 600, "c": 0.001, "b": 1, "epsilon": 10,
                         "alpha": {"k": 2, "p": 1}, "gamma": {"k": 5, "p": 2}}, ...],
              "input": null},
      "flags": {"enable_v": true, "enable_m": true, "enable_u": true,
                "enable_input_trigger": false},
      "initial": {"x0": [3, 2, 3, -2], "z0": [0, 0, 0, 0], "eta0": [10, 10],
                  "ybar0": null},
      "horizon": 30.0, "dt": 0.001, "seed": 0,
      "ic_ranges": [[0, 20], [0, 10], [0, 20], [0, 10]],
      "windows": {"count": [0, 30], "xi": [20, 30]},
      "theorem1": {"d": null, "nu": null},
      "theorem3": null
    }

Every key except ``schema_version`` is optional; missing keys take the
robot case-study defaults.  ``theorem3`` may be ``{"a_U_fraction": 0.5,
"mu": 1.0}``: the node parameters are then produced by the linear-decay
design (unless given explicitly, in which case they must lie inside the
design) and runs also check the exponential envelope.

Output CSV files
----------------
``trace.csv``
    ``t,j,x1,x2,x3,x4,xh1,xh2,xh3,xh4,e1,e2,eta1,eta2,ybar1,ybar2,U``;
    with the input channel active ``e_u,eta_u,ubar`` are appended.
``events.csv``
    ``t,j,node`` (``j`` before the jump; node 0 is the input channel).
``metrics.csv``
    ``node,count,min_iet,mean_iet,tau``.
``summary.csv``
    ``key,value`` rows: ``xi_max, total_jumps, E, worst_jump_dU, adt_worst,
    worst_envelope, passed, digest``.
``sweep.csv``
    ``row,sigma1,sigma2,eps1,eps2,a1,a2,l1,l2,count_vm,xi_vm,count_free,
    xi_free,min_iet1,min_iet2,certificates_ok``.

Floats are written with 17 significant digits so outputs are byte-stable.
"""
from __future__ import annotations

import copy
import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis
from .errors import CertificateFailure, ConfigError
from .etm import (NodeEtmParams, Theorem1Report, Theorem3Design, check_noise_floor,
                  design_theorem3, dwell_time_constant, validate_theorem1)
from .hybrid import run_hybrid
from .kinf import KinfFn
from .loop import BaselineEtm, robot_loop
from .observer import FIXTURE_P, OBSERVER_L, IssCertificate, iss_gains
from .plant import RobotSignals

SCHEMA_VERSION = 1
OUTPUT_ENV = "EVENTOBS_OUTPUT_DIR"
TABLE1_PRESET = "table1"
ROW_PRESET = "table1-row"

BASE_DOC = {
    "schema_version": SCHEMA_VERSION,
    "name": "baseline",
    "plant": "robot_arm",
    "observer": {},
    "etm": {"nodes": [n.to_dict() for n in BaselineEtm().nodes()], "input": None},
    "flags": {"enable_v": True, "enable_m": True, "enable_u": True,
              "enable_input_trigger": False},
    "initial": {"x0": [3.0, 2.0, 3.0, -2.0], "z0": [0.0] * 4, "eta0": [10.0, 10.0],
                "ybar0": None},
    "horizon": 30.0,
    "dt": 1e-3,
    "seed": 0,
    "ic_ranges": [[0.0, 20.0], [0.0, 10.0], [0.0, 20.0], [0.0, 10.0]],
    "windows": {"count": [0.0, 30.0], "xi": [20.0, 30.0]},
    "theorem1": {"d": None, "nu": None},
    "theorem3": None,
}

# sigma, epsilon, a, ell per row; c = 0.001 and b = 1 throughout
TABLE1_GRID = [
    ((600, 800), (10, 10), (2, 3), (5, 5)),
    ((600, 800), (1, 1), (2, 3), (5, 5)),
    ((600, 800), (100, 100), (2, 3), (5, 5)),
    ((600, 800), (1000, 1000), (2, 3), (5, 5)),
    ((0, 0), (10, 10), (2, 3), (5, 5)),
    ((300, 400), (10, 10), (2, 3), (5, 5)),
    ((950, 950), (10, 10), (2, 3), (5, 5)),
    ((600, 800), (10, 10), (1, 1.5), (5, 5)),
    ((600, 800), (10, 10), (4, 6), (5, 5)),
    ((600, 800), (10, 10), (10, 10), (5, 5)),
    ((600, 800), (10, 10), (2, 3), (1, 1)),
    ((600, 800), (10, 10), (2, 3), (10, 10)),
    ((600, 800), (10, 10), (2, 3), (100, 100)),
]


def table1_rows() -> list:
    """The 13 ETM parameter sets of the robot sweep, in table order."""
    return [BaselineEtm(sigma=tuple(map(float, s)), epsilon=tuple(map(float, e)),
                        a=tuple(map(float, a)), ell=tuple(map(float, l)))
            for s, e, a, l in TABLE1_GRID]


@dataclass
class ScenarioConfig:
    """Validated scenario; ``doc`` keeps the normalised JSON form."""

    name: str
    nodes: list
    input_params: NodeEtmParams | None
    enable_v: bool
    enable_m: bool
    enable_input_trigger: bool
    enable_u: bool
    x0: np.ndarray
    z0: np.ndarray
    eta0: np.ndarray
    ybar0: np.ndarray | None
    horizon: float
    dt: float
    seed: int
    ic_ranges: np.ndarray
    count_window: tuple
    xi_window: tuple
    L: np.ndarray
    P: np.ndarray
    theorem1: Theorem1Report
    design: Theorem3Design | None = None
    theta: KinfFn | None = None
    doc: dict = field(default_factory=dict)

    @property
    def digest(self) -> str:
        blob = json.dumps(self.doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @property
    def all_params(self) -> list:
        return self.nodes + ([self.input_params] if self.input_params else [])

    def signals(self) -> RobotSignals:
        return RobotSignals(enable_v=self.enable_v, enable_m=self.enable_m,
                            enable_u=self.enable_u)

    def build_loop(self):
        return robot_loop(self.nodes, self.signals(), self.L, self.input_params)

    def etm_family(self) -> BaselineEtm | None:
        """Parameters as a `BaselineEtm` when the compiled kernel can run them."""
        if self.input_params is not None or len(self.nodes) != 2 or not self.enable_u:
            return None
        if any(p.alpha.p != 1.0 or p.gamma.p != 2.0 for p in self.nodes):
            return None
        g = lambda attr: tuple(float(getattr(p, attr)) for p in self.nodes)
        return BaselineEtm(sigma=g("sigma"), c=g("c"), b=g("b"), epsilon=g("epsilon"),
                           a=tuple(p.alpha.k for p in self.nodes),
                           ell=tuple(p.gamma.k for p in self.nodes))

    def replace_etm(self, etm: BaselineEtm) -> "ScenarioConfig":
        doc = copy.deepcopy(self.doc)
        doc["etm"]["nodes"] = [n.to_dict() for n in etm.nodes()]
        return config_from_dict(doc)


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _vec(x, n, what):
    try:
        arr = np.asarray(x, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what}: not numeric") from exc
    if arr.shape != (n,):
        raise ConfigError(f"{what}: expected {n} entries, got shape {arr.shape}")
    return arr


def config_from_dict(doc: dict) -> ScenarioConfig:
    """Validate a configuration document (defaults filled in)."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, "
                          f"got {doc.get('schema_version')!r}")
    unknown = set(doc) - set(BASE_DOC)
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    doc = _merge(BASE_DOC, doc)
    if doc["plant"] != "robot_arm":
        raise ConfigError(f"unsupported plant {doc['plant']!r}")
    flags = doc["flags"]
    enable_v, enable_m = bool(flags["enable_v"]), bool(flags["enable_m"])
    enable_in = bool(flags["enable_input_trigger"])
    L = np.asarray(doc["observer"].get("L", OBSERVER_L), dtype=float)
    P = np.asarray(doc["observer"].get("P", FIXTURE_P), dtype=float)
    if L.shape != (4, 2) or P.shape != (4, 4):
        raise ConfigError("observer L must be 4x2 and P 4x4")

    design = theta = None
    t3 = doc["theorem3"]
    try:
        if t3 is not None:
            sig = doc["etm"].get("sigma_star", [600.0, 800.0])
            cst = doc["etm"].get("c_star", [0.001, 0.001])
            gains = iss_gains(IssCertificate(P=P, L=L))
            design = design_theorem3(gains.a, float(t3.get("a_U_fraction", 0.5)) * gains.a,
                                     float(t3.get("mu", 1.0)), sig, cst)
            theta = gains.theta
            if t3.get("use_design_nodes", True):
                doc["etm"]["nodes"] = [n.to_dict() for n in design.node_params(gains.gamma)]
        nodes = [NodeEtmParams.from_dict(d) for d in doc["etm"]["nodes"]]
        inp = doc["etm"].get("input")
        input_params = NodeEtmParams.from_dict(inp) if (enable_in and inp) else None
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad etm section: {exc}") from exc
    if enable_in and input_params is None:
        raise ConfigError("enable_input_trigger needs etm.input parameters")
    if len(nodes) != 2:
        raise ConfigError(f"robot_arm has 2 sensor nodes, got {len(nodes)} ETM entries")
    if design is not None and not design.admits(nodes):
        raise ConfigError("etm.nodes fall outside the linear-decay design")

    all_p = nodes + ([input_params] if input_params else [])
    t1 = doc["theorem1"]
    d = t1.get("d")
    if d is not None and input_params is not None and len(d) == len(nodes):
        d = list(d) + [1.0]
    report = validate_theorem1([p.sigma for p in all_p], [p.c for p in all_p],
                               [p.epsilon for p in all_p], d, t1.get("nu"))
    if enable_m:
        check_noise_floor(nodes, RobotSignals(enable_v, enable_m).m_bounds())

    init = doc["initial"]
    n_eta = len(all_p)
    eta0 = np.asarray(init["eta0"], dtype=float)
    if len(eta0) == len(nodes) and n_eta > len(eta0):
        eta0 = np.append(eta0, 0.0)
    eta0 = _vec(eta0, n_eta, "initial.eta0")
    if np.any(eta0 < 0):
        raise ConfigError("initial.eta0 must be nonnegative")
    ybar0 = init.get("ybar0")
    horizon, dt = float(doc["horizon"]), float(doc["dt"])
    if not (horizon > 0 and dt > 0 and dt <= horizon):
        raise ConfigError("need 0 < dt <= horizon")
    ranges = np.asarray(doc["ic_ranges"], dtype=float)
    if ranges.shape != (4, 2) or np.any(ranges[:, 1] < ranges[:, 0]):
        raise ConfigError("ic_ranges must be four [lo, hi] pairs")
    win = doc["windows"]
    return ScenarioConfig(
        name=str(doc["name"]), nodes=nodes, input_params=input_params,
        enable_v=enable_v, enable_m=enable_m, enable_input_trigger=enable_in,
        enable_u=bool(flags["enable_u"]),
        x0=_vec(init["x0"], 4, "initial.x0"), z0=_vec(init["z0"], 4, "initial.z0"),
        eta0=eta0, ybar0=None if ybar0 is None else _vec(ybar0, 2, "initial.ybar0"),
        horizon=horizon, dt=dt, seed=int(doc["seed"]), ic_ranges=ranges,
        count_window=tuple(map(float, win["count"])), xi_window=tuple(map(float, win["xi"])),
        L=L, P=P, theorem1=report, design=design, theta=theta, doc=doc)


def preset_doc(name: str) -> dict:
    """Configuration document of a named preset (``table1-row1`` .. ``row13``)."""
    if name.startswith(ROW_PRESET):
        try:
            idx = int(name[len(ROW_PRESET):])
        except ValueError:
            idx = 0
        if 1 <= idx <= len(TABLE1_GRID):
            doc = copy.deepcopy(BASE_DOC)
            doc["name"] = name
            doc["etm"]["nodes"] = [n.to_dict() for n in table1_rows()[idx - 1].nodes()]
            return doc
    raise ConfigError(f"unknown preset {name!r}")


def load_config(path_or_preset) -> ScenarioConfig:
    """Load a JSON configuration file or a named preset and validate it.

    Raises
    ------
    ConfigError
        Missing file, malformed JSON or schema violation.
    ParameterViolation
        A stability inequality or the noise floor fails (message names it).
    """
    name = str(path_or_preset)
    if name.startswith(ROW_PRESET) and not os.path.exists(name):
        return config_from_dict(preset_doc(name))
    try:
        with open(name) as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"no such config file: {name}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{name}: invalid JSON ({exc})") from exc
    return config_from_dict(doc)


def output_dir(default: str = "eventobs-output") -> Path:
    """Directory for CSV output, taken from ``$EVENTOBS_OUTPUT_DIR`` when set."""
    return Path(os.environ.get(OUTPUT_ENV, default))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return repr(float(v)) if math.isfinite(v) else str(float(v))


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if not isinstance(v, str) else v for v in r])


def initial_state(cfg: ScenarioConfig, loop, x0=None):
    return loop.initial_state(cfg.x0 if x0 is None else x0, cfg.z0, cfg.eta0, cfg.ybar0)


def simulate(cfg: ScenarioConfig, x0=None):
    """Run the generic engine on ``cfg``; returns ``(loop, trace)``."""
    loop = cfg.build_loop()
    trace = run_hybrid(loop, initial_state(cfg, loop, x0), cfg.horizon, cfg.dt,
                       meta={"digest": cfg.digest, "name": cfg.name})
    return loop, trace


def run_scenario(cfg: ScenarioConfig, out_dir=None):
    """Simulate, evaluate and (optionally) write the CSV bundle.

    Returns
    -------
    trace : SimTrace
    metrics : analysis.Metrics
    report : analysis.CertificateReport
    """
    loop, trace = simulate(cfg)
    metrics = analysis.compute_metrics(trace, cfg.count_window, cfg.xi_window)
    report = analysis.certificate_report(
        trace, loop, cfg.P, cfg.theorem1.d, cfg.design, cfg.theta,
        cfg.signals().v_sup())
    if out_dir is not None:
        write_outputs(Path(out_dir), cfg, loop, trace, metrics, report)
    return trace, metrics, report


def write_outputs(out: Path, cfg, loop, trace, metrics, report):
    lay = loop.layout
    U = report.U
    ny = loop.plant.n_y
    header = (["t", "j"] + [f"x{i}" for i in range(1, 5)] + [f"xh{i}" for i in range(1, 5)]
              + ["e1", "e2", "eta1", "eta2", "ybar1", "ybar2", "U"])
    has_in = cfg.input_params is not None
    if has_in:
        header += ["e_u", "eta_u", "ubar"]
    rows = []
    for k in range(len(trace.t)):
        q = trace.states[k]
        e, eta, hold = q[lay.e], q[lay.eta], q[lay.hold]
        r = [trace.t[k], int(trace.j[k]), *q[lay.x], *q[lay.z], *e[:ny], *eta[:2],
             *hold[:ny], U[k]]
        if has_in:
            r += [e[ny], eta[2], hold[ny]]
        rows.append(r)
    _write_csv(out / "trace.csv", header, rows)
    _write_csv(out / "events.csv", ["t", "j", "node"],
               [(t, int(j), int(n)) for t, j, n in trace.events])
    _write_csv(out / "metrics.csv", ["node", "count", "min_iet", "mean_iet", "tau"],
               [(n, c, mi, me, report.tau[n]) for n, c, mi, me in metrics.rows()])
    _write_csv(out / "summary.csv", ["key", "value"], [
        ("xi_max", metrics.xi_max), ("total_jumps", metrics.total_jumps),
        ("E", report.E), ("worst_jump_dU", report.worst_jump_dU),
        ("adt_worst", report.adt_worst), ("worst_envelope", report.worst_envelope),
        ("passed", bool(report.passed)), ("digest", cfg.digest),
    ])


class TraceTable:
    """Trace read back from ``trace.csv`` and ``events.csv``."""

    def __init__(self, t, j, x, z, events):
        self.t, self.j, self.x, self.z = t, j, x, z
        self.events = events
        self.node_ids = tuple(sorted({n for _, _, n in events}))

    def event_times(self, node) -> np.ndarray:
        return np.array([t for t, _, n in self.events if n == node])


def read_trace(path) -> TraceTable:
    """Load a trace written by `run_scenario` (``events.csv`` must sit next to it)."""
    path = Path(path)
    if path.is_dir():
        path = path / "trace.csv"
    ev_path = path.with_name("events.csv")
    if not path.exists() or not ev_path.exists():
        raise ConfigError(f"need {path} and {ev_path}")
    try:
        data = np.genfromtxt(path, delimiter=",", names=True)
        ev = np.genfromtxt(ev_path, delimiter=",", names=True, ndmin=1)
    except ValueError as exc:
        raise ConfigError(f"unreadable trace: {exc}") from exc
    data = np.atleast_1d(data)
    x = np.column_stack([data[f"x{i}"] for i in range(1, 5)])
    z = np.column_stack([data[f"xh{i}"] for i in range(1, 5)])
    events = [(float(r["t"]), int(r["j"]), int(r["node"])) for r in np.atleast_1d(ev)]
    return TraceTable(data["t"], data["j"].astype(int), x, z, events)


def emit_plot_data(trace, out_dir) -> list:
    """Write one CSV per figure: state overlay, ``|xi|`` curve and IET stems.

    Returns the list of written paths.
    """
    out = Path(out_dir)
    t = np.asarray(trace.t)
    # keep the last sample at each time instant so time is strictly increasing
    keep = np.append(t[1:] != t[:-1], True)
    x, z = trace.x[keep], trace.z[keep]
    paths = [out / "plot_states.csv", out / "plot_xi.csv"]
    _write_csv(paths[0], ["t"] + [f"x{i}" for i in range(1, 5)]
               + [f"xh{i}" for i in range(1, 5)],
               [(tk, *xk, *zk) for tk, xk, zk in zip(t[keep], x, z)])
    xi = np.linalg.norm(x - z, axis=1)
    _write_csv(paths[1], ["t", "xi_norm"], zip(t[keep], xi))
    for n in trace.node_ids:
        et = trace.event_times(n)
        p = out / f"plot_iet_node{n}.csv"
        _write_csv(p, ["t", "iet"], zip(et[1:], np.diff(et)))
        paths.append(p)
    return paths


# -- Monte-Carlo sweeps -----------------------------------------------------

@dataclass
class SweepRow:
    index: int
    etm: BaselineEtm
    count_vm: float
    xi_vm: float
    count_free: float
    xi_free: float
    min_iet: tuple
    certificates_ok: bool
    runs: int


@dataclass
class SweepResult:
    rows: list
    seed: int
    n_runs: int

    def table(self) -> list:
        return [(r.index, *r.etm.sigma, *r.etm.epsilon, *r.etm.a, *r.etm.ell,
                 r.count_vm, r.xi_vm, r.count_free, r.xi_free, *r.min_iet,
                 r.certificates_ok) for r in self.rows]


SWEEP_HEADER = ["row", "sigma1", "sigma2", "eps1", "eps2", "a1", "a2", "l1", "l2",
                "count_vm", "xi_vm", "count_free", "xi_free", "min_iet1", "min_iet2",
                "certificates_ok"]


def draw_initial_states(seed: int, n_runs: int, ranges=None) -> np.ndarray:
    """Uniform initial plant states, ``x1..x4`` drawn in order for each run (PCG64)."""
    ranges = np.asarray(BASE_DOC["ic_ranges"] if ranges is None else ranges, dtype=float)
    rng = np.random.Generator(np.random.PCG64(seed))
    out = np.empty((n_runs, len(ranges)))
    for r in range(n_runs):
        for i, (lo, hi) in enumerate(ranges):
            out[r, i] = rng.uniform(lo, hi)
    return out


@dataclass
class RunCheck:
    """Certificate checks of one compiled run."""

    jump_ok: bool
    iet_ok: bool
    adt_worst: float
    tau: tuple
    min_iet: tuple

    @property
    def ok(self) -> bool:
        return self.jump_ok and self.iet_ok and self.adt_worst <= 0


def check_fast_run(res, nodes, dt) -> RunCheck:
    """Theorem-level checks on a `fastsim.FastResult`."""
    from .etm import tau_min
    jump_ok = res.worst_dU <= analysis.JUMP_RTOL
    taus, mins = [], []
    for k, p in enumerate(nodes, start=1):
        taus.append(tau_min(p, res.E) if res.E > 0 else math.inf)
        gaps = np.diff(res.event_times(k))
        mins.append(float(gaps.min()) if len(gaps) else math.inf)
    iet_ok = all(m >= tau - dt for m, tau in zip(mins, taus))
    tau = dwell_time_constant(taus)
    t, j = analysis.event_arc(res.event_t)
    adt = analysis.adt_violation(t, j, tau, len(nodes)) if math.isfinite(tau) else -1.0
    return RunCheck(bool(jump_ok), bool(iet_ok), adt, tuple(taus), tuple(mins))


def run_sweep(rows=None, n_runs: int = 100, seed: int = 0, cfg: ScenarioConfig | None = None,
              out_dir=None, strict: bool = True, progress=None) -> SweepResult:
    """Ensemble statistics of each ETM row with and without ``v, m``.

    Every row uses the same ``n_runs`` initial states (drawn from ``seed``)
    with ``xhat(0) = 0``, ``e(0) = 0`` and ``eta(0)`` from ``cfg``.  The
    count is the mean number of transmissions of all nodes over the count
    window; ``xi`` is the ensemble mean of the per-run maximum ``|x - xhat|``
    over the ``xi`` window.

    Raises
    ------
    CertificateFailure
        When ``strict`` and some run violates the jump, IET or dwell-time check.
    """
    from .fastsim import simulate_robot
    cfg = load_config(f"{ROW_PRESET}1") if cfg is None else cfg
    rows = table1_rows() if rows is None else list(rows)
    ics = draw_initial_states(seed, n_runs, cfg.ic_ranges)
    out_rows = []
    for idx, etm in enumerate(rows, start=1):
        rep = validate_theorem1(etm.sigma, etm.c, etm.epsilon)
        nodes = etm.nodes()
        stats = {}
        ok = True
        mins = [math.inf, math.inf]
        for noisy in (True, False):
            if noisy:
                check_noise_floor(nodes, RobotSignals().m_bounds())
            counts, xis = [], []
            for x0 in ics:
                res = simulate_robot(x0, etm, enable_v=noisy, enable_m=noisy, T=cfg.horizon,
                                     dt=cfg.dt, z0=cfg.z0, eta0=cfg.eta0[:2],
                                     window=cfg.xi_window, L=cfg.L, P=cfg.P, d=rep.d)
                w = cfg.count_window
                counts.append(int(np.sum((res.event_t >= w[0]) & (res.event_t <= w[1]))))
                xis.append(res.xi_max)
                chk = check_fast_run(res, nodes, cfg.dt)
                ok &= chk.ok
                mins = [min(a, b) for a, b in zip(mins, chk.min_iet)]
                if strict and not chk.ok:
                    raise CertificateFailure(
                        f"row {idx}, x0={x0.tolist()}: jump_ok={chk.jump_ok} "
                        f"iet_ok={chk.iet_ok} adt={chk.adt_worst:.3g}")
            stats[noisy] = (float(np.mean(counts)), float(np.mean(xis)))
        out_rows.append(SweepRow(idx, etm, *stats[True], *stats[False], tuple(mins),
                                 bool(ok), n_runs))
        if progress is not None:
            progress(out_rows[-1])
    result = SweepResult(out_rows, seed, n_runs)
    if out_dir is not None:
        _write_csv(Path(out_dir) / "sweep.csv", SWEEP_HEADER, result.table())
    return result


def load_sweep(spec):
    """Rows and base config of a sweep given by preset name or JSON file.

    A sweep file holds ``{"schema_version": 1, "base": {...config...},
    "rows": [{"sigma": [..], "epsilon": [..], "a": [..], "ell": [..]}, ...],
    "n_runs": 100, "seed": 0}``.
    """
    if spec == TABLE1_PRESET:
        return table1_rows(), load_config(f"{ROW_PRESET}1"), 100, 0
    try:
        with open(spec) as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"no such sweep file or preset: {spec}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{spec}: invalid JSON ({exc})") from exc
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError("sweep schema_version mismatch")
    base = _merge({"schema_version": SCHEMA_VERSION}, doc.get("base", {}))
    cfg = config_from_dict(base)
    etm0 = cfg.etm_family()
    if etm0 is None:
        raise ConfigError("sweeps need two nodes with linear alpha and quadratic gamma")
    rows = []
    for r in doc.get("rows", [{}]):
        kw = {k: tuple(float(v) for v in r.get(k, getattr(etm0, k)))
              for k in ("sigma", "c", "b", "a", "epsilon", "ell")}
        rows.append(BaselineEtm(**kw))
    return rows, cfg, int(doc.get("n_runs", 100)), int(doc.get("seed", cfg.seed))


__all__ = [
    "ScenarioConfig", "SweepResult", "SweepRow", "TABLE1_GRID", "config_from_dict",
    "draw_initial_states", "emit_plot_data", "load_config", "load_sweep", "output_dir",
    "preset_doc", "read_trace", "run_scenario", "run_sweep", "table1_rows",
]
