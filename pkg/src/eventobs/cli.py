"""Command-line entry point: ``eventobs run|sweep|check|plotdata``.

Exit codes: 0 success, 2 configuration or validation failure, 3 a
certificate check failed.  Output goes to ``$EVENTOBS_OUTPUT_DIR``
(default ``./eventobs-output``) unless ``--out`` is given.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import scenario
from .errors import (BadInput, CertificateFailure, ConfigError, DecayUnachievable,
                     InvalidSplit, ParameterViolation)
from .observer import vertex_matrices, verify_lmi

EXIT_OK, EXIT_INVALID, EXIT_CERT = 0, 2, 3
_INVALID = (ConfigError, ParameterViolation, BadInput, DecayUnachievable, InvalidSplit)


def _out(args) -> Path:
    return Path(args.out) if args.out else scenario.output_dir()


def cmd_check(args) -> int:
    cfg = scenario.load_config(args.config)
    for line in cfg.theorem1.lines():
        print(line)
    G1, G2 = vertex_matrices()
    W = cfg.P @ cfg.L
    lmi = verify_lmi(cfg.P, W, np.eye(4), G1, G2)
    print(f"LMI feasible={lmi.feasible} worst eigenvalue={lmi.worst:.6g}")
    if cfg.design is not None:
        print(f"linear-decay design: a*={cfg.design.a_star.tolist()} "
              f"eps budget={cfg.design.eps_budget:.6g}")
    return EXIT_OK if lmi.feasible else EXIT_CERT


def cmd_run(args) -> int:
    cfg = scenario.load_config(args.config)
    out = _out(args)
    trace, metrics, report = scenario.run_scenario(cfg, out)
    for n, c, mi, me in metrics.rows():
        print(f"node {n}: {c} events, min IET {mi:.6g} s, tau {report.tau[n]:.6g} s")
    print(f"max |xi| on [{metrics.xi_window[0]:g}, {metrics.xi_window[1]:g}]: "
          f"{metrics.xi_max:.6g}")
    print(f"wrote {out}")
    return EXIT_OK if report.passed else EXIT_CERT


def cmd_sweep(args) -> int:
    rows, cfg, n_runs, seed = scenario.load_sweep(args.spec)
    n_runs = args.runs or n_runs
    seed = seed if args.seed is None else args.seed

    def show(r):
        print(f"row {r.index:2d}: count {r.count_vm:7.1f} / {r.count_free:7.1f}  "
              f"xi {r.xi_vm:.4g} / {r.xi_free:.4g}", flush=True)

    res = scenario.run_sweep(rows, n_runs, seed, cfg, _out(args), strict=False, progress=show)
    return EXIT_OK if all(r.certificates_ok for r in res.rows) else EXIT_CERT


def cmd_plotdata(args) -> int:
    trace = scenario.read_trace(args.trace)
    src = Path(args.trace)
    out = Path(args.out) if args.out else (src if src.is_dir() else src.parent) / "plots"
    for p in scenario.emit_plot_data(trace, out):
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eventobs", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="simulate one scenario and write CSVs")
    r.add_argument("config", help="JSON file or preset name")
    s = sub.add_parser("sweep", help="Monte-Carlo sweep over ETM parameters")
    s.add_argument("spec", help=f"sweep JSON file or '{scenario.TABLE1_PRESET}'")
    s.add_argument("--runs", type=int, default=None)
    s.add_argument("--seed", type=int, default=None)
    c = sub.add_parser("check", help="validate a configuration only")
    c.add_argument("config")
    d = sub.add_parser("plotdata", help="per-figure CSVs from a written trace")
    d.add_argument("trace", help="trace.csv or the directory containing it")
    for sp in (r, s, d):
        sp.add_argument("--out", default=None, help="output directory")
    r.set_defaults(func=cmd_run)
    s.set_defaults(func=cmd_sweep)
    c.set_defaults(func=cmd_check)
    d.set_defaults(func=cmd_plotdata)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INVALID as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CertificateFailure as exc:
        print(f"certificate check failed: {exc}", file=sys.stderr)
        return EXIT_CERT


if __name__ == "__main__":
    sys.exit(main())
