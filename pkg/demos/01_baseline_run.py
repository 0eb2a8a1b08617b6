"""Robot-arm observer with two event-triggered sensors.

Runs the case-study configuration once from a fixed initial state, prints
per-sensor transmission statistics and writes the CSV bundle plus
plot-ready files.  Change ``OUT`` or set EVENTOBS_OUTPUT_DIR to choose
where files land.
"""
import numpy as np

from eventobs import scenario as sc
from eventobs.analysis import inter_event_times

OUT = sc.output_dir("demo-output") / "baseline"

cfg = sc.load_config("table1-row1")
print("triggering parameters")
for i, p in enumerate(cfg.nodes, start=1):
    print(f"  node {i}: sigma={p.sigma:g} a={p.alpha.k:g} eps={p.epsilon:g} "
          f"gamma(s)={p.gamma.k:g} s^2")

trace, metrics, report = sc.run_scenario(cfg, OUT)

# The dynamic rule keeps transmissions sparse: compare the measured
# minimum gap with the guaranteed lower bound tau_i computed from the
# largest output rate seen along this trajectory.
for n in (1, 2):
    gaps = inter_event_times(trace, n)
    print(f"sensor {n}: {len(gaps) + 1} transmissions, min gap {gaps.min():.4f} s, "
          f"mean gap {gaps.mean():.4f} s, guaranteed >= {report.tau[n]:.4f} s")

print(f"largest |x - xhat| on [20, 30]: {metrics.xi_max:.4g}")
print(f"Lyapunov function never increased at a jump: {report.jump_ok}")

paths = sc.emit_plot_data(trace, OUT / "plots")
print("plot data:", ", ".join(p.name for p in paths))

# the held value of sensor 2 is piecewise constant; its jumps are exactly
# the sensor-2 events
held = trace.hold[:, 1]
changes = np.count_nonzero(np.diff(held))
print(f"sensor 2 held value changed {changes} times "
      f"({metrics.counts[2]} events)")
