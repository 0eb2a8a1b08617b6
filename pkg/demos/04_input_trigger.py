"""Triggering the actuator channel as well as the sensors.

The input u = sin t reaches the plant through a zero-order hold whose
own ETM (node 0) transmits when |ubar - u| >= 0.5.  Starting from
ubar = u(0) = 0 the first input transmission must happen at t = pi/6.
"""
import math

from eventobs import analysis as an
from eventobs.etm import NodeEtmParams, validate_theorem1
from eventobs.hybrid import run_hybrid
from eventobs.kinf import KinfFn
from eventobs.loop import BaselineEtm, robot_loop
from eventobs.observer import FIXTURE_P
from eventobs.plant import RobotSignals

inp = NodeEtmParams(sigma=0.0, c=0.0, b=1.0, epsilon=0.5, gamma=KinfFn.linear(1.0))
loop = robot_loop(BaselineEtm().nodes(), RobotSignals(), input_params=inp)
trace = run_hybrid(loop, loop.initial_state([3, 2, 3, -2], eta0=[10, 10]), 30.0, 1e-3)

t_in = trace.event_times(0)
print(f"first input transmission at {t_in[0]:.10f} (pi/6 = {math.pi / 6:.10f})")
print(f"input transmissions: {len(t_in)}, sensor transmissions: "
      f"{len(trace.event_times(1))} + {len(trace.event_times(2))}")

d = validate_theorem1([600, 800, 0], [0.001, 0.001, 0], [10, 10, 0.5]).d
rep = an.certificate_report(trace, loop, FIXTURE_P, d)
print(f"jump check {rep.jump_ok}, inter-event check {rep.iet_ok}, "
      f"dwell-time excess {rep.adt_worst:.3g}")
