"""From an LMI certificate to triggering parameters with a guaranteed decay.

1. Check the shipped Lyapunov matrix P against the observer gain L.
2. Turn it into ISS gains (decay rate a, gains theta and gamma_i).
3. Ask for half of that decay rate and let the design pick alpha_i, d_i
   and the epsilon budget.
4. Simulate and confirm U = V + sum d_i eta_i stays below
   exp(-a_U t) U(0) + mu + theta(|v|) / a_U.
"""
import numpy as np

from eventobs import analysis as an
from eventobs.etm import design_theorem3
from eventobs.hybrid import run_hybrid
from eventobs.loop import robot_loop
from eventobs.observer import (FIXTURE_P, OBSERVER_L, IssCertificate, iss_gains, verify_lmi,
                               vertex_matrices)
from eventobs.plant import RobotSignals

G1, G2 = vertex_matrices()
lmi = verify_lmi(FIXTURE_P, FIXTURE_P @ OBSERVER_L, np.eye(4), G1, G2)
print(f"LMI feasible: {lmi.feasible}, worst eigenvalue {lmi.worst:.4g}")

L_bad = OBSERVER_L.copy()
L_bad[0, 1] += 50.0
print("perturbed gain feasible:",
      verify_lmi(FIXTURE_P, FIXTURE_P @ L_bad, np.eye(4), G1, G2).feasible)

gains = iss_gains(IssCertificate())
print(f"certified decay a = {gains.a:.4f}; gamma_1 = {gains.gamma[0].k:.1f} s^2, "
      f"gamma_2 = {gains.gamma[1].k:.1f} s^2")

design = design_theorem3(gains.a, 0.5 * gains.a, mu=1.0, sigma_star=[600, 800],
                         c_star=[0.001, 0.001])
print(f"design: a* = {np.round(design.a_star, 4)}, d = {design.d}, "
      f"eps budget = {design.eps_budget:.3g}")

nodes = design.node_params(gains.gamma)
loop = robot_loop(nodes, RobotSignals(enable_m=False))
trace = run_hybrid(loop, loop.initial_state([3, 2, 3, -2], eta0=[10, 10]), 30.0, 1e-3)
env = an.verify_theorem3_envelope(trace, design, gains.theta, FIXTURE_P,
                                  loop.signals.v_sup())
print(f"{len(trace.events)} transmissions; envelope worst excess {env.worst:.3g} "
      f"(passes: {env.passed})")
