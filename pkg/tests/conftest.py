import numpy as np
import pytest

from eventobs.hybrid import run_hybrid
from eventobs.loop import BaselineEtm, robot_loop
from eventobs.plant import RobotSignals

X0 = np.array([3.0, 2.0, 3.0, -2.0])
ETA0 = np.array([10.0, 10.0])


class ScalarRamp:
    """Synthetic hybrid system: ``e' = rate``, one or more identical nodes.

    State layout ``(x, z, e_1..e_n, eta_1..eta_n, hold_1..hold_n)`` with
    one-dimensional x and z that stay constant.
    """

    def __init__(self, n=1, rate=1.0, eps=0.5, sigma=0.0, b=1.0):
        from eventobs.hybrid import StateLayout
        self.layout = StateLayout(1, 1, (1,) * n, tuple(range(1, n + 1)))
        self.node_ids = self.layout.node_ids
        self.n, self.rate, self.eps, self.sigma, self.b = n, rate, eps, sigma, b

    def flow(self, t, q):
        out = np.zeros_like(q)
        out[self.layout.e] = self.rate
        return out

    def margins(self, t, q):
        return np.abs(q[self.layout.e]) - self.sigma * q[self.layout.eta] - self.eps

    def jump(self, t, q, node):
        out = q.copy()
        out[self.layout.node_e(node)] = 0.0
        out[self.layout.node_eta(node)] *= self.b
        return out

    def q0(self, e=0.0, eta=0.0):
        return np.concatenate([[0.0, 0.0], np.full(self.n, e), np.full(self.n, eta),
                               np.zeros(self.n)])


@pytest.fixture
def scalar_ramp():
    return ScalarRamp


@pytest.fixture(scope="session")
def baseline_clean():
    loop = robot_loop(BaselineEtm().nodes(), RobotSignals(enable_v=False, enable_m=False))
    trace = run_hybrid(loop, loop.initial_state(X0, eta0=ETA0), 30.0, 1e-3)
    return loop, trace


@pytest.fixture(scope="session")
def baseline_noisy():
    loop = robot_loop(BaselineEtm().nodes(), RobotSignals())
    trace = run_hybrid(loop, loop.initial_state(X0, eta0=ETA0), 30.0, 1e-3)
    return loop, trace


ACCEPTANCE = {}


def record(criterion, ok, detail):
    """Store one acceptance verdict; printed in the terminal summary."""
    ACCEPTANCE[criterion] = (bool(ok), detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
