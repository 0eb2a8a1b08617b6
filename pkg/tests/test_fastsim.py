import numpy as np
import pytest

from eventobs import analysis as an
from eventobs.fastsim import simulate_robot
from eventobs.hybrid import run_hybrid
from eventobs.loop import BaselineEtm, robot_loop
from eventobs.plant import RobotSignals

from conftest import ETA0, X0


@pytest.mark.parametrize("noisy", [True, False])
def test_matches_generic_engine(noisy, baseline_noisy, baseline_clean):
    loop, tr = baseline_noisy if noisy else baseline_clean
    res = simulate_robot(X0, BaselineEtm(), enable_v=noisy, enable_m=noisy)
    ref = np.array([(t, n) for t, _, n in tr.events])
    assert len(res.event_t) == len(ref)
    assert np.array_equal(res.event_node, ref[:, 1])
    assert np.allclose(res.event_t, ref[:, 0], atol=1e-9)
    assert res.xi_max == pytest.approx(an.ultimate_bound(tr, (20.0, 30.0)), rel=1e-9)
    assert res.E == pytest.approx(an.estimate_E(tr, loop), rel=1e-9)


def test_matches_generic_with_partial_reset():
    etm = BaselineEtm(b=(0.5, 0.25), sigma=(300, 400))
    loop = robot_loop(etm.nodes(), RobotSignals())
    tr = run_hybrid(loop, loop.initial_state([10.0, 5.0, 2.0, 7.0], eta0=ETA0), 8.0, 1e-3)
    res = simulate_robot([10.0, 5.0, 2.0, 7.0], etm, T=8.0, window=(0.0, 8.0),
                         d=(1000.0, 1000.0))
    assert np.allclose(res.event_t, [e[0] for e in tr.events], atol=1e-9)
    assert res.worst_dU < 0


def test_counts_and_no_event_result():
    res = simulate_robot(X0, BaselineEtm(), T=10.0, window=(0.0, 10.0))
    assert res.count() == res.count(1) + res.count(2) > 0
    quiet = simulate_robot(X0, BaselineEtm(epsilon=(1e9, 1e9)), T=1.0, window=(0.0, 1.0))
    assert quiet.count() == 0 and quiet.worst_dU == -np.inf
