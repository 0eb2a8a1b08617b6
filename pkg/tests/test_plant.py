import numpy as np
import pytest

from eventobs.plant import (ROBOT, FunctionSignals, RobotSignals, error_flow,
                            exogenous_signals, robot_arm, robot_flow)


def test_robot_flow_at_initial_state():
    dx = robot_flow(np.array([3.0, 2.0, 3.0, -2.0]), 0.0)
    assert dx[0] == 2.0
    assert dx[1] == pytest.approx(-2.5)
    assert dx[3] == pytest.approx(19.5 * 3 - 19.5 * 3 - 3.3 * np.sin(3.0))


def test_origin_is_equilibrium():
    assert np.all(robot_flow(np.zeros(4), 0.0) == 0.0)


def test_error_flow_picks_output_rows():
    plant = robot_arm()
    x = np.array([0.3, -1.0, 2.0, 0.5])
    dx = plant.f(x, 0.7, np.zeros(4))
    assert error_flow(plant, x, 0.7, np.zeros(4), 1) == pytest.approx(-dx[:1])
    assert error_flow(plant, x, 0.7, np.zeros(4), 2) == pytest.approx(-dx[1:2])


def test_jacobian_matches_finite_differences():
    plant = robot_arm()
    x = np.array([0.1, 0.2, -0.3, 0.4])
    h = 1e-6
    fd = np.column_stack([(plant.h(x + h * e) - plant.h(x - h * e)) / (2 * h)
                          for e in np.eye(4)])
    assert np.allclose(fd, plant.jac(x), atol=1e-9)


def test_partition_bookkeeping():
    plant = robot_arm()
    assert plant.n_y == 2 and plant.n_nodes == 2
    assert plant.node_slice(2) == slice(1, 2)


def test_signals():
    sig = RobotSignals()
    t = 1.7
    assert sig.u(t) == np.sin(t)
    assert np.allclose(sig.v(t), 0.02 * np.sin(0.4 * t) * np.array([0, 1, 0, 1]))
    assert np.allclose(sig.m(t), [0.0, 0.01 * np.sin(0.3 * t)])
    assert sig.v_sup() == pytest.approx(0.02 * np.sqrt(2))
    assert np.allclose(sig.m_bounds(), [0.0, 0.01])
    h = 1e-6
    assert np.allclose(sig.m_dot(t), (sig.m(t + h) - sig.m(t - h)) / (2 * h), atol=1e-9)
    quiet = RobotSignals(enable_v=False, enable_m=False)
    assert not quiet.v(t).any() and not quiet.m(t).any() and quiet.v_sup() == 0.0


def test_exogenous_signals_tuple():
    u, v, m = exogenous_signals(0.0)
    assert u == 0.0 and not v.any() and not m.any()


def test_function_signals_defaults():
    sig = FunctionSignals(n_u=1, n_v=2, n_y=1)
    assert sig.u(3.0) == 0.0
    assert sig.v(3.0).shape == (2,)
    assert sig.m_bounds().tolist() == [0.0]


def test_robot_params_default_shapes():
    assert ROBOT.A.shape == (4, 4) and ROBOT.C.shape == (2, 4)
