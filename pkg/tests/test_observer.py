import numpy as np
import pytest

from eventobs.errors import BadInput, InvalidSplit
from eventobs.observer import (FIXTURE_P, OBSERVER_L, IssCertificate, eval_V, iss_gains,
                               luenberger_flow, luenberger_observer, verify_lmi,
                               vertex_matrices)
from eventobs.plant import ROBOT


def _lmi(L, P=FIXTURE_P):
    G1, G2 = vertex_matrices()
    return verify_lmi(P, P @ L, np.eye(4), G1, G2)


def test_fixture_certifies_given_gain():
    rep = _lmi(OBSERVER_L)
    assert rep.feasible
    assert rep.worst <= -1e-6


def test_perturbed_gain_is_rejected():
    L = OBSERVER_L.copy()
    L[0, 1] += 50.0
    rep = _lmi(L)
    assert not rep.feasible
    assert rep.worst > 0


def test_lmi_agrees_with_lapack():
    G1, G2 = vertex_matrices()
    W = FIXTURE_P @ OBSERVER_L
    rep = verify_lmi(FIXTURE_P, W, np.eye(4), G1, G2)
    A, C, P = ROBOT.A, ROBOT.C, FIXTURE_P
    for Gi, w in zip((G1, G2), rep.worst_eigenvalues):
        M = P @ A - W @ C + P @ Gi + Gi.T @ P + A.T @ P - C.T @ W.T + np.eye(4)
        assert w == pytest.approx(np.linalg.eigvalsh(0.5 * (M + M.T))[-1], abs=1e-10)


def test_vertex_matrices_bound_the_nonlinearity():
    G1, G2 = vertex_matrices()
    assert G1[3, 2] == pytest.approx(3.3) and np.allclose(G2, -G1)


def test_verify_lmi_rejects_asymmetric_P():
    G1, G2 = vertex_matrices()
    P = FIXTURE_P.copy()
    P[0, 1] += 1.0
    with pytest.raises(BadInput):
        verify_lmi(P, P @ OBSERVER_L, np.eye(4), G1, G2)


def test_observer_matches_plant_without_error():
    obs = luenberger_observer()
    z = np.array([0.5, -0.2, 1.0, 0.3])
    y = ROBOT.C @ z
    fz = obs.f_o(z, 0.4, y, y)
    assert np.allclose(fz, luenberger_flow(z, 0.4, y))
    assert np.allclose(fz, ROBOT.A @ z + ROBOT.B * 0.4 + ROBOT.G * 3.3 * np.sin(z[2]))


def test_eval_V():
    assert eval_V(np.ones(4), np.ones(4)) == 0.0
    assert eval_V(np.eye(4)[0], np.zeros(4)) == pytest.approx(FIXTURE_P[0, 0])


def test_iss_gains_of_fixture():
    g = iss_gains(IssCertificate())
    lam = np.linalg.eigvalsh(FIXTURE_P)
    assert g.a == pytest.approx((1 - 0.6) / lam[-1])
    assert g.theta.k == pytest.approx(lam[-1] ** 2 / 0.2)
    PL = FIXTURE_P @ OBSERVER_L
    for i in range(2):
        assert g.gamma[i].k == pytest.approx(np.sum(PL[:, i] ** 2) / 0.2)
        assert g.gamma[i].p == 2.0


@pytest.mark.parametrize("split", [(0.5, 0.3, 0.3), (0.0, 0.2, 0.2)])
def test_iss_gains_bad_split(split):
    with pytest.raises(InvalidSplit):
        iss_gains(IssCertificate(c_v=split[0], c_1=split[1], c_2=split[2]))
