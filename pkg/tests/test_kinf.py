import numpy as np
import pytest
from hypothesis import given, strategies as st

from eventobs.kinf import KinfFn


def test_linear_and_quadratic():
    assert KinfFn.linear(2.0)(3.0) == 6.0
    assert KinfFn.quadratic(5.0)(2.0) == 20.0
    assert KinfFn(1.0, 3.0)(2.0) == pytest.approx(8.0)


@pytest.mark.parametrize("k,p", [(0.0, 1.0), (-1.0, 2.0), (1.0, 0.5)])
def test_rejects_non_kinf(k, p):
    with pytest.raises(ValueError):
        KinfFn(k, p)


@given(st.floats(1e-3, 1e3), st.floats(1.0, 4.0), st.floats(0.0, 1e3))
def test_inverse_roundtrip(k, p, s):
    f = KinfFn(k, p)
    assert f.inverse(f(s)) == pytest.approx(s, rel=1e-9, abs=1e-12)


@given(st.floats(1e-3, 1e3), st.floats(1.0, 4.0))
def test_monotone_zero_at_zero(k, p):
    f = KinfFn(k, p)
    s = np.linspace(0.0, 10.0, 50)
    v = f(s)
    assert v[0] == 0.0
    assert np.all(np.diff(v) > 0)


def test_dict_roundtrip():
    f = KinfFn(0.3, 2.0)
    assert KinfFn.from_dict(f.to_dict()) == f
