import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmcv import jets
from pmcv.errors import DimensionError

coord = st.floats(-1.5, 1.5, allow_nan=False)
positive = st.floats(0.2, 3.0, allow_nan=False)


def test_variables_and_derivatives():
    x, y = jets.variables([0.3, -0.7], order=3)
    f = x * x * y
    assert f.value == pytest.approx(0.09 * -0.7)
    g = f.derivatives(1)
    assert g == pytest.approx([2 * 0.3 * -0.7, 0.09])
    H = f.derivatives(2)
    assert H == pytest.approx(np.array([[2 * -0.7, 2 * 0.3], [2 * 0.3, 0.0]]))
    assert f.derivative((2, 1)) == pytest.approx(2.0)
    assert f.derivative((3, 0)) == pytest.approx(0.0)


def test_coefficient_is_normalized_taylor_coefficient():
    (t,) = jets.variables([0.0], order=4)
    e = jets.exp(t)
    assert e.coefficient((3,)) == pytest.approx(1 / 6)
    assert e.derivative((3,)) == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(coord, coord)
def test_product_rule(a, b):
    x, y = jets.variables([a, b], order=2)
    f = jets.sin(x) * y
    g = jets.exp(y) + x * x
    fg = f * g
    expected = f.derivatives(1) * g.value + f.value * g.derivatives(1)
    assert fg.derivatives(1) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(coord, coord)
def test_pythagorean_identity(a, b):
    x, y = jets.variables([a, b], order=4)
    u = x * y + x
    s = jets.sin(u) * jets.sin(u) + jets.cos(u) * jets.cos(u)
    assert s.value == pytest.approx(1.0)
    assert np.abs(s.c[1:]).max() < 1e-12


@settings(max_examples=60, deadline=None)
@given(positive)
def test_exp_log_inverse(a):
    (t,) = jets.variables([a], order=5)
    r = jets.exp(jets.log(t * t))
    assert r.c == pytest.approx((t * t).c, rel=1e-10, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(positive, st.floats(-2.5, 2.5))
def test_power_matches_closed_form(a, p):
    (t,) = jets.variables([a], order=3)
    r = jets.power(t, p)
    d3 = p * (p - 1) * (p - 2) * a ** (p - 3)
    assert r.derivative((3,)) == pytest.approx(d3, rel=1e-9, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(positive)
def test_division_and_sqrt(a):
    (t,) = jets.variables([a], order=3)
    q = (t + 1.0) / t
    assert q.derivative((1,)) == pytest.approx(-1.0 / a**2)
    s = jets.sqrt(t) * jets.sqrt(t)
    assert s.c == pytest.approx(t.c, abs=1e-12)
    assert (jets.reciprocal(t) * t).c == pytest.approx(jets.constant(1.0, t).c, abs=1e-12)


def test_compose_uses_taylor_coefficients():
    (t,) = jets.variables([0.4], order=4)
    u = 2.0 * t
    # outer function exp, Taylor coefficients at u.value
    v = u.value
    derivs = [math.exp(v) / math.factorial(k) for k in range(5)]
    assert u.compose(derivs).c == pytest.approx(jets.exp(u).c)


def test_vector_tails_stack_and_indexing():
    x, y = jets.variables([[0.1, 0.2], [0.3, 0.4]], order=2)  # batch of two points
    v = jets.stack([x, y, x * y])
    assert v.tail == (2, 3)
    assert v.derivatives(1).shape == (2, 3, 2)
    s = (v * v).sum()
    assert s.tail == (2,)
    w = x[..., None] * v  # scalar jet times vector jet
    assert w.value == pytest.approx(x.value[:, None] * v.value)


def test_truncate_and_partial():
    x, y = jets.variables([1.0, 2.0], order=3)
    f = x * x * y
    assert f.truncate(1).order == 1
    df = f.partial(0)
    assert df.order == 2
    assert df.value == pytest.approx(4.0)
    assert df.derivatives(1) == pytest.approx([4.0, 2.0])


def test_jet_arithmetic_entry_point():
    (t,) = jets.variables([0.5], order=2)
    assert jets.jet_arithmetic(t, t, "add").value == pytest.approx(1.0)
    assert jets.jet_arithmetic(t, t, "mul").derivative((1,)) == pytest.approx(1.0)
    assert jets.jet_arithmetic(t, "sin", "compose").value == pytest.approx(math.sin(0.5))


def test_order_limit():
    with pytest.raises(DimensionError):
        jets.variables([0.0], order=jets.MAX_ORDER + 1)
