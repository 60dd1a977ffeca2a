from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from shtvol.errors import PreconditionError, SchemaError
from shtvol.lfunctions import (CurveData, LSeries, apply_leg_operators, canonical_curve, log_derivative_at,
                               synthetic_artin_system, theta_derivative)


def zeta_numeric(q, P):
    def z(s):
        t = mpmath.mpf(q) ** (-s)
        num = sum(c * t ** k for k, c in enumerate(P))
        return num / ((1 - t) * (1 - q * t))
    return z


def numeric_log_derivative(q, P, d):
    # theta L / L = -(log q)^-1 L'(s)/L(s)
    z = zeta_numeric(q, [float(c) for c in P])
    return -mpmath.diff(z, d) / (mpmath.log(q) * z(d))


@pytest.mark.parametrize("name", ["q2g0", "q4g1"])
@pytest.mark.parametrize("d", [2, 3, -1, -2])
def test_log_derivative_against_numeric(name, d):
    c = canonical_curve(name)
    exact = c.log_derivative(d)
    assert abs(float(exact) - float(numeric_log_derivative(c.q, c.P, d))) < 1e-9


def test_pinned_values():
    c = canonical_curve("q2g0")
    # zeta = 1/((1-t)(1-2t)) at t = 1/4
    assert c.zeta_at(2) == Fraction(8, 3)
    assert c.log_derivative(2) == Fraction(4, 3)
    assert canonical_curve("q4g1").zeta_at(2) == Fraction(49, 45)


def test_trace_log_derivative_matches():
    for name in ("q2g0", "q4g1"):
        c = canonical_curve(name)
        for d in (2, 3, -1):
            assert c.trace_log_derivative(d) == c.log_derivative(d)


def test_curve_validation():
    with pytest.raises(SchemaError):
        CurveData.from_json({"q": 4})
    with pytest.raises(PreconditionError):
        CurveData(4, 1, [1, -4])
    with pytest.raises(PreconditionError):
        CurveData(4, 1, [1, -4, 4], frobenius=[[2, 1], [0, 3]])
    with pytest.raises(SchemaError):
        CurveData.from_json("nowhere")


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_theta_is_derivation(num, k):
    num = [1] + num
    L = LSeries(num, [1, -2], 2)
    th = theta_derivative(L, k)
    # compare power series: theta multiplies the t^m coefficient by m
    base = L.series(8)
    assert th.series(8) == [c * m ** k for m, c in enumerate(base)]


def test_log_derivative_at_rational():
    L = LSeries([1], [1, -1], 2, pole_one=1)
    # 1/(1-t) at t = 1/4: theta log = t/(1-t) = 1/3
    assert log_derivative_at(L, 2) == Fraction(1, 3)


def test_single_leg_operator():
    c = canonical_curve("q2g0")
    # one leg c = 0, eps = 1, single line of degree 2: theta zeta(s+2) at s = 0
    val = apply_leg_operators(c, [2], [(0, [1])])
    assert val == c.zeta_at(2) * c.log_derivative(2)
    z = zeta_numeric(2, [1.0])
    assert abs(float(val) - float(-mpmath.diff(z, 2) / mpmath.log(2))) < 1e-9


def test_artin_system():
    A = synthetic_artin_system("s3", [("triv", 1), ("sgn", 1), ("std", 2)], seed=1)
    assert A.order == 6 and A.gX == 7
    X = A.curve_x()
    assert X.g == 7
    for d in (2, 3):
        total = sum(r["dim"] * A.lam(r["name"], d) for r in A.reps)
        assert total == X.log_derivative(d)


def test_weil_bound_on_loaded_curves():
    # 1 - 5t + 4t^2 = (1 - t)(1 - 4t): roots 1 and 4, not of absolute value 2
    with pytest.raises(PreconditionError):
        CurveData.from_json({"q": 4, "g": 1, "h1": [1, -5, 4]})
    assert CurveData.from_json({"q": 4, "g": 2, "h1": [1, 0, 0, 0, 16]}).g == 2
