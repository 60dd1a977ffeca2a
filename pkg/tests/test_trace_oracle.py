from fractions import Fraction

import pytest

from shtvol.errors import PreconditionError
from shtvol.lfunctions import canonical_curve
from shtvol.trace_oracle import (MonomialBasis, compact_support_trace, product_series_trace, tail_certificate,
                                 trace_check, truncated_trace)
from shtvol.volume import LegSpec, volume_split
from shtvol.poly import Poly
from shtvol.weyl_poly import build_root_datum

MU = (Fraction(1, 2), Fraction(-1, 2))


def poincare(g, degrees, dmax):
    # prod over lines of (1 + t^{2d-1})^{2g} / ((1 - t^{2d})(1 - t^{2d-2})), truncated
    ser = [1] + [0] * dmax
    for d in degrees:
        for _ in range(2 * g):
            ser = [ser[i] + (ser[i - 2 * d + 1] if i >= 2 * d - 1 else 0) for i in range(dmax + 1)]
        for e in ([2 * d, 2 * d - 2] if d != 1 else [2]):
            for i in range(e, dmax + 1):
                ser[i] += ser[i - e]
    return ser


@pytest.mark.parametrize("g,degrees", [(0, [1]), (0, [2]), (1, [1]), (1, [1, 2]), (0, [2, 3])])
def test_basis_counts(g, degrees):
    dmax = 14
    b = MonomialBasis(g, degrees, dmax)
    assert [b.count(i) for i in range(dmax + 1)] == poincare(g, degrees, dmax)


def test_basis_rejects_degree_zero():
    with pytest.raises(PreconditionError):
        MonomialBasis(0, [0], 4)


@pytest.mark.parametrize("legs", [[], [(Fraction(0), [[Fraction(-1)]])] * 2, [(Fraction(3), [[Fraction(2)]])]])
def test_three_oracles_agree_genus_zero(legs):
    c = canonical_curve("q2g0")
    a = truncated_trace(c, [2], legs, 24, -3).value
    assert a == product_series_trace(c, [2], legs, 24, -3)
    assert a == compact_support_trace(c, [2], legs, 24, -3)


def test_compact_support_genus_one():
    c = canonical_curve("q4g1")
    legs = [(Fraction(1), [[Fraction(-1)]])]
    assert truncated_trace(c, [2], legs, 16, 0).value == compact_support_trace(c, [2], legs, 16, 0)


def test_product_series_preconditions():
    with pytest.raises(PreconditionError):
        product_series_trace(canonical_curve("q4g1"), [2], [], 8, 0)
    with pytest.raises(PreconditionError):
        product_series_trace(canonical_curve("q2g0"), [1, 2], [(0, [[1, 1], [0, 1]])], 8, 0)


def test_dmax_below_top_degree():
    with pytest.raises(PreconditionError):
        truncated_trace(canonical_curve("q2g0"), [3], [], 4, 0)


def test_tail_certificate():
    terms = [Fraction(1, 2 ** (i // 2)) for i in range(20)]
    rho, tail = tail_certificate(terms, 4)
    assert rho == pytest.approx(0.5) and tail == pytest.approx(float(terms[-1] + terms[-2]))
    rho, tail = tail_certificate([Fraction(i) for i in range(10)], 2)
    assert rho > 1 and tail is None
    assert tail_certificate([Fraction(0)] * 6, 2) == (0.0, 0.0)


def test_sl2_converges_to_zeta():
    rd = build_root_datum("sl", 2)
    run = trace_check(rd, [], canonical_curve("q2g0"), 40)
    closed = volume_split(rd, [], canonical_curve("q2g0")).value
    assert run.agrees_with(closed) and run.ratio < 1
    assert abs(float(closed - run.value)) <= 2 * run.tail_bound + 1e-12


def test_worker_parity(monkeypatch):
    rd = build_root_datum("pgl", 2)
    legs = [LegSpec(MU, Poly.var(0, 2) ** 2, Poly(2))] * 2
    c = canonical_curve("q4g1")
    monkeypatch.setenv("SHTVOL_WORKERS", "1")
    serial = trace_check(rd, legs, c, 16)
    monkeypatch.setenv("SHTVOL_WORKERS", "3")
    parallel = trace_check(rd, legs, c, 16)
    assert serial.terms == parallel.terms


def test_missing_frobenius():
    from shtvol.lfunctions import CurveData

    c = CurveData.from_json({"q": 4, "g": 2, "h1": [1, 0, 0, 0, 16]})
    with pytest.raises(PreconditionError):
        truncated_trace(c, [2], [], 8, 0)
    with pytest.raises(PreconditionError):
        compact_support_trace(c, [2], [], 8, 0)
