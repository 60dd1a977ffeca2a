import random
from fractions import Fraction

import pytest

from shtvol.errors import PreconditionError
from shtvol.flag_calculus import (attracting_chern, casimir_direction, degree_constants, eigenweight_report,
                                  gross_motive, integrate_flag, integrate_flag_interpolate, legs_commute, nabla)
from shtvol.poly import Poly, elementary
from shtvol.weyl_poly import act, build_root_datum, standard_coweights, weyl_cosets


def x(i, n):
    return Poly.var(i, n)


def test_attracting_chern():
    n = 4
    expect = Poly.const(1, n)
    for j in range(1, n):
        expect = expect * (x(j, n) - x(0, n))
    assert attracting_chern(build_root_datum("gl", n), (1, 0, 0, 0)) == expect
    so = build_root_datum("so-even", 3)
    expect = (x(0, 3) ** 2 - x(1, 3) ** 2) * (x(0, 3) ** 2 - x(2, 3) ** 2)
    assert attracting_chern(so, (1, 0, 0)) == expect
    assert attracting_chern(so, (0, 0, 0)) == Poly.const(1, 3)


def test_integrate_examples():
    gl2 = build_root_datum("gl", 2)
    assert integrate_flag(gl2, (1, 0), x(0, 2) ** 2) == -elementary(1, 2)
    assert integrate_flag(gl2, (1, 0), Poly.const(1, 2)).is_zero()
    with pytest.raises(PreconditionError):
        integrate_flag(build_root_datum("gl", 3), (1, 0, 0), x(1, 3))


def test_integrate_type_d_regression():
    so4 = build_root_datum("so-even", 2)
    mu = (1, 0)
    f = x(0, 2) ** 3 * x(1, 2)
    val = integrate_flag(so4, mu, f)
    assert val == integrate_flag_interpolate(so4, mu, f)
    # direct sum over the four orbit points (+-1, 0), (0, +-1) evaluated at a rational point
    pt = [Fraction(3, 7), Fraction(-5, 2)]
    r = attracting_chern(so4, mu)
    direct = sum(Fraction(act(so4, w, f).evaluate(pt)) / Fraction(act(so4, w, r).evaluate(pt))
                 for w, _ in weyl_cosets(so4, mu))
    assert Fraction(val.evaluate(pt)) == direct != 0
    # x1^2 x2 has no degree-1 invariant to land in
    assert integrate_flag(so4, mu, x(0, 2) ** 2 * x(1, 2)).is_zero()


@pytest.mark.parametrize("fam,n", [("gl", 3), ("pgl", 3), ("so-odd", 2), ("so-even", 3)])
def test_linearity_and_two_paths(fam, n):
    rd = build_root_datum(fam, n)
    rng = random.Random(3)
    for mu in standard_coweights(rd):
        D = rd.D(mu)
        base = attracting_chern(rd, mu) * casimir_direction(rd, mu) ** 2
        for _, g, _ in rd.fundamental_invariants:
            c = rng.randint(1, 5)
            lhs = rd.reduce(integrate_flag(rd, mu, (g * base).scale(c)))
            rhs = rd.reduce((g * integrate_flag(rd, mu, base)).scale(c))
            assert lhs == rhs
        if D:
            f = casimir_direction(rd, mu) ** (D + 1)
            assert rd.equal_mod(integrate_flag(rd, mu, f), integrate_flag_interpolate(rd, mu, f))


def test_nabla_is_derivation():
    rd = build_root_datum("gl", 3)
    mu, eta = (1, 0, 0), x(0, 3) ** 3
    f, g = elementary(2, 3), elementary(3, 3)
    assert nabla(rd, mu, eta, f * g) == nabla(rd, mu, eta, f) * g + f * nabla(rd, mu, eta, g)
    assert nabla(rd, mu, eta, Poly.const(1, 3)).is_zero()
    for i in range(1, 4):
        assert nabla(rd, mu, eta, elementary(i, 3)) == elementary(i, 3)


def test_odd_orthogonal_nabla():
    rd = build_root_datum("so-odd", 2)
    for _, f, _ in rd.fundamental_invariants:
        assert nabla(rd, (1, 0), x(0, 2) ** 4, f) == f.scale(-4)


def test_casimir():
    rd = build_root_datum("gl", 4)
    assert casimir_direction(rd, (1, 1, 0, 0)) == x(0, 4) + x(1, 4)
    assert casimir_direction(rd, (1, 0, 0, 0)) == x(0, 4)
    assert casimir_direction(rd, (0, 0, 0, 0)).is_zero()


def test_gross_motive():
    assert [d for _, d in gross_motive(build_root_datum("gl", 3)).lines] == [1, 2, 3]
    assert [d for _, d in gross_motive(build_root_datum("so-odd", 3)).lines] == [2, 4, 6]
    assert sorted(d for _, d in gross_motive(build_root_datum("so-even", 3)).lines) == [2, 3, 4]


def test_pgl2_eigenweight():
    rd = build_root_datum("pgl", 2)
    assert eigenweight_report(rd, (Fraction(1, 2), Fraction(-1, 2)), x(0, 2) ** 2).eigenvalues == [-1]


def test_symmetries():
    rd = build_root_datum("gl", 3)
    a = eigenweight_report(rd, (1, 0, 0), x(0, 3) ** 3).eigenvalues
    b = eigenweight_report(rd, (0, 0, -1), (-x(2, 3)) ** 3).eigenvalues
    c = eigenweight_report(rd, (0, 1, 0), x(1, 3) ** 3).eigenvalues
    assert a == b == c


def test_degree_constants():
    for n in (2, 3, 4):
        rd = build_root_datum("gl", n)
        eta, etap = x(0, n) ** n, (x(0, n) ** (n - 1)).scale(-5)
        first, second = degree_constants(rd, (1,) + (0,) * (n - 1), eta, etap, omega=3)
        assert first == (-1) ** (n - 1) * 3 and second == (-1) ** n * 5
    pgl = build_root_datum("pgl", 2)
    assert degree_constants(pgl, (Fraction(1, 2), Fraction(-1, 2)), x(0, 2) ** 2, x(0, 2))[0] == 0
    with pytest.raises(PreconditionError):
        degree_constants(pgl, (Fraction(1, 2), Fraction(-1, 2)), x(0, 2) ** 3, Poly(2))


def test_commuting_legs():
    rd = build_root_datum("gl", 2)
    assert legs_commute(rd, [((1, 0), x(0, 2) ** 2), ((0, -1), x(1, 2) ** 2)])
