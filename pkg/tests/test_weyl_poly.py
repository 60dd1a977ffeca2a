import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from shtvol.errors import PreconditionError, SchemaError
from shtvol.poly import Poly, complete_homogeneous, elementary
from shtvol.weyl_poly import (act, build_root_datum, compose, divided_difference_table, express_in_invariants,
                              partial_derivative, root_datum_from_string, substitute_invariants, weyl_cosets)

FAMILIES = [("gl", 3), ("pgl", 3), ("sl", 3), ("so-odd", 2), ("so-even", 3)]


def random_weyl(rd, rng, length=6):
    w = rd.simple_reflections[0]
    for _ in range(length):
        w = compose(rng.choice(rd.simple_reflections), w)
    return w


def random_poly(n, rng, terms=4, deg=3):
    out = Poly(n)
    for _ in range(terms):
        m = tuple(rng.randint(0, deg) for _ in range(n))
        out = out + Poly.monomial(m, Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
    return out


def test_invariant_degrees():
    assert [d for *_, d in build_root_datum("gl", 3).fundamental_invariants] == [2, 4, 6]
    assert [(n, d) for n, _, d in build_root_datum("so-even", 2).fundamental_invariants] == [("e1^(2)", 4), ("Pf", 4)]
    assert [d for *_, d in build_root_datum("pgl", 2).fundamental_invariants] == [4]
    assert build_root_datum("pgl", 4).pi1_order == 4


def test_family_errors():
    with pytest.raises(SchemaError):
        root_datum_from_string("e8:8")
    with pytest.raises(PreconditionError):
        build_root_datum("so-even", 1)


def test_cosets():
    assert len(weyl_cosets(build_root_datum("gl", 3), (1, 0, 0))) == 3
    assert len(weyl_cosets(build_root_datum("so-odd", 2), (1, 0))) == 4
    assert len(weyl_cosets(build_root_datum("gl", 4), (1, 1, 0, 0))) == 6


def test_act_examples():
    rd = build_root_datum("gl", 2)
    x1, x2 = Poly.var(0, 2), Poly.var(1, 2)
    assert act(rd, rd.simple_reflections[0], x1 ** 2) == x2 ** 2
    so = build_root_datum("so-even", 2)
    pf = Poly.monomial((1, 1))
    # flipping both signs is allowed; flipping one is not
    assert act(so, ((0, 1), (-1, -1)), pf) == pf
    with pytest.raises(PreconditionError):
        act(so, ((0, 1), (-1, 1)), pf)
    odd = build_root_datum("so-odd", 2)
    assert act(odd, ((0, 1), (-1, 1)), pf) == -pf


@pytest.mark.parametrize("fam,n", FAMILIES)
def test_group_action(fam, n):
    rd = build_root_datum(fam, n)
    rng = random.Random(hash((fam, n)) & 0xFFFF)
    for _ in range(10):
        w1, w2 = random_weyl(rd, rng), random_weyl(rd, rng)
        f = random_poly(n, rng)
        assert act(rd, w1, act(rd, w2, f)) == act(rd, compose(w1, w2), f)


@given(st.integers(0, 2 ** 31))
@settings(max_examples=30, deadline=None)
def test_derivation_leibniz(seed):
    rng = random.Random(seed)
    f, g = random_poly(3, rng), random_poly(3, rng)
    mu = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(3)]
    assert partial_derivative(f * g, mu) == partial_derivative(f, mu) * g + f * partial_derivative(g, mu)


def test_partial_derivative_examples():
    n = 4
    for i in range(1, n + 1):
        hat = elementary(i - 1, n, idx=range(1, n))
        assert partial_derivative(elementary(i, n), (1, 0, 0, 0)) == hat
    x = [Poly.var(i, 3) for i in range(3)]
    assert partial_derivative(elementary(2, 3), (1, 1, 0)) == x[0] + x[1] + x[2].scale(2)
    assert partial_derivative(Poly.const(7, 3), (1, 2, 3)).is_zero()


def test_express_examples():
    gl2 = build_root_datum("gl", 2)
    x1, x2 = Poly.var(0, 2), Poly.var(1, 2)
    e1, e2 = Poly.var(0, 2), Poly.var(1, 2)
    assert express_in_invariants(gl2, x1 ** 2 + x2 ** 2) == e1 ** 2 - e2.scale(2)
    so = build_root_datum("so-even", 3)
    got = express_in_invariants(so, elementary(3, 3).substitute([Poly.var(i, 3) ** 2 for i in range(3)]))
    assert got == Poly.var(2, 3) ** 2
    assert express_in_invariants(gl2, Poly.const(7, 2)) == Poly.const(7, 2)
    with pytest.raises(PreconditionError):
        express_in_invariants(gl2, x1)


@pytest.mark.parametrize("fam,n", FAMILIES)
def test_express_roundtrip(fam, n):
    rd = build_root_datum(fam, n)
    rng = random.Random(7)
    k = len(rd.fundamental_invariants)
    for _ in range(200):
        g = Poly(k)
        for _ in range(3):
            m = tuple(rng.randint(0, 2) for _ in range(k))
            if sum(d // 2 * e for (_, _, d), e in zip(rd.fundamental_invariants, m)) <= 8:
                g = g + Poly.monomial(m, rng.randint(-4, 4))
        f = substitute_invariants(rd, g)
        back = express_in_invariants(rd, f)
        assert rd.equal_mod(substitute_invariants(rd, back), f)


def test_divided_differences():
    assert divided_difference_table([0, 0, 0, 1], [0, 1, 2]) == 3
    assert divided_difference_table([0, 1], [0, 1, 2]) == 0
    with pytest.raises(PreconditionError):
        divided_difference_table([1], [1, 1])


@given(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=6), min_size=1, max_size=5, unique=True),
       st.integers(0, 5))
@settings(max_examples=80, deadline=None)
def test_complete_homogeneous_lemma(pts, extra):
    n = len(pts)
    j = n - 1 + extra
    assert divided_difference_table([0] * j + [1], pts) == complete_homogeneous(j - n + 1, n).evaluate(pts)
