"""Polynomials, the expression parser and exact linear algebra."""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from shtvol.errors import PreconditionError, SchemaError
from shtvol.expr import parse_poly
from shtvol.linalg import SparseReducer, det, inverse, matmul, rank, identity
from shtvol.poly import Poly, complete_homogeneous, elementary, power_sum

N = 3
coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
mono = st.tuples(*[st.integers(0, 3)] * N)
polys = st.dictionaries(mono, coeff, max_size=5).map(lambda d: Poly(N, d))


@given(polys, polys, polys)
@settings(max_examples=60, deadline=None)
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a and a * b == b * a
    assert a - a == Poly(N)


@given(polys)
@settings(max_examples=60, deadline=None)
def test_expression_roundtrip(p):
    assert parse_poly(p.to_str(), N) == p


@given(polys, polys)
@settings(max_examples=40, deadline=None)
def test_exact_division(a, b):
    if b.is_zero():
        return
    assert (a * b).exact_div(b) == a


def test_parser_grammar():
    x1, x2 = Poly.var(0, 2), Poly.var(1, 2)
    assert parse_poly("x1^4", 2) == x1 ** 4
    assert parse_poly("(x1 + x2)^3 / 2 - 3/4*x2", 2) == (x1 + x2) ** 3 / 2 - x2.scale(Fraction(3, 4))
    assert parse_poly("-x1**2", 2) == -(x1 ** 2)
    assert parse_poly("0.5*x2", 2) == x2.scale(Fraction(1, 2))
    for bad in ["", "x3", "x1^x2", "x1/x2", "(x1", "x1 $ 2", "x1^-1"]:
        with pytest.raises(SchemaError):
            parse_poly(bad, 2)


def test_symmetric_functions():
    # Newton identity p2 = e1^2 - 2 e2 and h2 = e1^2 - e2
    e1, e2 = elementary(1, 3), elementary(2, 3)
    assert power_sum(2, 3) == e1 * e1 - e2.scale(2)
    assert complete_homogeneous(2, 3) == e1 * e1 - e2
    assert complete_homogeneous(-1, 3).is_zero()


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_inverse_and_det(m):
    m = [[Fraction(x) for x in r] for r in m]
    if det(m) == 0:
        with pytest.raises(PreconditionError):
            inverse(m)
        assert rank(m) < 3
    else:
        assert matmul(m, inverse(m)) == identity(3)


@given(st.lists(st.dictionaries(st.integers(0, 6), st.integers(-3, 3), max_size=4), max_size=8))
@settings(max_examples=60, deadline=None)
def test_sparse_reducer_rank(vectors):
    red = SparseReducer()
    for v in vectors:
        red.add({k: Fraction(c) for k, c in v.items()})
    dense = [[Fraction(v.get(k, 0)) for k in range(7)] for v in vectors]
    assert len(red) == (rank(dense) if dense else 0)
    for v in vectors:
        assert red.contains({k: Fraction(c) for k, c in v.items()})
