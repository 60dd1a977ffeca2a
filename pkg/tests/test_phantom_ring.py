import itertools
import random
from fractions import Fraction

import pytest

from shtvol.characters import build_group
from shtvol.errors import PreconditionError
from shtvol.lfunctions import canonical_curve, synthetic_artin_system
from shtvol.phantom_ring import (CurveCohomology, build_phantom, build_phantom_sigma, build_sigma_ring,
                                 colmez_eta_coefficient, diagonal_constants, difg_check, duality_report,
                                 eta_cases_check, factorization_check, frobenius_weights, invariant_decomposition,
                                 nilpotence_check, pgl_sign_coweight, pgl_t_classes, relation_generators,
                                 restriction_check, ring_report, xi_class, xi_class_components, xi_class_right,
                                 xi_star0, xi_star1)
from shtvol.poly import Poly
from shtvol.volume import LegSpec, volume_colmez, volume_split
from shtvol.weyl_poly import build_root_datum

PLUS = pgl_sign_coweight(2, "sharp")


@pytest.fixture(scope="module")
def pgl2_rings():
    rd = build_root_datum("pgl", 2)
    return {name: build_phantom(rd, [PLUS, PLUS], canonical_curve(name)) for name in ("q2g0", "q4g1")}


def test_xi_genus_zero():
    coh = CurveCohomology(canonical_curve("q2g0"))
    xi = xi_class(coh, 2)
    assert xi.as_dict() == {"1*xi": Fraction(1, 3), "xi*1": Fraction(1)}
    assert xi.xi_coefficient_on_diagonal() == Fraction(4, 3)
    with pytest.raises(PreconditionError):
        xi_class(coh, 1)
    with pytest.raises(PreconditionError):
        xi_class_right(coh, 0)


@pytest.mark.parametrize("d", [2, 3, -1, -2])
def test_xi_routes_agree(d):
    coh = CurveCohomology(canonical_curve("q4g1"))
    left = xi_class(coh, d)
    assert left == xi_class_right(coh, d) == xi_class_components(coh, d)
    # the diagonal coefficient is the zeta log-derivative
    assert left.xi_coefficient_on_diagonal() == canonical_curve("q4g1").log_derivative(d)


def test_xi_genus_one_middle():
    coh = CurveCohomology(canonical_curve("q4g1"))
    mid = [v for (a, b), v in xi_class(coh, 2).terms.items() if a not in (0, coh.XI)]
    assert sorted(abs(v) for v in mid) == [Fraction(1, 7)] * 2


def test_xi_star_genus_zero():
    # Delta - xi(x)1 = 1(x)xi, and (phi - 1)^-1 xi = xi / (q - 1); likewise (phi / q - 1)^-1 1 = 1 / (1/q - 1)
    coh = CurveCohomology(canonical_curve("q2g0"))
    assert xi_star1(coh).as_dict() == {"1*xi": Fraction(1)}
    assert xi_star0(coh).as_dict() == {"xi*1": Fraction(-2)}


def test_relations_are_eigenvectors():
    rd = build_root_datum("gl", 2)
    gens = relation_generators(rd, [(1, 0), (0, -1)], canonical_curve("q4g1"))
    assert [(label, w) for label, w, _ in gens] == [("D*_1(e1)", 1), ("D_1(e2)", 2), ("D*_2(e1)", 1), ("D_2(e2)", 2)]
    with pytest.raises(PreconditionError):
        relation_generators(build_root_datum("pgl", 2), [PLUS], canonical_curve("q2g0"))


def test_gl1_two_legs_omega():
    rd = build_root_datum("gl", 1)
    c = canonical_curve("q4g1")
    plain = build_phantom(rd, [(1,), (-1,)], c)
    twisted = build_phantom(rd, [(1,), (-1,)], c, omega=(3,))
    assert plain.dims() == twisted.dims() == [1, 4, 6, 4, 1]
    # the omega term only enters the D* relation
    a = {label: e for label, _, e in plain.generators}
    b = {label: e for label, _, e in twisted.generators}
    assert a["D*_1(e1)"] != b["D*_1(e1)"]


def test_pgl2_structure(pgl2_rings):
    assert pgl2_rings["q2g0"].dims() == [1, 0, 4, 0, 6, 0, 4, 0, 1]
    assert pgl2_rings["q4g1"].dims() == [1, 4, 8, 12, 14, 12, 8, 4, 1]
    for name, ring in pgl2_rings.items():
        rep = ring_report(ring)
        assert rep["free_over_HXr"] and rep["duality"]["perfect"]
    assert duality_report(pgl2_rings["q2g0"])["volume_of_top_class"] == Fraction(1, 3)
    assert duality_report(pgl2_rings["q4g1"])["volume_of_top_class"] == Fraction(49, 45)


@pytest.mark.parametrize("name", ["q2g0", "q4g1"])
def test_balanced_class_matches_split_volume(name, pgl2_rings):
    ring = pgl2_rings[name]
    rd = ring.rd
    x = Poly.var(0, 2)
    for etap in (Poly(2), x.scale(3)):
        legs = [LegSpec(PLUS, x ** 2, etap), LegSpec(PLUS, x ** 2, Poly(2))]
        closed = volume_split(rd, legs, ring.curve).value
        assert ring.volume(ring.balanced_class(legs)) == closed


def test_frobenius_weights_and_factorization(pgl2_rings):
    ring = pgl2_rings["q4g1"]
    w = frobenius_weights(ring)
    # pure of weight k in degree k: eigenvalue q^{k/2} = 2^k
    assert w and all(v == 2 ** k for k, ws in w.items() for v in ws)
    x = Poly.var(0, 2)
    assert factorization_check(ring, ring.amb.mul(ring.amb.leg_poly(0, x), ring.amb.leg_poly(1, x)))


def test_restriction_genus_zero(pgl2_rings):
    ring = pgl2_rings["q2g0"]
    consts = diagonal_constants(ring.curve, 2, [2])
    assert consts[2][0][0] == ring.curve.log_derivative(2) == Fraction(4, 3)
    sr = build_sigma_ring(ring.rd, [PLUS, PLUS], 2, consts)
    assert restriction_check(ring, sr)
    with pytest.raises(PreconditionError):
        restriction_check(build_phantom(ring.rd, [PLUS, PLUS], canonical_curve("q4g1")), sr)


def test_difg():
    rd = build_root_datum("gl", 2)
    x = Poly.var(0, 2)
    e1, e2 = x + Poly.var(1, 2), x * Poly.var(1, 2)
    assert difg_check(rd, [(1, 0), (0, -1)], canonical_curve("q2g0"), e2, e2, 0)
    assert difg_check(rd, [(1, 0), (0, -1)], canonical_curve("q4g1"), e1 * e1, e2, 1)


@pytest.mark.parametrize("n,r", [(2, 2), (3, 2), (2, 3)])
def test_restricted_ring_lemmas(n, r):
    rng = random.Random(n * 10 + r)
    G = build_group("s3")
    A = synthetic_artin_system("s3", [("triv", 1), ("sgn", 1), ("std", 2)], seed=3)
    rd = build_root_datum("pgl", n)
    sigma = [rng.choice(G.elements) for _ in range(r)]
    signs = [rng.choice(["sharp", "flat"]) for _ in range(r)]
    ring = build_phantom_sigma(rd, [pgl_sign_coweight(n, s) for s in signs], G, sigma, A)
    a, _ = volume_colmez(n, signs, G, sigma, A)
    assert colmez_eta_coefficient(ring, signs) == a.breakdown["bracket"]
    ts = pgl_t_classes(rd, signs)
    tot = (n - 1) * r + 1
    cases = set()
    for ns in itertools.product(range(tot + 1), repeat=r):
        if sum(ns) == tot:
            rep = eta_cases_check(ring, [t ** k for t, k in zip(ts, ns)])
            assert rep["ok"], rep
            cases.add(rep["case"])
    assert 4 in cases
    f = rd.fundamental_invariants[0][1]
    assert all(nilpotence_check(ring, f, f, i, j) for i in range(r) for j in range(r))


def test_invariant_decomposition():
    rd = build_root_datum("pgl", 3)
    mu = pgl_sign_coweight(3, "sharp")
    f = rd.fundamental_invariants[0][1]
    x = Poly.var(0, 3)
    parts = invariant_decomposition(rd, mu, f * x)
    assert parts and parts[0][0] == 0
    with pytest.raises(PreconditionError):
        invariant_decomposition(rd, mu, x)
