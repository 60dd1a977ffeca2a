"""Pushforward along G/P_mu, the derivation nabla, and eigenweights.

The pushforward is the Weyl sum over the orbit of mu

    int f = sum_{nu in W mu} w_nu(f) / r_nu,   r_nu = prod_{<a,nu> < 0} a,

put over the common denominator prod(U) with U the positive roots that are
nonzero on some orbit point, then divided out one linear factor at a time.
Any remainder is an internal error.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .errors import InconsistencyError, PreconditionError, SchemaError
from .linalg import charpoly, matmul, rational_roots, solve
from .poly import Poly
from .weyl_poly import (
    RootDatum,
    act,
    express_in_invariants,
    partial_derivative,
    substitute_invariants,
    weyl_cosets,
)

_COMPLEMENTS: Dict[tuple, tuple] = {}


def _linear(root, n) -> Poly:
    return Poly.linear(list(root) + [0] * (n - len(root)))


def attracting_chern(rd: RootDatum, mu: Sequence, nvars: int | None = None) -> Poly:
    n = nvars or rd.nvars
    out = Poly.const(1, n)
    for a in rd.roots:
        if rd.pair(a, mu) < 0:
            out = out * _linear(a, n)
    return out


def _orbit_data(rd: RootDatum, mu: tuple, nvars: int):
    key = (rd.label, mu, nvars)
    if key in _COMPLEMENTS:
        return _COMPLEMENTS[key]
    cosets = weyl_cosets(rd, mu)
    supports = []
    union = set()
    for w, nu in cosets:
        s_nu = frozenset(b for b in rd.positive_roots if rd.pair(b, nu) != 0)
        sign = (-1) ** sum(1 for b in s_nu if rd.pair(b, nu) > 0)
        supports.append((w, sign, s_nu))
        union |= s_nu
    union = sorted(union)
    terms = []
    for w, sign, s_nu in supports:
        comp = Poly.const(sign, nvars)
        for b in union:
            if b not in s_nu:
                comp = comp * _linear(b, nvars)
        terms.append((w, comp))
    data = (tuple(terms), tuple(union))
    _COMPLEMENTS[key] = data
    return data


def _w_mu_invariant(rd: RootDatum, mu: Sequence, f: Poly) -> Poly:
    """Check W_mu-invariance and return an exactly invariant representative."""
    gens = rd.stabilizer_generators(mu)
    if rd.family in ("SL", "PGL"):
        if not rd.is_invariant(f, gens):
            raise PreconditionError("integrand is not W_mu-invariant modulo e1")
        if all(act(rd, w, f) == f for w in gens):
            return f
        return rd.reynolds(f, mu)
    if not all(act(rd, w, f) == f for w in gens):
        raise PreconditionError("integrand is not W_mu-invariant")
    return f


def integrate_flag(rd: RootDatum, mu: Sequence, f: Poly, check: bool = True) -> Poly:
    """Pushforward of f from R^{W_mu} to R^W."""
    mu = tuple(Fraction(x) for x in mu)
    if f.n < rd.nvars:
        raise SchemaError("integrand has too few variables")
    if check:
        f = _w_mu_invariant(rd, mu, f)
    if f.is_zero():
        return Poly(f.n)
    D = rd.D(mu)
    if f.degree() < D:
        # only components of degree >= D survive
        if all(sum(m) < D for m in f.terms):
            return Poly(f.n)
    terms, union = _orbit_data(rd, mu, f.n)
    num = Poly(f.n)
    for w, comp in terms:
        num = num + act(rd, w, f) * comp
    try:
        for b in union:
            num = num.div_linear(_linear(b, f.n))
    except ArithmeticError as exc:
        raise InconsistencyError(f"Weyl sum did not divide exactly: {exc}")
    return num


def integrate_flag_interpolate(rd: RootDatum, mu: Sequence, f: Poly, seed: int = 0) -> Poly:
    """Cross-check route: evaluate the coset sum at rational points and fit."""
    mu = tuple(Fraction(x) for x in mu)
    f = _w_mu_invariant(rd, mu, f)
    cosets = weyl_cosets(rd, mu)
    D = rd.D(mu)
    rng = random.Random(seed)
    zero_sum = rd.family in ("SL", "PGL")
    degrees = sorted({sum(m) - D for m in f.terms if sum(m) >= D})
    out = Poly(rd.nvars)
    r_mu = attracting_chern(rd, mu)
    for k in degrees:
        part = Poly(f.n, {m: c for m, c in f.terms.items() if sum(m) - D == k})
        basis = rd.generator_monomials(k) if k > 0 else [((0,) * len(rd.fundamental_invariants), Poly.const(1, rd.nvars))]
        npts = len(basis) + 3
        rows, rhs = [], []
        while len(rows) < npts:
            pt = [Fraction(rng.randint(-40, 40), rng.randint(1, 7)) for _ in range(rd.nvars)]
            if zero_sum:
                pt[-1] = -sum(pt[:-1])
            total = Fraction(0)
            ok = True
            for w, _ in cosets:
                den = act(rd, w, r_mu).evaluate(pt)
                if den == 0:
                    ok = False
                    break
                total += Fraction(act(rd, w, part).evaluate(pt)) / den
            if not ok:
                continue
            rows.append([Fraction(p.evaluate(pt)) for _, p in basis])
            rhs.append(total)
        x = solve(rows, rhs)
        if x is None:
            raise InconsistencyError("interpolation system is inconsistent")
        for (e, p), c in zip(basis, x):
            if c:
                out = out + p.scale(c)
    return out


def casimir_direction(rd: RootDatum, mu: Sequence) -> Poly:
    return Poly.linear([Fraction(x) for x in mu])


def nabla(rd: RootDatum, mu: Sequence, eta: Poly, f: Poly) -> Poly:
    """int_{G/P_mu} eta * d_mu f."""
    D = rd.D(mu)
    if not eta.is_zero() and (not eta.is_homogeneous() or eta.degree() != D + 1):
        raise PreconditionError(f"eta must be homogeneous of cohomological degree {2 * (D + 1)}")
    return integrate_flag(rd, mu, eta * partial_derivative(f, mu))


@dataclass
class GrossMotive:
    lines: List[tuple]
    dims: Dict[int, int] = field(default_factory=dict)


def gross_motive(rd: RootDatum) -> GrossMotive:
    lines = sorted(((name, d // 2) for name, _, d in rd.fundamental_invariants), key=lambda t: t[1])
    dims: Dict[int, int] = {}
    for _, d in lines:
        dims[d] = dims.get(d, 0) + 1
    return GrossMotive(lines, dims)


@dataclass
class EigenweightReport:
    names: List[str]
    degrees: List[int]
    matrix: List[list]
    blocks: List[dict]
    eigenvalues: List[Optional[Fraction]]

    def as_dict(self):
        return {
            "generators": [{"name": n, "degree": 2 * d} for n, d in zip(self.names, self.degrees)],
            "blocks": self.blocks,
            "eigenvalues": dict(zip(self.names, self.eigenvalues)),
        }


def nabla_matrix(rd: RootDatum, mu: Sequence, eta: Poly) -> List[list]:
    """Matrix of the induced map on generators mod decomposables (columns = images)."""
    gens = rd.fundamental_invariants
    k = len(gens)
    mat = [[0] * k for _ in range(k)]
    for i, (_, f, _) in enumerate(gens):
        img = express_in_invariants(rd, nabla(rd, mu, eta, f), check=False)
        for j in range(k):
            e = tuple(1 if t == j else 0 for t in range(k))
            mat[j][i] = img.terms.get(e, 0)
    return mat


def eigenweight_report(rd: RootDatum, mu: Sequence, eta: Poly) -> EigenweightReport:
    mu = rd.check_coweight(mu)
    mat = nabla_matrix(rd, mu, eta)
    names = [n for n, _, _ in rd.fundamental_invariants]
    degs = [d // 2 for _, _, d in rd.fundamental_invariants]
    eig: List[Optional[Fraction]] = [None] * len(names)
    blocks = []
    for d in sorted(set(degs)):
        idx = [i for i, x in enumerate(degs) if x == d]
        block = [[mat[a][b] for b in idx] for a in idx]
        for a in range(len(degs)):
            for b in idx:
                if degs[a] != d and mat[a][b] != 0 and degs[a] != d:
                    # nabla preserves degree; cross-degree entries mean a bug
                    raise InconsistencyError("nabla mixed generator degrees")
        cp = charpoly(block)
        roots = rational_roots(cp)
        info = {"degree": 2 * d, "generators": [names[i] for i in idx], "matrix": block,
                "charpoly": cp}
        if len(roots) == len(idx):
            diagonal = all(block[a][b] == 0 for a in range(len(idx)) for b in range(len(idx)) if a != b)
            if diagonal:
                for t, i in enumerate(idx):
                    eig[i] = Fraction(block[t][t])
            else:
                for t, i in enumerate(idx):
                    eig[i] = roots[t]
            info["eigenvalues"] = [eig[i] for i in idx]
        else:
            info["eigenvalues"] = None
        for r in roots:
            if sum(Fraction(c) * r ** k for k, c in enumerate(cp)) != 0:
                raise InconsistencyError("eigenvalue is not a root of the characteristic polynomial")
        blocks.append(info)
    return EigenweightReport(names, degs, mat, blocks, eig)


def legs_commute(rd: RootDatum, legs: Sequence[tuple]) -> bool:
    """Whether the nabla matrices of several (mu, eta) legs commute pairwise."""
    mats = [nabla_matrix(rd, mu, eta) for mu, eta in legs]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if matmul(mats[i], mats[j]) != matmul(mats[j], mats[i]):
                return False
    return True


def degree_constants(rd: RootDatum, mu: Sequence, eta: Poly, eta_prime: Poly, omega=0):
    """(d^omega_mu(eta), d_mu(eta')) as rationals."""
    D = rd.D(mu)
    if not eta.is_zero() and (not eta.is_homogeneous() or eta.degree() != D + 1):
        raise PreconditionError(f"eta must have cohomological degree {2 * (D + 1)}")
    if not eta_prime.is_zero() and (not eta_prime.is_homogeneous() or eta_prime.degree() != D):
        raise PreconditionError(f"eta' must have cohomological degree {2 * D}")
    if rd.semisimple:
        first = Fraction(0)
    else:
        lin = integrate_flag(rd, mu, eta)
        n = rd.nvars
        coeffs = {m.index(1): c for m, c in lin.terms.items()}
        if len(set(coeffs.values())) > 1 or (coeffs and len(coeffs) != n):
            raise InconsistencyError("integral of eta is not a multiple of e1")
        c = next(iter(coeffs.values()), 0)
        first = Fraction(c) * Fraction(omega)
    second = Fraction(rd.reduce(integrate_flag(rd, mu, eta_prime)).constant_term())
    return first, second
