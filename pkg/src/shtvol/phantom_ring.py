"""The phantom tautological ring, built degree by degree with exact linear algebra.

Ambient ring: tensor over legs i of H*(X) (x) R^{W_mu_i}.  An element is a
dict keyed by (monomial, curve tuple): the monomial concatenates the leg
variables and the curve tuple lists one H*(X) basis index per curve slot.
H*(X) basis order is 1, zeta_1..zeta_2g, xi.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence

from .errors import InconsistencyError, PreconditionError
from .flag_calculus import integrate_flag
from .linalg import SparseReducer, charpoly, det, inverse, matmul, rational_roots, rref, transpose
from .poly import Poly
from .weyl_poly import RootDatum, partial_derivative, weyl_cosets

Elt = Dict[tuple, Fraction]


def _clean(x: Elt) -> Elt:
    return {k: v for k, v in x.items() if v}


def _add(x: Elt, y: Elt, c=1) -> Elt:
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0) + c * v
    return _clean(out)


def _scale(x: Elt, c) -> Elt:
    return _clean({k: v * c for k, v in x.items()})


# curve cohomology

class CurveCohomology:
    """H*(X) with cup product, Frobenius and the diagonal class."""

    def __init__(self, curve):
        self.curve = curve
        self.q = curve.q
        self.g = curve.g
        g = self.g
        if g and curve.F is None:
            raise PreconditionError("curve cohomology needs an explicit Frobenius matrix")
        self.F = [[Fraction(x) for x in r] for r in (curve.F or [])]
        self.J = [[Fraction(x) for x in r] for r in (curve.J or [])]
        self.dim = 2 * g + 2
        self.XI = 2 * g + 1
        self.degrees = [0] + [1] * (2 * g) + [2]
        self.M = inverse(self.J) if g else []

    def label(self, a: int) -> str:
        if a == 0:
            return "1"
        if a == self.XI:
            return "xi"
        return f"zeta{a}"

    def mul(self, a: int, b: int):
        """Product of basis classes as (coefficient, index) or None."""
        if a == 0:
            return 1, b
        if b == 0:
            return 1, a
        if a == self.XI or b == self.XI:
            return None
        c = self.J[a - 1][b - 1]
        return (c, self.XI) if c else None

    def frobenius(self, a: int) -> Dict[int, Fraction]:
        if a == 0:
            return {0: Fraction(1)}
        if a == self.XI:
            return {a: Fraction(self.q)}
        col = a - 1
        return {row + 1: self.F[row][col] for row in range(2 * self.g) if self.F[row][col]}

    def integral(self, a: int) -> Fraction:
        return Fraction(1) if a == self.XI else Fraction(0)

    def diagonal(self) -> "KunnethClass":
        """[Delta] = 1 (x) xi - sum_j zeta_j (x) zeta^j + xi (x) 1 with int zeta_i zeta^j = delta_ij."""
        t = {(0, self.XI): Fraction(1), (self.XI, 0): Fraction(1)}
        for j in range(2 * self.g):
            for l in range(2 * self.g):
                c = self.M[l][j]
                if c:
                    t[(j + 1, l + 1)] = t.get((j + 1, l + 1), 0) - c
        return KunnethClass(self, _clean(t))

    def resolvent(self, c, k: int, a: int, allow_singular_on=()) -> Dict[int, Fraction]:
        """(c Phi^k - 1)^-1 applied to basis class a (k = +-1)."""
        c = Fraction(c)
        if a == 0:
            den = c - 1
        elif a == self.XI:
            den = c * Fraction(self.q) ** k - 1
        else:
            g2 = 2 * self.g
            Fk = self.F if k == 1 else inverse(self.F)
            mat = [[c * Fk[i][j] - (1 if i == j else 0) for j in range(g2)] for i in range(g2)]
            inv = inverse(mat)
            col = a - 1
            return {row + 1: Fraction(inv[row][col]) for row in range(g2) if inv[row][col]}
        if den == 0:
            raise PreconditionError("resolvent is singular on this class")
        return {a: 1 / den}


class EvenCurve:
    """Q[xi]/(xi^2): the even part of H*(X) generated by the point class."""

    def __init__(self, q: int):
        self.q = q
        self.dim = 2
        self.XI = 1
        self.degrees = [0, 2]

    def label(self, a):
        return "1" if a == 0 else "xi"

    def mul(self, a, b):
        if a == 0:
            return 1, b
        if b == 0:
            return 1, a
        return None

    def frobenius(self, a):
        return {a: Fraction(self.q) if a else Fraction(1)}

    def integral(self, a):
        return Fraction(1) if a == self.XI else Fraction(0)


class KunnethClass:
    """An element of H*(X x X) in the Kunneth basis: dict (a, b) -> coefficient."""

    def __init__(self, coh: CurveCohomology, terms: Dict[tuple, Fraction]):
        self.coh = coh
        self.terms = _clean(terms)

    def __eq__(self, other):
        return isinstance(other, KunnethClass) and self.terms == other.terms

    def __add__(self, other):
        return KunnethClass(self.coh, _add(self.terms, other.terms))

    def __sub__(self, other):
        return KunnethClass(self.coh, _add(self.terms, other.terms, -1))

    def apply(self, side: int, op: Callable[[int], Dict[int, Fraction]]) -> "KunnethClass":
        out: Dict[tuple, Fraction] = {}
        for (a, b), c in self.terms.items():
            src = a if side == 0 else b
            for t, v in op(src).items():
                key = (t, b) if side == 0 else (a, t)
                out[key] = out.get(key, 0) + c * v
        return KunnethClass(self.coh, out)

    def diagonal_pullback(self) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for (a, b), c in self.terms.items():
            m = self.coh.mul(a, b)
            if m:
                out[m[1]] = out.get(m[1], 0) + c * m[0]
        return _clean(out)

    def xi_coefficient_on_diagonal(self) -> Fraction:
        return self.diagonal_pullback().get(self.coh.XI, Fraction(0))

    def as_dict(self):
        return {f"{self.coh.label(a)}*{self.coh.label(b)}": v for (a, b), v in sorted(self.terms.items())}


def xi_class(coh: CurveCohomology, d: int) -> KunnethClass:
    """Xi_d = ((q^d phi^-1 - 1)^-1 (x) id)[Delta]."""
    if d in (0, 1):
        raise PreconditionError("Xi_d is defined for d not in {0, 1}")
    q = coh.q
    return coh.diagonal().apply(0, lambda a: coh.resolvent(Fraction(q) ** d, -1, a))


def xi_class_right(coh: CurveCohomology, d: int) -> KunnethClass:
    """The same class as (id (x) (q^{d-1} phi - 1)^-1)[Delta]."""
    if d in (0, 1):
        raise PreconditionError("Xi_d is defined for d not in {0, 1}")
    return coh.diagonal().apply(1, lambda a: coh.resolvent(Fraction(coh.q) ** (d - 1), 1, a))


def xi_star1(coh: CurveCohomology) -> KunnethClass:
    base = coh.diagonal() - KunnethClass(coh, {(coh.XI, 0): Fraction(1)})
    return base.apply(1, lambda a: coh.resolvent(1, 1, a))


def xi_star0(coh: CurveCohomology) -> KunnethClass:
    base = coh.diagonal() - KunnethClass(coh, {(0, coh.XI): Fraction(1)})
    return base.apply(1, lambda a: coh.resolvent(Fraction(1, coh.q), 1, a))


def _nullspace(mat):
    n = len(mat[0]) if mat else 0
    m, piv = rref(mat)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -m[r][f]
        basis.append(v)
    return basis


def xi_class_components(coh: CurveCohomology, d: int) -> Optional[KunnethClass]:
    """Xi_d from the eigenbasis formula, or None if Frobenius is not diagonalisable over Q."""
    q = coh.q
    g2 = 2 * coh.g
    t = {(0, coh.XI): 1 / (Fraction(q) ** d - 1), (coh.XI, 0): 1 / (Fraction(q) ** (d - 1) - 1)}
    if g2:
        eig = sorted(set(rational_roots(charpoly(coh.F))))
        vecs, alphas = [], []
        for a in eig:
            ns = _nullspace([[coh.F[i][j] - (a if i == j else 0) for j in range(g2)] for i in range(g2)])
            vecs += ns
            alphas += [a] * len(ns)
        if len(vecs) < g2:
            return None
        P = transpose(vecs)  # columns are eigenvectors zeta'_j
        # dual basis zeta'^j with int zeta'_i zeta'^j = delta_ij: columns of (P^T J)^-1
        Q = inverse(matmul(transpose(P), coh.J))
        for j in range(g2):
            coeff = 1 / (1 - alphas[j] * Fraction(q) ** (d - 1))
            for a in range(g2):
                for b in range(g2):
                    v = coeff * P[a][j] * Q[b][j]
                    if v:
                        t[(a + 1, b + 1)] = t.get((a + 1, b + 1), 0) + v
    return KunnethClass(coh, _clean(t))


def c1_tangent(coh) -> Dict[int, Fraction]:
    return {coh.XI: Fraction(2 - 2 * coh.g)} if coh.g != 1 else {}


# ambient ring

class Ambient:
    """Graded-commutative ring (tensor of curve slots) (x) Q[leg variables]."""

    def __init__(self, alg, slots: int, nlegs: int, m: int):
        self.alg = alg
        self.slots = slots
        self.nlegs = nlegs
        self.m = m
        self.nv = nlegs * m

    def one(self) -> Elt:
        return {((0,) * self.nv, (0,) * self.slots): Fraction(1)}

    def degree(self, key) -> int:
        mono, cur = key
        return 2 * sum(mono) + sum(self.alg.degrees[a] for a in cur)

    def parity(self, cur) -> int:
        return sum(self.alg.degrees[a] for a in cur) % 2

    def _mul_keys(self, k1, k2):
        (m1, c1), (m2, c2) = k1, k2
        coeff = 1
        sign = 0
        deg = self.alg.degrees
        cur = []
        for i in range(self.slots):
            if deg[c2[i]] % 2:
                sign += sum(deg[c1[j]] for j in range(i + 1, self.slots))
            r = self.alg.mul(c1[i], c2[i])
            if r is None:
                return None
            coeff *= r[0]
            cur.append(r[1])
        if sign % 2:
            coeff = -coeff
        return coeff, (tuple(a + b for a, b in zip(m1, m2)), tuple(cur))

    def mul(self, x: Elt, y: Elt) -> Elt:
        out: Dict[tuple, Fraction] = {}
        for k1, v1 in x.items():
            for k2, v2 in y.items():
                r = self._mul_keys(k1, k2)
                if r:
                    c, k = r
                    out[k] = out.get(k, 0) + c * v1 * v2
        return _clean(out)

    def leg_poly(self, i: int, p: Poly) -> Elt:
        cur = (0,) * self.slots
        out = {}
        for mono, c in p.terms.items():
            mm = [0] * self.nv
            mm[i * self.m:i * self.m + len(mono)] = mono
            out[(tuple(mm), cur)] = Fraction(c)
        return _clean(out)

    def curve_class(self, slot: int, a: int, c=1) -> Elt:
        cur = [0] * self.slots
        cur[slot] = a
        return {((0,) * self.nv, tuple(cur)): Fraction(c)}

    def curve_vector(self, slot: int, vec: Dict[int, Fraction]) -> Elt:
        out = {}
        for a, c in vec.items():
            out = _add(out, self.curve_class(slot, a, c))
        return out

    def kunneth(self, xi: KunnethClass, i: int, j: int) -> Elt:
        """[Xi]_{i,j} for i <= j; i = j means the diagonal pullback at slot i."""
        if i == j:
            return self.curve_vector(i, xi.diagonal_pullback())
        if i > j:
            raise PreconditionError("[Xi]_{i,j} needs i <= j")
        out = {}
        for (a, b), c in xi.terms.items():
            cur = [0] * self.slots
            cur[i], cur[j] = a, b
            key = ((0,) * self.nv, tuple(cur))
            out[key] = out.get(key, 0) + c
        return _clean(out)

    def frobenius(self, x: Elt) -> Elt:
        out: Dict[tuple, Fraction] = {}
        for (mono, cur), v in x.items():
            partial = {cur: Fraction(v) * Fraction(self.alg.q) ** sum(mono)}
            for s in range(self.slots):
                nxt = {}
                for c, w in partial.items():
                    for t, u in self.alg.frobenius(c[s]).items():
                        cc = c[:s] + (t,) + c[s + 1:]
                        nxt[cc] = nxt.get(cc, 0) + w * u
                partial = nxt
            for c, w in partial.items():
                out[(mono, c)] = out.get((mono, c), 0) + w
        return _clean(out)

    def homogeneous(self, x: Elt) -> Optional[int]:
        degs = {self.degree(k) for k in x}
        return degs.pop() if len(degs) == 1 else (None if degs else 0)

    def restrict_diagonal(self, x: Elt, target: "Ambient") -> Elt:
        """Pull back along the small diagonal X -> X^slots (target has one slot)."""
        out: Dict[tuple, Fraction] = {}
        for (mono, cur), v in x.items():
            coeff, acc = Fraction(v), 0
            for a in cur:
                r = self.alg.mul(acc, a)
                if r is None:
                    coeff = 0
                    break
                coeff *= r[0]
                acc = r[1]
            if coeff:
                key = (mono, (acc,))
                out[key] = out.get(key, 0) + coeff
        return _clean(out)


# invariant polynomial bases

_LEG_BASIS: Dict[tuple, List[Poly]] = {}


def leg_basis(rd: RootDatum, mu: Sequence, k: int) -> List[Poly]:
    """Basis of R^{W_mu} in polynomial degree k (reduced modulo e1 for SL/PGL)."""
    mu = tuple(Fraction(x) for x in mu)
    key = (rd.label, mu, k)
    if key in _LEG_BASIS:
        return _LEG_BASIS[key]
    n = rd.nvars
    free = n - 1 if rd.family in ("SL", "PGL") else n
    monos = []

    def rec(i, left, acc):
        if i == free - 1 or free == 0:
            if free:
                monos.append(tuple(acc + [left]) + (0,) * (n - free))
            elif left == 0:
                monos.append((0,) * n)
            return
        for a in range(left, -1, -1):
            rec(i + 1, left - a, acc + [a])

    rec(0, k, [])
    red = SparseReducer()
    out = []
    trivial = len(rd.stabilizer_generators(mu)) == 0
    for mono in monos:
        p = Poly.monomial(mono)
        if not trivial:
            p = rd.reduce(rd.reynolds(p, mu))
        if p.is_zero():
            continue
        if red.add(dict(p.terms)):
            out.append(p)
    _LEG_BASIS[key] = out
    return out


def flag_poincare(rd: RootDatum, mu: Sequence) -> List[int]:
    """dim H^{2k}(G/P_mu) by Bruhat length of the orbit points."""
    dims: Dict[int, int] = {}
    for _, nu in weyl_cosets(rd, mu):
        ell = sum(1 for a in rd.positive_roots if rd.pair(a, nu) < 0)
        dims[ell] = dims.get(ell, 0) + 1
    top = max(dims)
    return [dims.get(k, 0) for k in range(top + 1)]


def _poly_mul(a: List[int], b: List[int]) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


# relations

def _delta_elt(amb: Ambient, rd: RootDatum, i: int, mu, f: Poly, g: int) -> Elt:
    d1 = rd.reduce(partial_derivative(f, mu))
    d2 = rd.reduce(partial_derivative(partial_derivative(f, mu), mu))
    out = amb.leg_poly(i, d1)
    if g != 1 and not d2.is_zero():
        xi = amb.curve_class(i, amb.alg.XI, 1 - g)
        out = _add(out, amb.mul(xi, amb.leg_poly(i, d2)))
    return out


def relation_D(amb: Ambient, coh: CurveCohomology, rd: RootDatum, mus, i: int, f: Poly) -> Elt:
    """D_i(f) = [f]_i - sum_{i' >= i} [Xi_d]_{i,i'} delta_i'(f) + sum_{i' < i} [Xi_{1-d}]_{i',i} delta_i'(f)."""
    if not f.is_homogeneous():
        raise PreconditionError("D_i(f) needs homogeneous f")
    d = f.degree()
    if d < 2:
        raise PreconditionError("D_i(f) needs deg f > 2")
    out = amb.leg_poly(i, rd.reduce(f))
    xd, x1d = xi_class(coh, d), xi_class(coh, 1 - d)
    for j in range(len(mus)):
        delta = _delta_elt(amb, rd, j, mus[j], f, coh.g)
        if not delta:
            continue
        if j >= i:
            out = _add(out, amb.mul(amb.kunneth(xd, i, j), delta), -1)
        else:
            out = _add(out, amb.mul(amb.kunneth(x1d, j, i), delta))
    return out


def relation_D_star(amb: Ambient, coh: CurveCohomology, rd: RootDatum, mus, i: int, f: Poly, omega) -> Elt:
    """The degree-2 relation of the reductive case, with the component omega."""
    if f.degree() != 1 or not f.is_homogeneous():
        raise PreconditionError("D*_i(f) needs f of cohomological degree 2")

    def pair(v):
        return sum((Fraction(c) * Fraction(v[m.index(1)]) for m, c in f.terms.items()), Fraction(0))

    out = amb.leg_poly(i, rd.reduce(f))
    s1, s0 = xi_star1(coh), xi_star0(coh)
    for j in range(len(mus)):
        c = pair(mus[j])
        if not c:
            continue
        if j >= i:
            out = _add(out, amb.kunneth(s1, i, j), -c)
        else:
            out = _add(out, amb.kunneth(s0, j, i), c)
    shift = [Fraction(x) for x in omega]
    for j in range(i):
        shift = [a + Fraction(b) for a, b in zip(shift, mus[j])]
    c = pair(shift)
    if c:
        out = _add(out, amb.curve_class(i, coh.XI), -c)
    return out


def relation_generators(rd: RootDatum, mus, curve, omega=None, amb=None, coh=None):
    """[(label, frobenius weight d, element)] over legs i and fundamental invariants."""
    coh = coh or CurveCohomology(curve)
    mus = [rd.check_coweight(m) for m in mus]
    amb = amb or Ambient(coh, len(mus), len(mus), rd.nvars)
    total = [sum(m[k] for m in mus) for k in range(rd.nvars)]
    if not rd.in_coroot_lattice(total):
        raise PreconditionError("sum of the legs is not in the coroot lattice")
    if omega is None:
        omega = (0,) * rd.nvars
    out = []
    for i in range(len(mus)):
        for name, f, deg in rd.fundamental_invariants:
            if deg == 2:
                out.append((f"D*_{i + 1}({name})", 1, relation_D_star(amb, coh, rd, mus, i, f, omega)))
            else:
                out.append((f"D_{i + 1}({name})", deg // 2, relation_D(amb, coh, rd, mus, i, f)))
    for label, d, e in out:
        if amb.frobenius(e) != _scale(e, Fraction(coh.q) ** d):
            raise InconsistencyError(f"{label} is not a Frobenius eigenvector of weight q^{d}")
    return out


# quotient by degree

class GradedQuotient:
    """Ambient basis, ideal span and quotient basis in each degree up to top."""

    def __init__(self, amb: Ambient, leg_bases: Callable[[int, int], List[Poly]], gens: Sequence[Elt], top: int):
        self.amb = amb
        self.top = top
        self.gens = [(amb.homogeneous(g), g) for g in gens if g]
        self._leg_bases = leg_bases
        self.ambient_basis: Dict[int, List[Elt]] = {}
        self.ideal: Dict[int, SparseReducer] = {}
        self.basis: Dict[int, List[Elt]] = {}
        self._coord: Dict[int, SparseReducer] = {}
        self._build()

    def _leg_combos(self, k: int):
        # elements of polynomial degree k split over legs
        out = []

        def rec(i, left, acc):
            if i == self.amb.nlegs:
                if left == 0:
                    out.append(acc)
                return
            for a in range(left + 1):
                for p in self._leg_bases(i, a):
                    rec(i + 1, left - a, acc + [(i, p)])

        rec(0, k, [])
        return out

    def _ambient(self, k: int) -> List[Elt]:
        if k in self.ambient_basis:
            return self.ambient_basis[k]
        amb = self.amb
        out = []
        for cur in product(range(amb.alg.dim), repeat=amb.slots):
            cdeg = sum(amb.alg.degrees[a] for a in cur)
            rest = k - cdeg
            if rest < 0 or rest % 2:
                continue
            cls = {((0,) * amb.nv, cur): Fraction(1)}
            for combo in self._leg_combos(rest // 2):
                e = cls
                for i, p in combo:
                    e = amb.mul(e, amb.leg_poly(i, p))
                out.append(e)
        self.ambient_basis[k] = out
        return out

    def _build(self):
        for k in range(self.top + 1):
            red = SparseReducer()
            for dg, g in self.gens:
                if dg is None:
                    raise InconsistencyError("relation generator is not homogeneous")
                if dg > k:
                    continue
                for b in self._ambient(k - dg):
                    red.add(self.amb.mul(b, g))
            self.ideal[k] = red
            coord = SparseReducer()
            for key, row in red.rows.items():
                coord.rows[key] = dict(row)
            chosen = []
            for b in self._ambient(k):
                tag = ((-1,), (len(chosen),))
                v = dict(b)
                v[tag] = Fraction(1)
                if any(key[0] != (-1,) for key in coord.reduce(b)):
                    coord.add(v)
                    chosen.append(b)
            self.basis[k] = chosen
            self._coord[k] = coord

    def dims(self) -> List[int]:
        return [len(self.basis[k]) for k in range(self.top + 1)]

    def in_ideal(self, x: Elt) -> bool:
        k = self.amb.homogeneous(x)
        if k is None:
            raise InconsistencyError("element is not homogeneous")
        if k > self.top:
            raise PreconditionError("degree beyond the truncation")
        return self.ideal[k].contains(x)

    def coords(self, x: Elt) -> List[Fraction]:
        k = self.amb.homogeneous(x)
        if k is None:
            raise InconsistencyError("element is not homogeneous")
        if k > self.top:
            return []
        rem = self._coord[k].reduce(x)
        out = [Fraction(0)] * len(self.basis[k])
        for key, v in rem.items():
            if key[0] != (-1,):
                raise InconsistencyError("reduction left ambient terms; quotient basis is incomplete")
            out[key[1][0]] = -v
        return out


@dataclass
class PhantomRing:
    rd: RootDatum
    mus: List[tuple]
    curve: object
    coh: CurveCohomology
    amb: Ambient
    quotient: GradedQuotient
    generators: List[tuple]
    N: int
    top_rep: Elt = field(default_factory=dict)
    top_integral: Fraction = Fraction(0)

    @property
    def top(self) -> int:
        return 2 * self.N

    def dims(self) -> List[int]:
        return self.quotient.dims()

    def total_dim(self) -> int:
        return sum(self.dims())

    def expected_hilbert(self) -> List[int]:
        px = [1, 2 * self.coh.g, 1]
        out = [1]
        for mu in self.mus:
            fl = flag_poincare(self.rd, mu)
            fl2 = [0] * (2 * len(fl) - 1)
            for k, v in enumerate(fl):
                fl2[2 * k] = v
            out = _poly_mul(out, _poly_mul(px, fl2))
        return out + [0] * (self.top + 1 - len(out))

    def integral(self, x: Elt) -> Fraction:
        """int over prod (X x G/P_mu_i) through the canonical top-degree identification."""
        c = self.quotient.coords(x)
        if self.amb.homogeneous(x) != self.top:
            return Fraction(0)
        base = self.quotient.coords(self.top_rep)
        if len(base) != 1 or base[0] == 0:
            raise InconsistencyError("top degree is not one-dimensional")
        return c[0] / base[0] * self.top_integral

    def canonical_top_class(self) -> Elt:
        """The top-degree class with integral 1."""
        return _scale(self.top_rep, 1 / self.top_integral)

    def volume_constant(self) -> Optional[Fraction]:
        degs = [d // 2 for _, _, d in self.rd.fundamental_invariants]
        if any(d < 2 for d in degs):
            return None
        val = Fraction(self.curve.q) ** ((self.curve.g - 1) * self.rd.dim_g)
        for d in degs:
            val *= self.curve.zeta_at(d)
        return val

    def volume(self, x: Elt) -> Fraction:
        const = self.volume_constant()
        if const is None:
            raise PreconditionError("the volume functional needs all invariant degrees >= 2")
        return const * self.integral(x)

    def mul_basis(self, k1: int, a: int, k2: int, b: int) -> List[Fraction]:
        q = self.quotient
        return q.coords(self.amb.mul(q.basis[k1][a], q.basis[k2][b]))

    def leg_class(self, i: int, p: Poly) -> Elt:
        return self.amb.leg_poly(i, self.rd.reduce(p))

    def xi(self, i: int) -> Elt:
        return self.amb.curve_class(i, self.coh.XI)

    def balanced_class(self, legs) -> Elt:
        """prod_i ([eta_i]_i + [xi]_i [eta'_i]_i) for legs with eta, eta_prime attributes."""
        out = self.amb.one()
        for i, leg in enumerate(legs):
            e = _add(self.leg_class(i, leg.eta), self.amb.mul(self.xi(i), self.leg_class(i, leg.eta_prime)))
            out = self.amb.mul(out, e)
        return out


def _top_representative(rd, mus, amb, coh):
    rep = amb.one()
    total = Fraction(1)
    for i, mu in enumerate(mus):
        D = rd.D(mu)
        chosen = None
        for p in leg_basis(rd, mu, D):
            val = rd.reduce(integrate_flag(rd, mu, p)).constant_term()
            if val:
                chosen = (p, Fraction(val))
                break
        if chosen is None:
            raise InconsistencyError("no top-degree class with nonzero flag integral")
        rep = amb.mul(rep, amb.mul(amb.curve_class(i, coh.XI), amb.leg_poly(i, chosen[0])))
        total *= chosen[1]
    return rep, total


def build_phantom(rd: RootDatum, mus, curve, omega=None) -> PhantomRing:
    coh = CurveCohomology(curve)
    mus = [rd.check_coweight(m) for m in mus]
    for m in mus:
        if not rd.is_minuscule(m):
            raise PreconditionError("legs must be minuscule")
    r = len(mus)
    if r == 0:
        raise PreconditionError("the phantom ring needs at least one leg")
    amb = Ambient(coh, r, r, rd.nvars)
    gens = relation_generators(rd, mus, curve, omega, amb=amb, coh=coh)
    N = sum(rd.D(m) + 1 for m in mus)
    quotient = GradedQuotient(amb, lambda i, k: leg_basis(rd, mus[i], k), [e for _, _, e in gens], 2 * N)
    ring = PhantomRing(rd, mus, curve, coh, amb, quotient, gens, N)
    ring.top_rep, ring.top_integral = _top_representative(rd, mus, amb, coh)
    expected = ring.expected_hilbert()
    if ring.dims() != expected[:2 * N + 1] or any(expected[2 * N + 1:]):
        raise InconsistencyError(f"Hilbert series {ring.dims()} differs from {expected}")
    return ring


def reduction_rank(ring: PhantomRing) -> int:
    """dim of C / H^{>0}(X^r) C, computed inside the quotient."""
    q = ring.quotient
    amb = ring.amb
    positive = [amb.curve_class(i, a) for i in range(amb.slots) for a in range(1, amb.alg.dim)]
    total = 0
    for k in range(ring.top + 1):
        red = SparseReducer()
        for p in positive:
            dp = amb.homogeneous(p)
            if dp > k:
                continue
            for b in q.basis[k - dp]:
                v = q.coords(amb.mul(p, b))
                red.add({t: c for t, c in enumerate(v) if c})
        total += len(q.basis[k]) - len(red)
    return total


def duality_report(ring: PhantomRing) -> dict:
    q = ring.quotient
    blocks = []
    perfect = True
    for k in range(ring.top + 1):
        rows = []
        for a in q.basis[k]:
            rows.append([ring.integral(ring.amb.mul(a, b)) for b in q.basis[ring.top - k]])
        n1, n2 = len(q.basis[k]), len(q.basis[ring.top - k])
        ok = n1 == n2 and (n1 == 0 or det(rows) != 0)
        perfect = perfect and ok
        blocks.append({"degree": k, "size": [n1, n2], "invertible": ok})
    const = ring.volume_constant()
    top = ring.canonical_top_class()
    top_volume = ring.volume(top) if const is not None else None
    return {
        "perfect": perfect,
        "blocks": blocks,
        "volume_constant": const,
        "top_integral": ring.top_integral,
        "volume_of_top_class": top_volume,
        "unit_pairing": top_volume if const is not None else ring.integral(top),
    }


def ring_report(ring: PhantomRing) -> dict:
    dims = ring.dims()
    rep = {
        "group": ring.rd.label,
        "legs": [[str(x) for x in m] for m in ring.mus],
        "curve": ring.curve.name,
        "N": ring.N,
        "hilbert_series": dims,
        "expected_hilbert_series": ring.expected_hilbert()[:ring.top + 1],
        "total_dimension": sum(dims),
        "top_degree_dimension": dims[ring.top],
        "reduction_rank": reduction_rank(ring),
        "relations": [label for label, _, _ in ring.generators],
    }
    rep["free_over_HXr"] = rep["total_dimension"] == (2 * ring.coh.g + 2) ** len(ring.mus) * rep["reduction_rank"]
    rep["duality"] = duality_report(ring)
    return rep


# Xi product identity and the D_i(fg) membership check

def xi_product_identity(coh: CurveCohomology, d: int, e: int, i: int, j: int) -> bool:
    """[Xi_d]_{1,i}[Xi_e]_{1,j} against the three-case right side, in H*(X^3)."""
    amb = Ambient(coh, 3, 0, 0)
    X = lambda k: xi_class(coh, k)
    K = amb.kunneth
    i0, j0 = i - 1, j - 1
    lhs = amb.mul(K(X(d), 0, i0), K(X(e), 0, j0))
    if i < j:
        rhs = _add(amb.mul(K(X(d + e), 0, i0), K(X(e), i0, j0)),
                   amb.mul(K(X(d + e), 0, j0), K(X(1 - d), i0, j0)), -1)
    elif i > j:
        rhs = _add(amb.mul(K(X(d + e), 0, j0), K(X(d), j0, i0)),
                   amb.mul(K(X(d + e), 0, i0), K(X(1 - e), j0, i0)), -1)
    else:
        inner = _add(_add(K(X(e), i0, i0), K(X(d), i0, i0)), amb.curve_vector(i0, c1_tangent(coh)))
        rhs = amb.mul(K(X(d + e), 0, i0), inner)
    return lhs == rhs


def difg_check(rd: RootDatum, mus, curve, f: Poly, g: Poly, i: int) -> bool:
    """Whether D_i(fg) lies in the ideal generated by all D_j(f), D_j(g)."""
    coh = CurveCohomology(curve)
    mus = [rd.check_coweight(m) for m in mus]
    amb = Ambient(coh, len(mus), len(mus), rd.nvars)
    gens = [relation_D(amb, coh, rd, mus, j, h) for j in range(len(mus)) for h in (f, g)]
    target = relation_D(amb, coh, rd, mus, i, f * g)
    k = amb.homogeneous(target)
    quot = _IdealInDegree(amb, lambda a, t: leg_basis(rd, mus[a], t), gens, k)
    return quot.contains(target)


class _IdealInDegree:
    def __init__(self, amb, leg_bases, gens, k):
        helper = GradedQuotient.__new__(GradedQuotient)
        helper.amb = amb
        helper._leg_bases = leg_bases
        helper.ambient_basis = {}
        self.red = SparseReducer()
        for g in gens:
            dg = amb.homogeneous(g)
            if dg is None or dg > k:
                continue
            for b in helper._ambient(k - dg):
                self.red.add(amb.mul(b, g))

    def contains(self, x):
        return self.red.contains(x)


# restriction along sigma: X -> X^r

@dataclass
class SigmaRing:
    rd: RootDatum
    mus: List[tuple]
    amb: Ambient
    quotient: GradedQuotient
    constants: Dict[int, list]
    top_rep: Elt
    top_integral: Fraction

    @property
    def top(self):
        return self.quotient.top

    def integral(self, x: Elt) -> Fraction:
        if self.amb.homogeneous(x) != self.top:
            return Fraction(0)
        c = self.quotient.coords(x)
        base = self.quotient.coords(self.top_rep)
        if len(base) != 1 or base[0] == 0:
            raise InconsistencyError("top degree of the restricted ring is not one-dimensional")
        return c[0] / base[0] * self.top_integral

    def leg_class(self, i: int, p: Poly) -> Elt:
        return self.amb.leg_poly(i, self.rd.reduce(p))


def sigma_relations(rd: RootDatum, mus, constants: Dict[int, list], amb: Ambient) -> List[Elt]:
    """[f]_i - xi sum_i' c_{i,i'}(d) [d_mu_i' f]_i' for the fundamental invariants f."""
    out = []
    xi = amb.curve_class(0, amb.alg.XI)
    for i in range(len(mus)):
        for _, f, deg in rd.fundamental_invariants:
            d = deg // 2
            if d < 2:
                raise PreconditionError("the restricted ring is for semisimple groups")
            e = amb.leg_poly(i, rd.reduce(f))
            for j in range(len(mus)):
                c = constants[d][i][j]
                if c:
                    dj = rd.reduce(partial_derivative(f, mus[j]))
                    e = _add(e, amb.mul(xi, amb.leg_poly(j, dj)), -c)
            out.append(e)
    return out


def build_sigma_ring(rd: RootDatum, mus, q: int, constants: Dict[int, list]) -> SigmaRing:
    mus = [rd.check_coweight(m) for m in mus]
    amb = Ambient(EvenCurve(q), 1, len(mus), rd.nvars)
    gens = sigma_relations(rd, mus, constants, amb)
    top = 2 + 2 * sum(rd.D(m) for m in mus)
    quotient = GradedQuotient(amb, lambda i, k: leg_basis(rd, mus[i], k), gens, top)
    rep = amb.curve_class(0, amb.alg.XI)
    total = Fraction(1)
    for i, mu in enumerate(mus):
        D = rd.D(mu)
        for p in leg_basis(rd, mu, D):
            val = Fraction(rd.reduce(integrate_flag(rd, mu, p)).constant_term())
            if val:
                rep = amb.mul(rep, amb.leg_poly(i, p))
                total *= val
                break
        else:
            raise InconsistencyError("no top-degree class with nonzero flag integral")
    return SigmaRing(rd, mus, amb, quotient, constants, rep, total)


def build_phantom_sigma(rd: RootDatum, mus, group, sigma, artin) -> SigmaRing:
    """C^mu_{G,sigma} with constants c_{i,i'}(d) from the Artin system."""
    from .volume import colmez_constants

    degs = sorted({d // 2 for _, _, d in rd.fundamental_invariants})
    consts = {d: colmez_constants(group, artin, sigma, d) for d in degs}
    return build_sigma_ring(rd, mus, artin.q, consts)


def diagonal_constants(curve, r: int, degrees) -> Dict[int, list]:
    """c_{i,i'}(d) for sigma = (1, ..., 1) computed from Xi classes directly."""
    coh = CurveCohomology(curve)
    out = {}
    for d in degrees:
        up = xi_class(coh, d).xi_coefficient_on_diagonal()
        down = -xi_class(coh, 1 - d).xi_coefficient_on_diagonal()
        out[d] = [[up if j >= i else down for j in range(r)] for i in range(r)]
    return out


def pgl_sign_coweight(n: int, sign) -> tuple:
    """mu_plus = image of (1, 0, .., 0) and mu_minus = image of (0, .., 0, -1) in PGL_n."""
    from .characters import sign_value

    base = [0] * n
    if sign_value(sign) > 0:
        base[0] = 1
    else:
        base[-1] = -1
    avg = Fraction(sum(base), n)
    return tuple(Fraction(x) - avg for x in base)


def pgl_t_classes(rd: RootDatum, signs) -> List[Poly]:
    """t_i = -x_1 for a plus leg and x_n for a minus leg."""
    from .characters import sign_value

    n = rd.nvars
    return [-Poly.var(0, n) if sign_value(s) > 0 else Poly.var(n - 1, n) for s in signs]


def colmez_eta_coefficient(ring: SigmaRing, signs) -> Fraction:
    """int of (t_1 + ... + t_r)^{(n-1) r + 1} in the restricted ring."""
    ts = pgl_t_classes(ring.rd, signs)
    s = {}
    for i, t in enumerate(ts):
        s = _add(s, ring.leg_class(i, t))
    n = ring.rd.nvars
    power = ring.amb.one()
    for _ in range((n - 1) * len(ts) + 1):
        power = ring.amb.mul(power, s)
    return ring.integral(power)


# checks on the restricted ring

def _tag(i):
    # sorts below every monomial exponent tuple
    return (-1, i)


def flag_lift_basis(rd: RootDatum, mu, k: int) -> List[Poly]:
    """Elements of R^{W_mu} of degree k lifting a basis of H^{2k}(G/P_mu)."""
    red = SparseReducer()
    for _, f, deg in rd.fundamental_invariants:
        d = deg // 2
        if d <= k:
            for b in leg_basis(rd, mu, k - d):
                red.add(dict(rd.reduce(f * b).terms))
    out = []
    for b in leg_basis(rd, mu, k):
        if red.add(dict(b.terms)):
            out.append(b)
    return out


def invariant_decomposition(rd: RootDatum, mu, eta: Poly):
    """Write eta = sum_j f_j h_j modulo (R^W_+)^2 R^{W_mu} with h_j in the lift basis.

    Returns [(invariant index, h_j)]; raises if eta is not in R^W_+ R^{W_mu}.
    """
    eta = rd.reduce(eta)
    m = eta.degree()
    inv = rd.fundamental_invariants
    red = SparseReducer()
    for a in range(len(inv)):
        for b in range(a, len(inv)):
            rest = m - inv[a][2] // 2 - inv[b][2] // 2
            if rest >= 0:
                for p in leg_basis(rd, mu, rest):
                    red.add(dict(rd.reduce(inv[a][1] * inv[b][1] * p).terms))
    slots = []
    for j, (_, f, deg) in enumerate(inv):
        rest = m - deg // 2
        if rest < 0:
            continue
        for h in flag_lift_basis(rd, mu, rest):
            v = dict(rd.reduce(f * h).terms)
            v[_tag(len(slots))] = Fraction(1)
            if red.add(v):
                slots.append((j, h))
            else:
                raise InconsistencyError("V (x) H*(G/P) does not embed in degree %d" % m)
    rem = red.reduce(dict(eta.terms))
    if any(k[0] != -1 for k in rem):
        raise PreconditionError("eta is not in the ideal generated by R^W_+")
    out: Dict[int, Poly] = {}
    for key, v in rem.items():
        j, h = slots[key[1]]
        out[j] = out.get(j, Poly(h.n)) + h.scale(-v)
    return sorted(out.items())


def eta_case(rd: RootDatum, mus, ns) -> int:
    Ds = [rd.D(m) for m in mus]
    if sum(ns) != 1 + sum(Ds):
        raise PreconditionError("total degree must be 1 + sum D_mu_i")
    above = [i for i in range(len(ns)) if ns[i] > Ds[i]]
    below = [i for i in range(len(ns)) if ns[i] < Ds[i]]
    if len(above) >= 2:
        return 1
    if len(below) >= 2:
        return 2
    return 3 if below else 4


def eta_cases_check(ring: SigmaRing, etas: Sequence[Poly]) -> dict:
    """Compare the image of eta_1 (x) .. (x) eta_r with its four-case reduction."""
    rd, amb = ring.rd, ring.amb
    etas = [rd.reduce(e) for e in etas]
    ns = [e.degree() for e in etas]
    case = eta_case(rd, ring.mus, ns)
    lhs = amb.one()
    for i, e in enumerate(etas):
        lhs = amb.mul(lhs, amb.leg_poly(i, e))
    value = ring.integral(lhs)
    if case in (1, 2):
        expected = Fraction(0)
    else:
        Ds = [rd.D(m) for m in ring.mus]
        i = next(k for k in range(len(ns)) if ns[k] > Ds[k])
        decomp = invariant_decomposition(rd, ring.mus[i], etas[i])
        xi = amb.curve_class(0, amb.alg.XI)
        rest = amb.one()
        for k, e in enumerate(etas):
            if k != i:
                rest = amb.mul(rest, amb.leg_poly(k, e))
        rhs = {}
        for j, h in decomp:
            f, deg = rd.fundamental_invariants[j][1], rd.fundamental_invariants[j][2]
            d = deg // 2
            if case == 4:
                term = amb.leg_poly(i, rd.reduce(partial_derivative(f, ring.mus[i]) * h))
                rhs = _add(rhs, amb.mul(term, rest), ring.constants[d][i][i])
            elif d == ns[i] - Ds[i]:
                ip = next(k for k in range(len(ns)) if ns[k] < Ds[k])
                others = amb.one()
                for k, e in enumerate(etas):
                    if k == ip:
                        e = rd.reduce(partial_derivative(f, ring.mus[ip]) * e)
                    if k != i:
                        others = amb.mul(others, amb.leg_poly(k, e))
                rhs = _add(rhs, amb.mul(amb.leg_poly(i, h), others), ring.constants[d][i][ip])
        expected = ring.integral(amb.mul(xi, rhs))
    return {"degrees": ns, "case": case, "value": value, "expected": expected, "ok": value == expected}


def nilpotence_check(ring: SigmaRing, f: Poly, g: Poly, i: int, j: int) -> bool:
    """[f]_i [g]_j = 0 for f, g in R^W_+."""
    amb = ring.amb
    x = amb.mul(amb.leg_poly(i, ring.rd.reduce(f)), amb.leg_poly(j, ring.rd.reduce(g)))
    k = amb.homogeneous(x)
    if not x or k > ring.top:
        return True
    return not any(ring.quotient.coords(x))


def restriction_check(ring: PhantomRing, sigma_ring: SigmaRing) -> bool:
    """The diagonal pullback of every relation lies in the restricted ideal (genus 0)."""
    if ring.coh.g != 0:
        raise PreconditionError("the even-part restriction is exact only for g = 0")
    for _, _, e in ring.generators:
        img = ring.amb.restrict_diagonal(e, sigma_ring.amb)
        if img and not sigma_ring.quotient.in_ideal(img):
            return False
    return True


def frobenius_weights(ring: PhantomRing) -> Dict[int, list]:
    """Frobenius on the quotient basis; returns the diagonal weights if it acts diagonally."""
    out = {}
    q = ring.quotient
    for k in range(ring.top + 1):
        weights = []
        for a, b in enumerate(q.basis[k]):
            v = q.coords(ring.amb.frobenius(b))
            if any(c for t, c in enumerate(v) if t != a):
                return {}
            weights.append(v[a])
        out[k] = weights
    return out


def factorization_check(ring: PhantomRing, theta: Elt) -> bool:
    """The volume functional kills D_i(f) * theta whenever the product reaches top degree."""
    for _, _, e in ring.generators:
        x = ring.amb.mul(e, theta)
        if x and ring.amb.homogeneous(x) == ring.top and ring.integral(x) != 0:
            return False
    return True
