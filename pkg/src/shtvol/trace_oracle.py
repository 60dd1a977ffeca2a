"""Brute-force trace of Frob^-1 composed with the leg operators on H*(Bun_G).

H*(Bun_G) is modelled as the free graded-commutative algebra on generators
f_i^z, one per fundamental invariant f_i (line degree d_i) and homology slot
z in {H0, H1 basis, H2}.  Nothing here touches the L-function code: the only
shared inputs are the curve's q, g, Frobenius matrix and the leg data
(scalar c_j, nabla matrix).
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from .errors import PreconditionError


@dataclass(frozen=True)
class Generator:
    line: int
    slot: str  # "H0", "H1", "H2"
    index: int  # H1 coordinate, 0 otherwise
    degree: int

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


class MonomialBasis:
    """Monomials in the generators, graded by cohomological degree up to dmax."""

    def __init__(self, g: int, line_degrees: Sequence[int], dmax: int):
        self.g = g
        self.line_degrees = list(line_degrees)
        self.dmax = dmax
        gens = []
        for i, d in enumerate(self.line_degrees):
            if d < 1:
                raise PreconditionError("line degrees must be positive")
            gens.append(Generator(i, "H0", 0, 2 * d))
            for k in range(2 * g):
                gens.append(Generator(i, "H1", k, 2 * d - 1))
            if d != 1:
                gens.append(Generator(i, "H2", 0, 2 * d - 2))
        self.generators = gens
        self.even = [a for a, x in enumerate(gens) if not x.odd]
        self.odd = [a for a, x in enumerate(gens) if x.odd]
        self._by_degree = None

    def _even_parts(self):
        # exponent dicts for the even generators, by degree
        table: Dict[int, List[tuple]] = {0: [()]}
        for a in self.even:
            deg = self.generators[a].degree
            new: Dict[int, List[tuple]] = {}
            for base, monos in table.items():
                k = 0
                while base + k * deg <= self.dmax:
                    new.setdefault(base + k * deg, []).extend(m + (k,) for m in monos)
                    k += 1
            table = new
        return table

    @property
    def by_degree(self) -> Dict[int, List[tuple]]:
        if self._by_degree is None:
            even = self._even_parts()
            n = len(self.generators)
            out: Dict[int, List[tuple]] = {i: [] for i in range(self.dmax + 1)}
            subsets = [s for k in range(len(self.odd) + 1) for s in combinations(self.odd, k)]
            for s in subsets:
                sdeg = sum(self.generators[a].degree for a in s)
                for deg, monos in even.items():
                    if deg + sdeg > self.dmax:
                        continue
                    for m in monos:
                        e = [0] * n
                        for a, k in zip(self.even, m):
                            e[a] = k
                        for a in s:
                            e[a] = 1
                        out[deg + sdeg].append(tuple(e))
            for v in out.values():
                v.sort()
            self._by_degree = out
        return self._by_degree

    def count(self, degree: int) -> int:
        return len(self.by_degree.get(degree, []))


# sparse algebra arithmetic; elements are dicts exponent tuple -> coefficient

def _mono_mul(a: tuple, b: tuple, odd: Sequence[int]):
    sign = 1
    for p in odd:
        if b[p]:
            if a[p]:
                return 0, None
            # b's generator p passes a's odd generators with larger index
            sign *= (-1) ** sum(a[q] for q in odd if q > p)
    return sign, tuple(x + y for x, y in zip(a, b))


def _mul(x: dict, y: dict, odd) -> dict:
    out: Dict[tuple, Fraction] = {}
    for a, ca in x.items():
        for b, cb in y.items():
            s, m = _mono_mul(a, b, odd)
            if s:
                out[m] = out.get(m, 0) + s * ca * cb
    return {m: c for m, c in out.items() if c}


class GeneratorMap:
    """A degree-preserving linear map on generators, extended either
    multiplicatively (algebra map) or by the Leibniz rule (even derivation)."""

    def __init__(self, basis: MonomialBasis, images: Dict[int, Dict[int, Fraction]], scalar=0):
        self.basis = basis
        self.images = images
        self.scalar = Fraction(scalar)
        n = len(basis.generators)
        self.diag = {}
        if all(set(img) <= {a} for a, img in images.items()):
            self.diag = {a: Fraction(images.get(a, {}).get(a, 0)) for a in range(n)}
        self._unit = {}
        for a in range(n):
            self._unit[a] = tuple(1 if t == a else 0 for t in range(n))

    def _gen_image(self, a: int) -> dict:
        return {self._unit[b]: c for b, c in self.images.get(a, {}).items() if c}

    def _factors(self, m: tuple):
        odd = set(self.basis.odd)
        ev = tuple(0 if a in odd else k for a, k in enumerate(m))
        return ev, [a for a in self.basis.odd if m[a]]

    def apply_hom(self, m: tuple) -> dict:
        if self.diag:
            c = Fraction(1)
            for a, k in enumerate(m):
                if k:
                    c *= self.diag[a] ** k
            return {m: c} if c else {}
        odd = self.basis.odd
        n = len(m)
        out = {tuple([0] * n): Fraction(1)}
        for a, k in enumerate(m):
            if k and a not in odd:
                img = self._gen_image(a)
                for _ in range(k):
                    out = _mul(out, img, odd)
        for a in odd:
            if m[a]:
                out = _mul(out, self._gen_image(a), odd)
        return out

    def apply_derivation(self, m: tuple) -> dict:
        if self.diag:
            c = self.scalar + sum(k * self.diag[a] for a, k in enumerate(m) if k)
            return {m: c} if c else {}
        odd = self.basis.odd
        out: Dict[tuple, Fraction] = {}
        if self.scalar:
            out[m] = self.scalar
        ev, odds = self._factors(m)
        for a, k in enumerate(ev):
            if not k:
                continue
            rest = tuple(x - (1 if t == a else 0) for t, x in enumerate(m))
            for b, c in self.images.get(a, {}).items():
                s, mm = _mono_mul(rest, self._unit[b], odd)
                if s:
                    out[mm] = out.get(mm, 0) + k * c * s
        if odds:
            even_elt = {ev: Fraction(1)}
            for p, a in enumerate(odds):
                acc = even_elt
                for q, b in enumerate(odds):
                    acc = _mul(acc, self._gen_image(a) if q == p else {self._unit[b]: 1}, odd)
                for mm, c in acc.items():
                    out[mm] = out.get(mm, 0) + c
        return {mm: c for mm, c in out.items() if c}

    def apply(self, elt: dict, derivation: bool) -> dict:
        out: Dict[tuple, Fraction] = {}
        for m, c in elt.items():
            img = self.apply_derivation(m) if derivation else self.apply_hom(m)
            for mm, cc in img.items():
                out[mm] = out.get(mm, 0) + c * cc
        return {mm: c for mm, c in out.items() if c}


def frobenius_inverse_map(basis: MonomialBasis, q: int, F) -> GeneratorMap:
    """q^-d on H0 slots, q^(1-d) on H2 slots, q^-d F on H1 slots."""
    images: Dict[int, Dict[int, Fraction]] = {}
    index = {(x.line, x.slot, x.index): a for a, x in enumerate(basis.generators)}
    for a, x in enumerate(basis.generators):
        d = basis.line_degrees[x.line]
        if x.slot == "H0":
            images[a] = {a: Fraction(1, q ** d)}
        elif x.slot == "H2":
            images[a] = {a: Fraction(1, q ** (d - 1))}
        else:
            col = x.index
            images[a] = {index[(x.line, "H1", row)]: Fraction(F[row][col]) / q ** d
                         for row in range(2 * basis.g) if F[row][col]}
    return GeneratorMap(basis, images)


def leg_map(basis: MonomialBasis, c, nabla_mat) -> GeneratorMap:
    """Scalar c plus id_H tensor nabla, nabla given with columns = images."""
    k = len(basis.line_degrees)
    if len(nabla_mat) != k or any(len(r) != k for r in nabla_mat):
        raise PreconditionError("nabla matrix size does not match the number of lines")
    images: Dict[int, Dict[int, Fraction]] = {}
    index = {(x.line, x.slot, x.index): a for a, x in enumerate(basis.generators)}
    for a, x in enumerate(basis.generators):
        img = {}
        for j in range(k):
            v = Fraction(nabla_mat[j][x.line])
            if not v:
                continue
            if basis.line_degrees[j] != basis.line_degrees[x.line]:
                raise PreconditionError("nabla mixes lines of different degree")
            img[index[(j, x.slot, x.index)]] = v
        images[a] = img
    return GeneratorMap(basis, images, scalar=c)


def build_operator(curve, line_degrees, legs, dmax: int):
    """Per-degree sparse matrices of Frob^-1 and of each leg operator.

    Returned as {degree: {"frob": M, "legs": [M_1, ...]}} with M[row_mono][col_mono].
    """
    basis = MonomialBasis(curve.g, line_degrees, dmax)
    frob = frobenius_inverse_map(basis, curve.q, _frobenius(curve))
    gammas = [leg_map(basis, c, m) for c, m in legs]
    out = {}
    for deg, monos in basis.by_degree.items():
        fm = {}
        gms = [dict() for _ in gammas]
        for m in monos:
            for r, c in frob.apply_hom(m).items():
                fm.setdefault(r, {})[m] = c
            for t, gm in enumerate(gammas):
                for r, c in gm.apply_derivation(m).items():
                    gms[t].setdefault(r, {})[m] = c
        out[deg] = {"frob": fm, "legs": gms}
    return basis, out


_BASES: Dict[tuple, MonomialBasis] = {}


def _basis(g, line_degrees, dmax) -> MonomialBasis:
    key = (g, tuple(line_degrees), dmax)
    if key not in _BASES:
        _BASES.clear()
        _BASES[key] = MonomialBasis(g, line_degrees, dmax)
    return _BASES[key]


def _degree_trace(args):
    curve_data, line_degrees, legs, dmax, deg = args
    q, g, F = curve_data
    basis = _basis(g, line_degrees, dmax)
    frob = frobenius_inverse_map(basis, q, F)
    gammas = [leg_map(basis, c, m) for c, m in legs]
    total = Fraction(0)
    for m in basis.by_degree[deg]:
        elt = {m: Fraction(1)}
        for gm in gammas:
            elt = gm.apply(elt, derivation=True)
            if not elt:
                break
        if not elt:
            continue
        elt = frob.apply(elt, derivation=False)
        total += elt.get(m, 0)
    return total


@dataclass
class TraceRun:
    dmax: int
    q_power: Fraction
    terms: List[Fraction]
    partial_sums: List[Fraction]
    ratio: float | None
    tail_bound: float | None
    burn_in: int
    counts: List[int] = field(default_factory=list)

    @property
    def value(self) -> Fraction:
        return self.partial_sums[-1]

    def agrees_with(self, closed, rel: float = 1e-6) -> bool:
        tol = max(rel * abs(float(closed)), self.tail_bound if self.tail_bound is not None else 0.0)
        return abs(float(self.value - Fraction(closed))) <= tol

    def as_dict(self):
        return {
            "dmax": self.dmax,
            "q_power": self.q_power,
            "value": self.value,
            "terms": self.terms,
            "partial_sums": self.partial_sums,
            "monomial_counts": self.counts,
            "ratio": self.ratio,
            "tail_bound": self.tail_bound,
            "burn_in": self.burn_in,
        }


def _frobenius(curve):
    return curve.require_frobenius() if curve.g else []


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("SHTVOL_WORKERS", "1")))
    except ValueError:
        return 1


def tail_certificate(terms: Sequence[Fraction], burn_in: int):
    """Max ratio of successive two-degree blocks beyond burn_in and the geometric tail it implies."""
    blocks = [abs(float(terms[i] + (terms[i + 1] if i + 1 < len(terms) else 0)))
              for i in range(0, len(terms), 2)]
    start = burn_in // 2
    ratios = []
    for k in range(max(start, 1), len(blocks)):
        if blocks[k - 1] > 0:
            ratios.append(blocks[k] / blocks[k - 1])
        elif blocks[k] > 0:
            ratios.append(float("inf"))
    if not ratios:
        return 0.0, 0.0
    rho = max(ratios)
    if rho >= 1:
        return rho, None
    return rho, blocks[-1] * rho / (1 - rho)


def truncated_trace(curve, line_degrees: Sequence[int], legs: Sequence[tuple], dmax: int,
                    dim_bun: int, burn_in: int | None = None) -> TraceRun:
    """q^{dim Bun} sum_{i <= dmax} (-1)^i Tr(Frob^-1 o Gamma_r o ... o Gamma_1 | H^i)."""
    top = max(2 * d for d in line_degrees) if line_degrees else 0
    if dmax < top:
        raise PreconditionError(f"dmax must be at least the top generator degree {top}")
    F = _frobenius(curve)
    args = [((curve.q, curve.g, F), list(line_degrees), list(legs), dmax, deg) for deg in range(dmax + 1)]
    nw = _workers()
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as ex:
            raw = list(ex.map(_degree_trace, args))
    else:
        raw = [_degree_trace(a) for a in args]
    qpow = Fraction(curve.q) ** dim_bun
    terms = [qpow * (-1) ** i * t for i, t in enumerate(raw)]
    partial, acc = [], Fraction(0)
    for t in terms:
        acc += t
        partial.append(acc)
    if burn_in is None:
        burn_in = dmax // 2
    rho, tail = tail_certificate(terms, burn_in)
    basis = _basis(curve.g, line_degrees, dmax)
    counts = [basis.count(i) for i in range(dmax + 1)]
    return TraceRun(dmax, qpow, terms, partial, rho, tail, burn_in, counts)


def compact_support_trace(curve, line_degrees, legs, dmax: int, dim_bun: int) -> Fraction:
    """Same quantity read on the compactly supported side.

    H_c^{2 dim - i} is dual to H^i with Frobenius q^dim (Frob^-1)^T and leg
    operators transposed; the alternating sum of Tr(Frob o Gamma^T) there
    must reproduce the ordinary value.
    """
    basis, ops = build_operator(curve, line_degrees, legs, dmax)
    qd = Fraction(curve.q) ** dim_bun
    total = Fraction(0)
    for deg, blk in ops.items():
        # (Frob^-1 G_r ... G_1)^T = G_1^T ... G_r^T Frob^-T
        prod = None
        for m in blk["legs"]:
            mt = _transpose(m)
            prod = mt if prod is None else _sparse_matmul(prod, mt)
        frob_c = _transpose(blk["frob"])
        prod = frob_c if prod is None else _sparse_matmul(prod, frob_c)
        tr = sum((row.get(k, 0) for k, row in prod.items()), Fraction(0))
        total += (-1) ** deg * qd * tr
    return total


def _transpose(m):
    out = {}
    for r, row in m.items():
        for c, v in row.items():
            out.setdefault(c, {})[r] = v
    return out


def _sparse_matmul(a, b):
    out = {}
    for r, row in a.items():
        acc = {}
        for k, v in row.items():
            for c, w in b.get(k, {}).items():
                acc[c] = acc.get(c, 0) + v * w
        acc = {c: x for c, x in acc.items() if x}
        if acc:
            out[r] = acc
    return out


def product_series_trace(curve, line_degrees, legs, dmax: int, dim_bun: int) -> Fraction:
    """Second oracle for g = 0 and diagonal nabla: per-line series, then convolve.

    Each line contributes sum over (a, b) of q^{-d a} q^{(1-d) b} N^k with
    N = a + b in degree 2da + (2d-2)b; the leg polynomial in the N_i is
    expanded and the per-line series are multiplied degree by degree.
    """
    if curve.g != 0:
        raise PreconditionError("the product-series oracle is for g = 0")
    k = len(line_degrees)
    eps = []
    for c, m in legs:
        if any(m[a][b] for a in range(k) for b in range(k) if a != b):
            raise PreconditionError("the product-series oracle needs diagonal nabla")
        eps.append((Fraction(c), [Fraction(m[i][i]) for i in range(k)]))
    # expand prod_j (c_j + sum_i e_ji N_i) into {exponent vector: coeff}
    poly = {(0,) * k: Fraction(1)}
    for c, e in eps:
        new = {}
        for ex, v in poly.items():
            new[ex] = new.get(ex, 0) + v * c
            for i in range(k):
                if e[i]:
                    ex2 = tuple(x + (1 if t == i else 0) for t, x in enumerate(ex))
                    new[ex2] = new.get(ex2, 0) + v * e[i]
        poly = new
    q = curve.q

    def line_series(d, power):
        out = [Fraction(0)] * (dmax + 1)
        a = 0
        while 2 * d * a <= dmax:
            if d == 1:
                out[2 * a] += Fraction(1, q ** a) * Fraction(a) ** power
            else:
                b = 0
                while 2 * d * a + (2 * d - 2) * b <= dmax:
                    out[2 * d * a + (2 * d - 2) * b] += Fraction(1, q ** (d * a)) * Fraction(1, q ** ((d - 1) * b)) * Fraction(a + b) ** power
                    b += 1
            a += 1
        return out

    total = Fraction(0)
    for ex, v in poly.items():
        if not v:
            continue
        ser = [Fraction(1)] + [Fraction(0)] * dmax
        for i, d in enumerate(line_degrees):
            ls = line_series(d, ex[i])
            new = [Fraction(0)] * (dmax + 1)
            for x, cx in enumerate(ser):
                if cx:
                    for y in range(dmax + 1 - x):
                        if ls[y]:
                            new[x + y] += cx * ls[y]
            ser = new
        total += v * sum(ser)
    return Fraction(q) ** dim_bun * total


def legs_for_oracle(rd, legspecs):
    """(c_j, nabla matrix) per leg from flag_calculus only."""
    from .flag_calculus import degree_constants, nabla_matrix

    out = []
    for leg in legspecs:
        mu = rd.check_coweight(leg.mu)
        c1, c2 = degree_constants(rd, mu, leg.eta, leg.eta_prime, leg.omega)
        out.append((c1 + c2, nabla_matrix(rd, mu, leg.eta)))
    return out


def trace_check(rd, legspecs, curve, dmax: int) -> TraceRun:
    degrees = [d // 2 for _, _, d in rd.fundamental_invariants]
    return truncated_trace(curve, degrees, legs_for_oracle(rd, legspecs), dmax, (curve.g - 1) * rd.dim_g)
