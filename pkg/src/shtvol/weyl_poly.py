"""Classical root data, Weyl group actions and invariant generators.

Weyl elements are signed permutations ``(perm, signs)`` acting on
polynomials by ``x_i -> signs[i] * x_{perm[i]}``.  On coweights this is
``(w.v)[perm[i]] = signs[i] * v[i]``, so ``t_mu = sum mu_i x_i`` maps to
``t_{w mu}``.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from .errors import InconsistencyError, PreconditionError, SchemaError
from .linalg import solve
from .poly import Poly, elementary

Weyl = Tuple[Tuple[int, ...], Tuple[int, ...]]

FAMILIES = ("GL", "SL", "PGL", "SO_odd", "SO_even")
_ALIASES = {
    "gl": "GL", "sl": "SL", "pgl": "PGL",
    "so-odd": "SO_odd", "so_odd": "SO_odd", "so-even": "SO_even", "so_even": "SO_even",
}


def identity_weyl(n: int) -> Weyl:
    return (tuple(range(n)), (1,) * n)


def compose(w1: Weyl, w2: Weyl) -> Weyl:
    """The element acting as w1 after w2."""
    p1, s1 = w1
    p2, s2 = w2
    return (tuple(p1[p2[i]] for i in range(len(p1))),
            tuple(s2[i] * s1[p2[i]] for i in range(len(p1))))


def inverse_weyl(w: Weyl) -> Weyl:
    p, s = w
    n = len(p)
    inv = [0] * n
    sg = [1] * n
    for i in range(n):
        inv[p[i]] = i
        sg[p[i]] = s[i]
    return (tuple(inv), tuple(sg))


def act_on_vector(w: Weyl, v: Sequence) -> tuple:
    p, s = w
    out = [0] * len(v)
    for i, x in enumerate(v):
        out[p[i]] = s[i] * x
    return tuple(out)


def reflection(alpha: Sequence[int]) -> Weyl:
    """Reflection in a root of the form x_i - x_j, x_i + x_j, or x_i."""
    n = len(alpha)
    nz = [i for i, a in enumerate(alpha) if a]
    perm = list(range(n))
    signs = [1] * n
    if len(nz) == 1:
        signs[nz[0]] = -1
    elif len(nz) == 2:
        i, j = nz
        perm[i], perm[j] = j, i
        if alpha[i] == alpha[j]:
            signs[i] = signs[j] = -1
    else:
        raise SchemaError(f"unsupported root {alpha}")
    return (tuple(perm), tuple(signs))


class RootDatum:
    """A classical root datum in standard torus coordinates."""

    def __init__(self, family: str, rank: int):
        if family not in FAMILIES:
            raise SchemaError(f"unknown family {family!r}")
        self.family = family
        self.rank = rank
        n = rank
        if family in ("GL", "SL", "PGL"):
            if n < 1 or (family != "GL" and n < 2):
                raise PreconditionError(f"{family}_{n} needs n >= {1 if family == 'GL' else 2}")
            self.nvars = n
            pos = []
            for i, j in combinations(range(n), 2):
                a = [0] * n
                a[i], a[j] = 1, -1
                pos.append(tuple(a))
            simple = [pos_root(n, i, i + 1, -1) for i in range(n - 1)]
            if family == "GL":
                gens = [(f"e{i}", elementary(i, n), 2 * i) for i in range(1, n + 1)]
                self.pi1_order = 1
                self.dim_g = n * n
            else:
                gens = [(f"e{i}", elementary(i, n), 2 * i) for i in range(2, n + 1)]
                self.pi1_order = 1 if family == "SL" else n
                self.dim_g = n * n - 1
            lattice = [pos_root(n, i, i + 1, -1) for i in range(n - 1)]
        elif family == "SO_odd":
            if n < 1:
                raise PreconditionError("SO(2m+1) needs m >= 1")
            self.nvars = n
            pos = [pos_root(n, i, j, s) for i, j in combinations(range(n), 2) for s in (-1, 1)]
            pos += [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
            simple = [pos_root(n, i, i + 1, -1) for i in range(n - 1)]
            simple.append(tuple(1 if k == n - 1 else 0 for k in range(n)))
            sq = [Poly.var(i, n) ** 2 for i in range(n)]
            gens = [(f"e{i}^(2)", elementary(i, n).substitute(sq), 4 * i) for i in range(1, n + 1)]
            self.pi1_order = 2
            self.dim_g = n * (2 * n + 1)
            lattice = _even_sum_basis(n)
        else:
            if n < 2:
                raise PreconditionError("SO(2m) needs m >= 2")
            self.nvars = n
            pos = [pos_root(n, i, j, s) for i, j in combinations(range(n), 2) for s in (-1, 1)]
            simple = [pos_root(n, i, i + 1, -1) for i in range(n - 1)]
            simple.append(pos_root(n, n - 2, n - 1, 1))
            sq = [Poly.var(i, n) ** 2 for i in range(n)]
            gens = [(f"e{i}^(2)", elementary(i, n).substitute(sq), 4 * i) for i in range(1, n)]
            pf = Poly.monomial([1] * n)
            gens.append(("Pf", pf, 2 * n))
            self.pi1_order = 2
            self.dim_g = n * (2 * n - 1)
            lattice = _even_sum_basis(n)
        self.positive_roots: List[tuple] = pos
        self.roots: List[tuple] = pos + [tuple(-a for a in r) for r in pos]
        self.simple_roots: List[tuple] = simple
        self.coroot_lattice: List[tuple] = lattice
        self.fundamental_invariants: List[Tuple[str, Poly, int]] = gens
        self.simple_reflections: List[Weyl] = [reflection(a) for a in simple]
        self._gen_monos: Dict[int, list] = {}

    def __repr__(self):
        return f"RootDatum({self.family}, {self.rank})"

    @property
    def label(self) -> str:
        tag = {"GL": "gl", "SL": "sl", "PGL": "pgl", "SO_odd": "so-odd", "SO_even": "so-even"}
        return f"{tag[self.family]}:{self.rank}"

    @property
    def is_type_a(self) -> bool:
        return self.family in ("GL", "SL", "PGL")

    @property
    def semisimple(self) -> bool:
        return self.family != "GL"

    def weyl_order(self) -> int:
        from math import factorial

        n = self.rank
        if self.is_type_a:
            return factorial(n)
        if self.family == "SO_odd":
            return factorial(n) * 2 ** n
        return factorial(n) * 2 ** (n - 1)

    # coweights
    def pair(self, alpha: Sequence, mu: Sequence):
        return sum(Fraction(a) * Fraction(m) for a, m in zip(alpha, mu))

    def check_coweight(self, mu: Sequence) -> tuple:
        """Validate and normalise a coweight; returns a tuple of Fractions."""
        if len(mu) != self.nvars:
            raise SchemaError(f"coweight needs {self.nvars} coordinates")
        try:
            v = tuple(Fraction(x) for x in mu)
        except (TypeError, ValueError):
            raise SchemaError(f"bad coweight {mu!r}")
        if self.family in ("SL", "PGL") and sum(v) != 0:
            raise PreconditionError("coweight coordinates must sum to 0")
        if self.family == "PGL":
            if any(self.pair(a, v).denominator != 1 for a in self.simple_roots):
                raise PreconditionError("coweight does not pair integrally with roots")
        elif any(x.denominator != 1 for x in v):
            raise PreconditionError("coweight must be integral")
        return v

    def in_coroot_lattice(self, v: Sequence) -> bool:
        v = [Fraction(x) for x in v]
        if any(x.denominator != 1 for x in v):
            return False
        if self.is_type_a:
            return sum(v) == 0
        return sum(v) % 2 == 0

    def is_minuscule(self, mu: Sequence) -> bool:
        return all(self.pair(a, mu) in (-1, 0, 1) for a in self.positive_roots)

    def D(self, mu: Sequence) -> int:
        """D_mu = number of roots negative on mu = <2 rho, mu> for dominant mu."""
        return sum(1 for a in self.roots if self.pair(a, mu) < 0)

    # polynomials
    def reduce(self, f: Poly) -> Poly:
        """Normal form modulo e1 for SL/PGL; identity otherwise."""
        if self.family not in ("SL", "PGL"):
            return f
        n = self.nvars
        if f.n < n:
            raise SchemaError("polynomial has too few variables")
        imgs = [Poly.var(i, f.n) for i in range(f.n)]
        imgs[n - 1] = -sum((Poly.var(i, f.n) for i in range(n - 1)), Poly(f.n))
        if not any(m[n - 1] for m in f.terms):
            return f
        return f.substitute(imgs)

    def equal_mod(self, f: Poly, g: Poly) -> bool:
        return self.reduce(f - g).is_zero()

    def valid_weyl(self, w: Weyl) -> bool:
        p, s = w
        if sorted(p) != list(range(self.nvars)) or any(x not in (1, -1) for x in s):
            return False
        if self.is_type_a:
            return all(x == 1 for x in s)
        if self.family == "SO_even":
            return s.count(-1) % 2 == 0
        return True

    def is_invariant(self, f: Poly, gens: Sequence[Weyl] | None = None) -> bool:
        gens = self.simple_reflections if gens is None else gens
        return all(self.equal_mod(act(self, w, f), f) for w in gens)

    def stabilizer_generators(self, mu: Sequence) -> List[Weyl]:
        """Reflections generating W_mu (roots orthogonal to mu)."""
        return [reflection(a) for a in self.positive_roots if self.pair(a, mu) == 0]

    def stabilizer(self, mu: Sequence) -> List[Weyl]:
        gens = self.stabilizer_generators(mu)
        e = identity_weyl(self.nvars)
        seen = {e}
        queue = deque([e])
        while queue:
            w = queue.popleft()
            for s in gens:
                x = compose(s, w)
                if x not in seen:
                    seen.add(x)
                    queue.append(x)
        return sorted(seen)

    def reynolds(self, f: Poly, mu: Sequence) -> Poly:
        """Average of f over W_mu."""
        group = self.stabilizer(mu)
        total = Poly(f.n)
        for w in group:
            total = total + act(self, w, f)
        return total.scale(Fraction(1, len(group)))

    # generator monomials
    def generator_monomials(self, k: int):
        """Pairs (exponent vector, polynomial) of polynomial degree k."""
        if k in self._gen_monos:
            return self._gen_monos[k]
        degs = [d // 2 for _, _, d in self.fundamental_invariants]
        out = []

        def rec(i, left, exps):
            if i == len(degs):
                if left == 0:
                    out.append(tuple(exps))
                return
            for a in range(left // degs[i] + 1):
                rec(i + 1, left - a * degs[i], exps + [a])

        rec(0, k, [])
        polys = [g for _, g, _ in self.fundamental_invariants]
        res = []
        for e in out:
            p = Poly.const(1, self.nvars)
            for g, a in zip(polys, e):
                if a:
                    p = p * g ** a
            res.append((e, p))
        self._gen_monos[k] = res
        return res


def pos_root(n, i, j, s):
    a = [0] * n
    a[i] = 1
    a[j] = s
    return tuple(a)


def _even_sum_basis(n):
    basis = [pos_root(n, i, i + 1, -1) for i in range(n - 1)]
    v = [0] * n
    v[-1] = 2
    if n >= 2:
        basis.append(pos_root(n, n - 2, n - 1, 1))
    else:
        basis.append(tuple(v))
    return basis


def parse_family(spec: str) -> Tuple[str, int]:
    try:
        fam, num = spec.strip().lower().split(":")
        return _ALIASES[fam], int(num)
    except (ValueError, KeyError):
        raise SchemaError(f"bad root datum {spec!r}; expected e.g. gl:3, pgl:2, so-odd:2, so-even:3")


def build_root_datum(family: str, n: int) -> RootDatum:
    fam = _ALIASES.get(family.lower(), family) if isinstance(family, str) else family
    if fam not in FAMILIES:
        raise SchemaError(f"unsupported family {family!r}")
    if not isinstance(n, int):
        raise SchemaError("rank must be an integer")
    return RootDatum(fam, n)


def root_datum_from_string(spec: str) -> RootDatum:
    return build_root_datum(*parse_family(spec))


def act(rd: RootDatum, w: Weyl, f: Poly) -> Poly:
    if not rd.valid_weyl(w):
        raise PreconditionError(f"{w} is not a Weyl element for {rd.label}")
    p, s = w
    if f.n > len(p):
        extra = range(len(p), f.n)
        p = tuple(p) + tuple(extra)
        s = tuple(s) + (1,) * len(extra)
    return f.signed_permute(p, s)


def weyl_cosets(rd: RootDatum, mu: Sequence) -> List[Tuple[Weyl, tuple]]:
    """One (w, w.mu) per point of the orbit W.mu, found by BFS."""
    mu = tuple(Fraction(x) for x in mu)
    start = identity_weyl(rd.nvars)
    seen = {mu: start}
    queue = deque([mu])
    while queue:
        v = queue.popleft()
        w = seen[v]
        for s in rd.simple_reflections:
            nv = act_on_vector(s, v)
            if nv not in seen:
                seen[nv] = compose(s, w)
                queue.append(nv)
    return [(w, v) for v, w in seen.items()]


def partial_derivative(f: Poly, mu: Sequence) -> Poly:
    return f.directional([Fraction(x) for x in mu])


def _symmetrize(f: Poly, n: int) -> Poly:
    from itertools import permutations

    total = Poly(f.n)
    count = 0
    for p in permutations(range(n)):
        total = total + f.signed_permute(p, (1,) * n)
        count += 1
    return total.scale(Fraction(1, count))


def _solve_symmetric(rd: RootDatum, target: Poly) -> Poly:
    # S_n-invariant polynomials are determined by their sorted monomials
    k_gens = len(rd.fundamental_invariants)
    out = Poly(k_gens)
    for k in sorted({sum(m) for m in target.terms}):
        part = target.homogeneous_part(k)
        if k == 0:
            out = out + Poly.const(part.constant_term(), k_gens)
            continue
        basis = rd.generator_monomials(k)
        rows = {m for _, p in basis for m in p.terms} | set(part.terms)
        rows = sorted(m for m in rows if all(m[i] >= m[i + 1] for i in range(len(m) - 1)))
        a = [[p.terms.get(m, 0) for _, p in basis] for m in rows]
        b = [part.terms.get(m, 0) for m in rows]
        x = solve(a, b) if basis else None
        if x is None:
            raise InconsistencyError("invariant not expressible in the generators")
        g = Poly(k_gens, {e: c for (e, _), c in zip(basis, x) if c})
        check = substitute_invariants(rd, g)
        if check != part:
            raise InconsistencyError("generator expansion does not reproduce the input")
        out = out + g
    return out


def express_in_invariants(rd: RootDatum, f: Poly, check: bool = True) -> Poly:
    """Write f as a polynomial in rd.fundamental_invariants.

    The result is a Poly whose variables are the generators in order.  For
    SL/PGL the identity holds modulo e1.
    """
    if check and not rd.is_invariant(f):
        raise PreconditionError("polynomial is not Weyl-invariant")
    if rd.family not in ("SL", "PGL"):
        return _solve_symmetric(rd, f)
    n = rd.nvars
    sym = f if all(f.signed_permute(w[0], w[1]) == f for w in rd.simple_reflections) else _symmetrize(f, n)
    gl = _gl_of(rd)
    full = _solve_symmetric(gl, sym)
    # drop every term involving e1
    return Poly(n - 1, {m[1:]: c for m, c in full.terms.items() if m[0] == 0})


_GL_CACHE: Dict[int, "RootDatum"] = {}


def _gl_of(rd: RootDatum) -> RootDatum:
    if rd.nvars not in _GL_CACHE:
        _GL_CACHE[rd.nvars] = RootDatum("GL", rd.nvars)
    return _GL_CACHE[rd.nvars]


def substitute_invariants(rd: RootDatum, g: Poly) -> Poly:
    """Inverse of express_in_invariants."""
    return g.substitute([p for _, p, _ in rd.fundamental_invariants])


def divided_difference_table(f, points: Sequence) -> Fraction:
    """Newton divided difference f[x_1, ..., x_n] for a univariate f.

    f may be a callable, a univariate Poly, or a coefficient list.
    """
    pts = [Fraction(p) for p in points]
    if len(set(pts)) != len(pts):
        raise PreconditionError("divided difference points must be distinct")
    if isinstance(f, Poly):
        fn = lambda z: Fraction(f.evaluate([z]))  # noqa: E731
    elif callable(f):
        fn = lambda z: Fraction(f(z))  # noqa: E731
    else:
        coeffs = [Fraction(c) for c in f]
        fn = lambda z: sum(c * z ** k for k, c in enumerate(coeffs))  # noqa: E731
    vals = [fn(p) for p in pts]
    n = len(pts)
    table = list(vals)
    for level in range(1, n):
        table = [(table[i + 1] - table[i]) / (pts[i + level] - pts[i]) for i in range(n - level)]
    newton = table[0]
    lagrange = Fraction(0)
    for j, xj in enumerate(pts):
        deriv = Fraction(1)
        for k, xk in enumerate(pts):
            if k != j:
                deriv *= xj - xk
        lagrange += vals[j] / deriv
    if newton != lagrange:
        raise InconsistencyError("Newton table disagrees with the Lagrange sum")
    return newton


def standard_coweights(rd: RootDatum) -> List[tuple]:
    """The dominant minuscule coweights handled by the toolkit (no spin coweights)."""
    n = rd.nvars
    if rd.family == "GL":
        out = [tuple([1] * k + [0] * (n - k)) for k in range(n + 1)]
        out += [tuple([0] * (n - k) + [-1] * k) for k in range(1, n + 1)]
    elif rd.family in ("SL", "PGL"):
        out = [(0,) * n]
        for k in range(1, n):
            base = [1] * k + [0] * (n - k)
            avg = Fraction(k, n)
            out.append(tuple(Fraction(x) - avg for x in base))
        if rd.family == "SL":
            out = [m for m in out if rd.in_coroot_lattice(m)]
    else:
        out = [(0,) * n, tuple([1] + [0] * (n - 1))]
    return [rd.check_coweight(m) for m in out]
