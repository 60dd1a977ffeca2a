"""Sparse multivariate polynomials with exact rational coefficients.

Coefficients are Python ints or ``fractions.Fraction``; ints are kept as ints
so that integral computations stay on the fast path.  A polynomial in ``n``
variables ``x1..xn`` is a dict from exponent tuples to nonzero coefficients.
Cohomological degree is twice the polynomial degree.
"""
from __future__ import annotations

from fractions import Fraction
from operator import add
from typing import Dict, Iterable, Sequence, Tuple

Mono = Tuple[int, ...]


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Poly:
    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Dict[Mono, object] | None = None):
        self.n = n
        self.terms = {} if terms is None else {m: c for m, c in terms.items() if c != 0}

    # construction
    @classmethod
    def _raw(cls, n, terms):
        p = cls.__new__(cls)
        p.n = n
        p.terms = terms
        return p

    @classmethod
    def const(cls, c, n: int) -> "Poly":
        return cls(n, {(0,) * n: _norm(c)}) if c != 0 else cls(n)

    @classmethod
    def var(cls, i: int, n: int) -> "Poly":
        m = [0] * n
        m[i] = 1
        return cls._raw(n, {tuple(m): 1})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "Poly":
        n = len(coeffs)
        t = {}
        for i, c in enumerate(coeffs):
            if c != 0:
                m = [0] * n
                m[i] = 1
                t[tuple(m)] = _norm(c)
        return cls._raw(n, t)

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Poly":
        return cls(len(exps), {tuple(exps): c})

    # basic protocol
    def copy(self) -> "Poly":
        return Poly._raw(self.n, dict(self.terms))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.n == other.n and self.terms == other.terms
        if other == 0:
            return not self.terms
        return self.terms == {(0,) * self.n: other}

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.n != self.n:
                raise ValueError("variable count mismatch")
            return other
        return Poly.const(other, self.n)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = t.get(m, 0) + c
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return Poly._raw(self.n, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        if c == 0:
            return Poly(self.n)
        c = _norm(c)
        return Poly._raw(self.n, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        if other.n != self.n:
            raise ValueError("variable count mismatch")
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        res: Dict[Mono, object] = {}
        get = res.get
        for m2, c2 in b.items():
            for m1, c1 in a.items():
                m = tuple(map(add, m1, m2))
                res[m] = get(m, 0) + c1 * c2
        return Poly._raw(self.n, {m: c for m, c in res.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, Poly):
            return self.exact_div(c)
        return self.scale(Fraction(1) / Fraction(c))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Poly.const(1, self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # inspection
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def cdeg(self) -> int:
        """Cohomological degree (twice the polynomial degree)."""
        return 2 * self.degree()

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def homogeneous_part(self, k: int) -> "Poly":
        return Poly._raw(self.n, {m: c for m, c in self.terms.items() if sum(m) == k})

    def coeff(self, mono: Mono):
        return self.terms.get(tuple(mono), 0)

    def constant_term(self):
        return self.terms.get((0,) * self.n, 0)

    def variables(self) -> set:
        return {i for m in self.terms for i, e in enumerate(m) if e}

    # transformations
    def diff(self, i: int) -> "Poly":
        t = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                mm = list(m)
                mm[i] = e - 1
                t[tuple(mm)] = c * e
        return Poly._raw(self.n, t)

    def directional(self, mu: Sequence) -> "Poly":
        """Sum_k mu_k d/dx_k."""
        out = Poly(self.n)
        for k, a in enumerate(mu):
            if a != 0:
                out = out + self.diff(k).scale(a)
        return out

    def signed_permute(self, perm: Sequence[int], signs: Sequence[int]) -> "Poly":
        """Substitute x_i -> signs[i] * x_{perm[i]}."""
        t = {}
        n = self.n
        for m, c in self.terms.items():
            mm = [0] * n
            s = 1
            for i, e in enumerate(m):
                if e:
                    mm[perm[i]] = e
                    if signs[i] < 0 and e & 1:
                        s = -s
            t[tuple(mm)] = c if s > 0 else -c
        return Poly._raw(n, t)

    def substitute(self, images: Sequence["Poly"]) -> "Poly":
        """Replace x_i by images[i] (all images share a variable count)."""
        if len(images) != self.n:
            raise ValueError("need one image per variable")
        m_out = images[0].n if images else 0
        cache: Dict[Tuple[int, int], Poly] = {}

        def pw(i, e):
            key = (i, e)
            if key not in cache:
                cache[key] = images[i] ** e
            return cache[key]

        out = Poly(m_out)
        for m, c in self.terms.items():
            term = Poly.const(c, m_out)
            for i, e in enumerate(m):
                if e:
                    term = term * pw(i, e)
            out = out + term
        return out

    def evaluate(self, point: Sequence):
        total = 0
        for m, c in self.terms.items():
            v = c
            for x, e in zip(point, m):
                if e:
                    v = v * x ** e
            total += v
        return _norm(Fraction(total)) if isinstance(total, Fraction) else total

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.n, {m: fn(c) for m, c in self.terms.items()})

    def extend(self, n_new: int, offset: int = 0) -> "Poly":
        """Embed into a ring with more variables, shifting indices by offset."""
        t = {}
        for m, c in self.terms.items():
            mm = [0] * n_new
            mm[offset:offset + self.n] = m
            t[tuple(mm)] = c
        return Poly._raw(n_new, t)

    # division
    def div_linear(self, beta: "Poly") -> "Poly":
        """Exact quotient by a linear form; raises ArithmeticError on remainder."""
        lin = {m.index(1): c for m, c in beta.terms.items()}
        if not lin or any(sum(m) != 1 for m in beta.terms):
            raise ValueError("divisor must be a nonzero linear form")
        v = min(lin)
        lead = lin.pop(v)
        rest = [(i, c) for i, c in lin.items()]
        # group self by exponent of x_v
        groups: Dict[int, Dict[Mono, object]] = {}
        for m, c in self.terms.items():
            e = m[v]
            mm = m[:v] + (0,) + m[v + 1:]
            groups.setdefault(e, {})[mm] = c
        if not groups:
            return Poly(self.n)
        top = max(groups)
        quot: Dict[Mono, object] = {}
        prev: Dict[Mono, object] = {}
        integral_lead = lead in (1, -1)
        for k in range(top, 0, -1):
            cur = dict(groups.get(k, {}))
            for mm, c in prev.items():
                for i, a in rest:
                    m2 = list(mm)
                    m2[i] += 1
                    m2 = tuple(m2)
                    val = cur.get(m2, 0) - a * c
                    if val:
                        cur[m2] = val
                    else:
                        cur.pop(m2, None)
            if integral_lead:
                q = {mm: (c * lead) for mm, c in cur.items()}
            else:
                q = {mm: _norm(Fraction(c) / lead) for mm, c in cur.items()}
            for mm, c in q.items():
                m2 = list(mm)
                m2[v] = k - 1
                quot[tuple(m2)] = c
            prev = q
        rem = dict(groups.get(0, {}))
        for mm, c in prev.items():
            for i, a in rest:
                m2 = list(mm)
                m2[i] += 1
                m2 = tuple(m2)
                val = rem.get(m2, 0) - a * c
                if val:
                    rem[m2] = val
                else:
                    rem.pop(m2, None)
        if rem:
            raise ArithmeticError("nonzero remainder in division by linear form")
        return Poly._raw(self.n, quot)

    def exact_div(self, other: "Poly") -> "Poly":
        """Exact multivariate division (lex order); remainder must vanish."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if other.degree() == 1 and other.is_homogeneous():
            return self.div_linear(other)
        lm = max(other.terms)
        lc = other.terms[lm]
        rem = dict(self.terms)
        quot: Dict[Mono, object] = {}
        while rem:
            m = max(rem)
            c = rem[m]
            shift = tuple(a - b for a, b in zip(m, lm))
            if min(shift) < 0:
                raise ArithmeticError("nonzero remainder in exact division")
            qc = _norm(Fraction(c) / lc) if not (isinstance(c, int) and isinstance(lc, int) and c % lc == 0) else c // lc
            quot[shift] = qc
            for m2, c2 in other.terms.items():
                mm = tuple(map(add, m2, shift))
                v = rem.get(mm, 0) - qc * c2
                if v:
                    rem[mm] = v
                else:
                    rem.pop(mm, None)
        return Poly._raw(self.n, quot)

    # display
    def __repr__(self):
        return f"Poly({self.to_str()})"

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.n)]
        parts = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            mono = "*".join(
                names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(m) if e
            )
            if not mono:
                s = str(c)
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{c}*{mono}" if not isinstance(c, Fraction) else f"({c})*{mono}"
            parts.append(s)
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


def elementary(k: int, n: int, idx: Iterable[int] | None = None) -> Poly:
    """Elementary symmetric polynomial e_k in the variables listed by idx."""
    idx = list(range(n)) if idx is None else list(idx)
    from itertools import combinations

    t = {}
    for comb in combinations(idx, k):
        m = [0] * n
        for i in comb:
            m[i] = 1
        t[tuple(m)] = 1
    if k == 0:
        t = {(0,) * n: 1}
    return Poly._raw(n, t)


def complete_homogeneous(k: int, n: int, idx: Iterable[int] | None = None) -> Poly:
    """Complete homogeneous symmetric polynomial h_k (h_k = 0 for k < 0)."""
    from itertools import combinations_with_replacement

    idx = list(range(n)) if idx is None else list(idx)
    if k < 0:
        return Poly(n)
    t = {}
    for comb in combinations_with_replacement(idx, k):
        m = [0] * n
        for i in comb:
            m[i] += 1
        t[tuple(m)] = 1
    return Poly._raw(n, t)


def power_sum(k: int, n: int, idx: Iterable[int] | None = None) -> Poly:
    idx = list(range(n)) if idx is None else list(idx)
    out = Poly(n)
    for i in idx:
        out = out + Poly.var(i, n) ** k
    return out
