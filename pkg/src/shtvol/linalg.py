"""Exact linear algebra over the rationals.

Matrices are lists of lists of ints/Fractions.  Everything here is dense
except ``SparseReducer``, an incremental echelon form over dict rows.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, List, Sequence

from .errors import PreconditionError


def _f(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def _n(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(a, b):
    bt = list(zip(*b)) if b else []
    return [[_n(sum(x * y for x, y in zip(row, col))) for col in bt] for row in a]


def matvec(a, v):
    return [_n(sum(x * y for x, y in zip(row, v))) for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)]


def rref(mat: Sequence[Sequence]):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    m = [[_f(x) for x in row] for row in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(mat) -> int:
    return len(rref(mat)[1]) if mat else 0


def solve(a, b):
    """One solution x of a x = b (free variables set to 0), or None."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [list(a[i]) + [b[i]] for i in range(rows)]
    m, piv = rref(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(piv):
        x[c] = m[i][cols]
    return [_n(v) for v in x]


def inverse(a):
    n = len(a)
    aug = [list(a[i]) + identity(n)[i] for i in range(n)]
    m, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise PreconditionError("matrix is singular")
    return [[_n(x) for x in row[n:]] for row in m]


def det(a):
    n = len(a)
    m = [[_f(x) for x in row] for row in a]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return _n(d)


def charpoly(a) -> List:
    """Coefficients [c_0, ..., c_n] of det(t I - a), via Faddeev-LeVerrier."""
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        am = matmul(a, m)
        m = [[_f(am[i][j]) + (coeffs[n - k + 1] if i == j else 0) for j in range(n)]
             for i in range(n)]
        am = matmul(a, m)
        coeffs[n - k] = -_f(sum(am[i][i] for i in range(n))) / k
    return [_n(c) for c in coeffs]


def _divisors(n: int):
    n = abs(n)
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            out.append(n // i)
        i += 1
    return sorted(set(out))


def rational_roots(coeffs: Sequence) -> List[Fraction]:
    """Rational roots with multiplicity of sum c_k t^k."""
    cs = [_f(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    roots = []
    while cs and cs[0] == 0:
        roots.append(Fraction(0))
        cs.pop(0)
    if len(cs) <= 1:
        return roots
    den = 1
    for c in cs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in cs]
    cands = set()
    for p in _divisors(ints[0]):
        for q in _divisors(ints[-1]):
            cands.add(Fraction(p, q))
            cands.add(Fraction(-p, q))
    for r in sorted(cands):
        while len(ints) > 1:
            # synthetic division by (t - r)
            acc = Fraction(0)
            out = []
            for c in reversed(ints):
                acc = acc * r + c
                out.append(acc)
            if out[-1] != 0:
                break
            roots.append(r)
            quot = list(reversed(out[:-1]))
            ints = quot
    return sorted(roots)


def is_scalar(a) -> bool:
    n = len(a)
    return all(a[i][j] == (a[0][0] if i == j else 0) for i in range(n) for j in range(n))


class SparseReducer:
    """Incremental echelon basis of a span of sparse vectors (dict key -> coeff).

    Keys must be orderable; each stored row has a pivot equal to its
    largest key and pivot coefficient 1.
    """

    def __init__(self):
        self.rows: Dict[object, Dict] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: Dict) -> Dict:
        # rows are kept fully reduced, so one pass suffices
        v = {k: c for k, c in vec.items() if c != 0}
        for k in [k for k in v if k in self.rows]:
            c = v.get(k)
            if not c:
                continue
            for k2, c2 in self.rows[k].items():
                val = v.get(k2, 0) - c * c2
                if val:
                    v[k2] = val
                else:
                    v.pop(k2, None)
        return v

    def add(self, vec: Dict) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        p = max(v)
        inv = Fraction(1) / _f(v[p])
        row = {k: _n(c * inv) for k, c in v.items()}
        # keep other rows reduced against the new pivot
        for q, r in self.rows.items():
            c = r.get(p)
            if c:
                for k2, c2 in row.items():
                    val = r.get(k2, 0) - c * c2
                    if val:
                        r[k2] = val
                    else:
                        r.pop(k2, None)
        self.rows[p] = row
        return True

    def contains(self, vec: Dict) -> bool:
        return not self.reduce(vec)
