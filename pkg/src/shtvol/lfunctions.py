"""Curves over F_q, zeta and Artin L-functions as rational functions of t = q^-s.

Derivatives in s are never taken directly.  With t = q^-s one has
-(log q)^-1 d/ds = t d/dt =: theta, so every s-derivative in a volume
formula becomes a theta-derivative and stays in Q.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .errors import InconsistencyError, PreconditionError, SchemaError
from .linalg import charpoly, det, inverse, matmul, transpose

# univariate polynomials: coefficient lists, index = power of t


def _fr(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError:
            raise SchemaError(f"bad rational {x!r}")
    if isinstance(x, float):
        raise SchemaError("floating point values are not accepted; use strings like '1/3'")
    return Fraction(x)


def ptrim(p):
    p = [_fr(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def padd(a, b):
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def pscale(a, c):
    return ptrim([x * c for x in a])


def psub(a, b):
    return padd(a, pscale(b, -1))


def pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ptrim(out)


def ppow(a, k):
    out = [Fraction(1)]
    for _ in range(k):
        out = pmul(out, a)
    return out


def peval(a, t):
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * t + c
    return acc


def ptheta(a):
    return ptrim([k * c for k, c in enumerate(a)])


def psubst_scale(a, c):
    """p(t) -> p(c t)."""
    c = _fr(c)
    return ptrim([x * c ** k for k, x in enumerate(a)])


def psubst_power(a, k):
    """p(t) -> p(t^k)."""
    out = [Fraction(0)] * ((len(a) - 1) * k + 1) if a else []
    for i, x in enumerate(a):
        out[i * k] = x
    return ptrim(out)


def pdivmod(a, b):
    a = ptrim(a)
    b = ptrim(b)
    if not b:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        c = r[-1] / b[-1]
        k = len(r) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            r[i + k] -= c * y
        r = ptrim(r)
    return ptrim(q), r


class LSeries:
    """A rational function num(t)/den(t) with den(0) != 0.

    ``pole_one`` and ``pole_q`` record the multiplicity of the factors
    (1 - t) and (1 - q t) in the denominator.
    """

    __slots__ = ("num", "den", "q", "pole_one", "pole_q")

    def __init__(self, num, den=(1,), q=None, pole_one=0, pole_q=0):
        self.num = ptrim(num)
        self.den = ptrim(den)
        if not self.den or self.den[0] == 0:
            raise SchemaError("L-series denominator must be nonzero at t = 0")
        self.q = q
        self.pole_one = pole_one
        self.pole_q = pole_q

    def __repr__(self):
        return f"LSeries(num={[str(c) for c in self.num]}, den={[str(c) for c in self.den]})"

    def __call__(self, t):
        t = _fr(t)
        d = peval(self.den, t)
        if d == 0:
            raise PreconditionError(f"pole at t = {t}")
        return peval(self.num, t) / d

    def __mul__(self, other: "LSeries") -> "LSeries":
        return LSeries(pmul(self.num, other.num), pmul(self.den, other.den), self.q or other.q,
                       self.pole_one + other.pole_one, self.pole_q + other.pole_q)

    def __pow__(self, k: int) -> "LSeries":
        out = LSeries([1])
        for _ in range(k):
            out = out * self
        out.q = self.q
        return out

    def equals(self, other: "LSeries") -> bool:
        return pmul(self.num, other.den) == pmul(other.num, self.den)

    def scale_variable(self, c) -> "LSeries":
        """t -> c t."""
        return LSeries(psubst_scale(self.num, c), psubst_scale(self.den, c), self.q)

    def substitute_power(self, k: int) -> "LSeries":
        return LSeries(psubst_power(self.num, k), psubst_power(self.den, k), self.q)

    def shift(self, d: int) -> "LSeries":
        """L(s) -> L(s + d), i.e. t -> q^-d t."""
        out = self.scale_variable(Fraction(1, 1) / Fraction(self.q) ** d)
        if d == 0:
            out.pole_one, out.pole_q = self.pole_one, self.pole_q
        elif d == 1:
            out.pole_one = self.pole_q
        return out

    def remove_factor(self, factor) -> "LSeries":
        """Multiply by the polynomial factor, cancelling it from the denominator."""
        quo, rem = pdivmod(self.den, factor)
        if rem:
            return LSeries(pmul(self.num, factor), self.den, self.q)
        return LSeries(self.num, quo, self.q)

    def star(self) -> "LSeries":
        """(1 - t) L(t) with the pole at t = 1 cancelled."""
        return self.remove_factor([1, -1])

    def theta(self, k: int = 1) -> "LSeries":
        return theta_derivative(self, k)

    def series(self, order: int) -> List[Fraction]:
        """Power series coefficients in t up to t^order."""
        return series_div(self.num, self.den, order)


def series_div(num, den, order):
    out = []
    num = list(num) + [Fraction(0)] * (order + 1)
    inv0 = 1 / _fr(den[0])
    for k in range(order + 1):
        c = num[k] - sum(den[i] * out[k - i] for i in range(1, min(k, len(den) - 1) + 1))
        out.append(c * inv0)
    return out


def theta_derivative(L: LSeries, k: int) -> LSeries:
    """(t d/dt)^k L, exactly."""
    if k < 0:
        raise PreconditionError("derivative order must be >= 0")
    num, base = L.num, L.den
    tb = ptheta(base)
    m = 1
    for _ in range(k):
        # theta(N / B^m) = (theta(N) B - m N theta(B)) / B^(m+1)
        num = psub(pmul(ptheta(num), base), pscale(pmul(num, tb), m))
        m += 1
    return LSeries(num, ppow(base, m), L.q)


def log_derivative_at(L: LSeries, d: int) -> Fraction:
    """(theta L / L)(q^-d) = -(log q)^-1 L'(d)/L(d)."""
    t = Fraction(1) / Fraction(L.q) ** d if d >= 0 else Fraction(L.q) ** (-d)
    n = peval(L.num, t)
    de = peval(L.den, t)
    if n == 0 or de == 0:
        raise PreconditionError(f"L has a zero or pole at s = {d}")
    return peval(ptheta(L.num), t) / n - peval(ptheta(L.den), t) / de


class CurveData:
    """A curve X/F_q through its zeta numerator and H^1 Frobenius data.

    H^1 has basis zeta_1..zeta_2g; Frobenius acts by the matrix F (column b is
    the image of zeta_b) and cup product is zeta_a zeta_b = J[a][b] xi.
    """

    def __init__(self, q: int, g: int, h1: Sequence, frobenius=None, pairing=None,
                 name: str | None = None, check_weil: bool = False):
        if not isinstance(q, int) or q < 2:
            raise SchemaError("q must be an integer prime power >= 2")
        if not isinstance(g, int) or g < 0:
            raise SchemaError("genus must be a non-negative integer")
        self.q = q
        self.g = g
        self.name = name or f"q{q}g{g}"
        P = ptrim(h1)
        if any(c.denominator != 1 for c in P):
            raise SchemaError("h1 numerator must have integer coefficients")
        P = P + [Fraction(0)] * (2 * g + 1 - len(P))
        if len(P) != 2 * g + 1 or P[0] != 1:
            raise PreconditionError("h1 numerator must have degree 2g and constant term 1")
        for i in range(2 * g + 1):
            if P[2 * g - i] != Fraction(q) ** (g - i) * P[i]:
                raise PreconditionError("h1 numerator violates the functional equation a_{2g-i} = q^(g-i) a_i")
        self.P = P
        if frobenius is None:
            frobenius = default_frobenius(q, g, P)
        if pairing is None:
            pairing = standard_pairing(g)
        self.F = [[_fr(x) for x in row] for row in frobenius] if frobenius is not None else None
        self.J = [[_fr(x) for x in row] for row in pairing] if pairing is not None else None
        if self.F is not None:
            if len(self.F) != 2 * g or any(len(r) != 2 * g for r in self.F):
                raise SchemaError("Frobenius matrix must be 2g x 2g")
            cp = charpoly(self.F)
            # det(1 - tF) is the reversed characteristic polynomial
            if [_fr(c) for c in reversed(cp)] != P:
                raise PreconditionError("det(1 - tF) does not match the h1 numerator")
            if self.J is None:
                raise SchemaError("a pairing matrix is required with a Frobenius matrix")
            if matmul(matmul(transpose(self.F), self.J), self.F) != [[q * x for x in r] for r in self.J]:
                raise PreconditionError("Frobenius is not a similitude of factor q for the pairing")
            if (g and det(self.J) == 0) or any(self.J[a][b] != -self.J[b][a] for a in range(2 * g) for b in range(2 * g)):
                raise PreconditionError("pairing must be alternating and nondegenerate")
        if check_weil:
            self.check_weil()

    def __repr__(self):
        return f"CurveData(q={self.q}, g={self.g}, h1={[str(c) for c in self.P]})"

    @property
    def has_frobenius(self) -> bool:
        return self.F is not None

    def require_frobenius(self):
        if self.F is None:
            raise PreconditionError("this computation needs an explicit H^1 Frobenius matrix for g >= 2")
        return self.F

    def check_weil(self, tol: float = 1e-9):
        import numpy as np

        if self.g == 0:
            return True
        # np.roots wants the leading coefficient first; roots of P are 1/alpha
        roots = np.roots([float(c) for c in reversed(self.P)])
        for r in roots:
            if abs(abs(1 / r) - self.q ** 0.5) > tol * max(1.0, self.q ** 0.5):
                raise PreconditionError("Weil bound |alpha| = sqrt(q) fails")
        return True

    def zeta(self) -> LSeries:
        den = pmul([1, -1], [1, -self.q])
        return LSeries(self.P, den, self.q, pole_one=1, pole_q=1)

    def zeta_at(self, d: int) -> Fraction:
        return self.zeta()(Fraction(1, self.q ** d) if d >= 0 else Fraction(self.q ** (-d)))

    def log_derivative(self, d: int) -> Fraction:
        return log_derivative_at(self.zeta(), d)

    def trace_log_derivative(self, d: int) -> Fraction:
        """Tr((q^d phi^-1 - 1)^-1 | H*(X)) with the sign on H^1."""
        q = Fraction(self.q)
        val = 1 / (q ** d - 1) + 1 / (q ** (d - 1) - 1)
        if self.g:
            F = self.require_frobenius()
            n = 2 * self.g
            a = inverse([[q ** d * x - (1 if i == j else 0) for j, x in enumerate(row)]
                         for i, row in enumerate(inverse(F))])
            val -= sum(_fr(a[i][i]) for i in range(n))
        return val

    def pairing_inverse(self):
        return inverse(self.J) if self.J else []

    def to_json(self):
        out = {"q": self.q, "g": self.g, "h1": [str(c) for c in self.P]}
        if self.F is not None:
            out["frobenius"] = [[str(x) for x in r] for r in self.F]
            out["pairing"] = [[str(x) for x in r] for r in self.J]
        return out

    @classmethod
    def from_json(cls, obj) -> "CurveData":
        if isinstance(obj, str):
            if obj in CANONICAL_CURVES:
                return canonical_curve(obj)
            raise SchemaError(f"unknown curve name {obj!r}")
        if not isinstance(obj, dict) or "q" not in obj or "g" not in obj:
            raise SchemaError("curve needs fields q and g")
        try:
            q = int(obj["q"])
            g = int(obj["g"])
        except (TypeError, ValueError):
            raise SchemaError("q and g must be integers")
        h1 = obj.get("h1", [1] if g == 0 else None)
        if h1 is None:
            raise SchemaError("h1 numerator required for g > 0")
        return cls(q, g, h1, obj.get("frobenius"), obj.get("pairing"), obj.get("name"), check_weil=True)


def standard_pairing(g: int):
    """Block form J = [[0, 1], [-1, 0]] on each pair (zeta_{2k-1}, zeta_{2k})."""
    n = 2 * g
    J = [[0] * n for _ in range(n)]
    for k in range(g):
        J[2 * k][2 * k + 1] = 1
        J[2 * k + 1][2 * k] = -1
    return J


def default_frobenius(q: int, g: int, P):
    if g == 0:
        return []
    if g > 1:
        return None
    a = -P[1]
    if a * a == 4 * q:
        return [[a / 2, 0], [0, a / 2]]
    return [[0, -q], [1, a]]


CANONICAL_CURVES = {
    "q2g0": dict(q=2, g=0, h1=[1]),
    "q4g1": dict(q=4, g=1, h1=[1, -4, 4]),
}


def canonical_curve(name: str) -> CurveData:
    if name not in CANONICAL_CURVES:
        raise SchemaError(f"unknown canonical curve {name!r}")
    return CurveData(name=name, **CANONICAL_CURVES[name])


def canonical_curves() -> List[CurveData]:
    return [canonical_curve(n) for n in CANONICAL_CURVES]


def zeta_curve(c: CurveData) -> LSeries:
    return c.zeta()


def line_factor(curve: CurveData, d: int) -> LSeries:
    """zeta_X(s + d) in t = q^-s, starred (pole at s = 0 removed) when d = 1."""
    if d < 1:
        raise PreconditionError("motive degrees must be >= 1")
    f = curve.zeta().shift(d)
    return f.star() if d == 1 else f


def theta_value(L: LSeries, k: int, t=1) -> Fraction:
    return theta_derivative(L, k)(t)


def expand_operator_product(legs: Sequence[tuple], n: int) -> Dict[tuple, Fraction]:
    """Expand prod_j (c_j + sum_i eps_i(j) theta_i) into monomials in theta."""
    poly: Dict[tuple, Fraction] = {(0,) * n: Fraction(1)}
    for c, eps in legs:
        if len(eps) != n:
            raise SchemaError("eigenvalue vector length must equal the number of lines")
        new: Dict[tuple, Fraction] = {}
        for m, v in poly.items():
            if c:
                new[m] = new.get(m, 0) + v * _fr(c)
            for i, e in enumerate(eps):
                if e:
                    mm = list(m)
                    mm[i] += 1
                    mm = tuple(mm)
                    new[mm] = new.get(mm, 0) + v * _fr(e)
        poly = {m: v for m, v in new.items() if v}
    return poly


def apply_leg_operators(curve: CurveData, degrees: Sequence[int], legs: Sequence[tuple]) -> Fraction:
    """(prod_j (c_j + sum_i eps_i(j) theta_i)) L*(s_1..s_n) at s = 0."""
    degrees = list(degrees)
    if any(d < 1 for d in degrees):
        raise PreconditionError("motive degrees must be >= 1")
    factors = [line_factor(curve, d) for d in degrees]
    cache: Dict[tuple, Fraction] = {}

    def val(i, k):
        if (i, k) not in cache:
            cache[(i, k)] = theta_value(factors[i], k)
        return cache[(i, k)]

    total = Fraction(0)
    for m, c in expand_operator_product(legs, len(degrees)).items():
        term = c
        for i, k in enumerate(m):
            term *= val(i, k)
        total += term
    return total


# Artin L-functions

class ArtinLSystem:
    """Artin L-functions L_{Y,rho} of a Galois cover X -> Y with group Sigma."""

    def __init__(self, group: str, q: int, gY: int, reps: Sequence[dict], zeta_x=None):
        self.group = group
        self.q = int(q)
        self.gY = int(gY)
        self.reps = []
        names = set()
        for r in reps:
            try:
                name = str(r["name"])
                dim = int(r["dim"])
                num = ptrim(r["numerator"])
            except (KeyError, TypeError, ValueError):
                raise SchemaError("each rep needs name, dim and numerator")
            if name in names:
                raise SchemaError(f"duplicate rep {name!r}")
            names.add(name)
            self.reps.append({"name": name, "dim": dim, "numerator": num,
                              "dual": str(r.get("dual", name)),
                              "trivial": bool(r.get("trivial", name == "triv"))})
        triv = [r for r in self.reps if r["trivial"]]
        if len(triv) != 1 or triv[0]["dim"] != 1:
            raise InconsistencyError("exactly one one-dimensional trivial representation is required")
        self.zeta_x_numerator = ptrim(zeta_x) if zeta_x is not None else None
        self.validate()

    def rep(self, name):
        for r in self.reps:
            if r["name"] == name:
                return r
        raise SchemaError(f"unknown representation {name!r}")

    def L(self, name) -> LSeries:
        r = self.rep(name)
        if r["trivial"]:
            return LSeries(r["numerator"], pmul([1, -1], [1, -self.q]), self.q, 1, 1)
        return LSeries(r["numerator"], [1], self.q)

    def zeta_x(self) -> LSeries:
        out = LSeries([1], [1], self.q)
        for r in self.reps:
            out = out * (self.L(r["name"]) ** r["dim"])
        out.q = self.q
        return out

    @property
    def order(self) -> int:
        return sum(r["dim"] ** 2 for r in self.reps)

    @property
    def gX(self) -> int:
        return 1 + self.order * (self.gY - 1)

    def curve_x(self) -> CurveData:
        P = self.zeta_x().num
        return CurveData(self.q, self.gX, [int(c) for c in P], name=f"{self.group}-cover")

    def lam(self, name, d: int) -> Fraction:
        """theta L_rho / L_rho at s = d."""
        return log_derivative_at(self.L(name), d)

    def lam_class(self, coeffs: Dict[str, Fraction], d: int) -> Fraction:
        return sum((_fr(a) * self.lam(n, d) for n, a in coeffs.items()), Fraction(0))

    def validate(self):
        q = Fraction(self.q)
        for r in self.reps:
            num = r["numerator"]
            if not num or num[0] != 1 or any(c.denominator != 1 for c in num):
                raise InconsistencyError(f"numerator of {r['name']} must be integral with constant term 1")
            deg = 2 * self.gY if r["trivial"] else (2 * self.gY - 2) * r["dim"]
            num = num + [Fraction(0)] * (deg + 1 - len(num))
            if len(num) != deg + 1 or num[-1] == 0:
                raise InconsistencyError(f"numerator of {r['name']} must have degree {deg}")
            r["numerator"] = num
            if r["dual"] == r["name"]:
                half = Fraction(deg, 2)
                eps = num[-1] / q ** half
                if eps not in (1, -1) or any(num[deg - i] != eps * q ** (half - i) * num[i] for i in range(deg + 1)):
                    raise InconsistencyError(f"numerator of {r['name']} violates the functional equation")
            else:
                self.rep(r["dual"])
        for r in self.reps:
            for d in (2, 3):
                lhs = self.lam(r["name"], d) + self.lam(r["dual"], 1 - d)
                if lhs != (2 * self.gY - 2) * r["dim"]:
                    raise InconsistencyError("functional-equation degree bookkeeping fails")
        if self.zeta_x_numerator is not None:
            if not self.zeta_x().equals(LSeries(self.zeta_x_numerator, pmul([1, -1], [1, -self.q]))):
                raise InconsistencyError("product of Artin L-functions does not equal zeta_X")

    def to_json(self):
        return {"group": self.group, "q": self.q, "gY": self.gY,
                "reps": [{"name": r["name"], "dim": r["dim"], "dual": r["dual"],
                          "numerator": [str(c) for c in r["numerator"]]} for r in self.reps]}


def build_artin_system(data) -> ArtinLSystem:
    if not isinstance(data, dict):
        raise SchemaError("Artin data must be a JSON object")
    for key in ("group", "gY", "reps"):
        if key not in data:
            raise SchemaError(f"Artin data missing {key!r}")
    return ArtinLSystem(data["group"], data.get("q", 2), data["gY"], data["reps"], data.get("zetaX"))


def synthetic_artin_system(group: str, reps: Sequence[tuple], q: int = 2, gY: int = 2,
                           seed: int = 0) -> ArtinLSystem:
    """Random Weil-symmetric Artin data for self-dual reps given as (name, dim)."""
    rng = random.Random(seed)
    bound = int(2 * q ** 0.5)
    out = []
    for name, dim in reps:
        if name == "triv":
            num = [Fraction(1)]
            for _ in range(gY):
                num = pmul(num, [1, rng.randint(-bound, bound), q])
        else:
            num = [Fraction(1)]
            for _ in range((gY - 1) * dim):
                num = pmul(num, [1, rng.randint(-bound, bound), q])
        out.append({"name": name, "dim": dim, "numerator": num})
    return ArtinLSystem(group, q, gY, out)


# double covers for unitary groups

class DoubleCover:
    """Quadratic character chi of an etale double cover X' -> X via L(chi, t)."""

    def __init__(self, curve: CurveData, L_chi: Optional[LSeries] = None, kind: str = "constant"):
        self.curve = curve
        if L_chi is None:
            # constant field extension: chi(Frob_x) = (-1)^deg x, so L(chi, t) = Z_X(-t)
            L_chi = curve.zeta().scale_variable(-1)
            kind = "constant"
        self.L_chi = L_chi
        self.kind = kind

    def L_power(self, i: int) -> LSeries:
        return self.curve.zeta() if i % 2 == 0 else self.L_chi

    @classmethod
    def from_json(cls, curve: CurveData, obj) -> "DoubleCover":
        if obj is None or obj == "constant" or (isinstance(obj, dict) and obj.get("type") == "constant"):
            return cls(curve)
        if not isinstance(obj, dict) or "L_chi" not in obj:
            raise SchemaError("cover must be 'constant' or {'L_chi': [...]}")
        num = ptrim(obj["L_chi"])
        if not num or num[0] != 1:
            raise PreconditionError("L(chi) must have constant term 1")
        if len(num) - 1 != 2 * curve.g - 2:
            raise PreconditionError("L(chi) of a geometrically connected etale double cover has degree 2g - 2")
        cover = cls(curve, LSeries(num, [1], curve.q), kind="geometric")
        if "zeta_cover" in obj:
            lhs = LSeries(ptrim(obj["zeta_cover"]), pmul([1, -1], [1, -curve.q]))
            if not lhs.equals(curve.zeta() * cover.L_chi):
                raise PreconditionError("zeta of the cover is not zeta_X L(chi)")
        return cover
