"""Closed-form arithmetic volumes.

All s-derivatives appear as theta = t d/dt with t = q^-s, so the
(log q) factors in the statements cancel and every value is rational.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Optional, Sequence

from .characters import (
    FiniteGroupData,
    class_coefficients,
    convolve,
    dual,
    nu,
    phi_tuple,
    sign_value,
)
from .errors import InconsistencyError, PreconditionError
from .flag_calculus import degree_constants, eigenweight_report, nabla_matrix
from .lfunctions import (
    ArtinLSystem,
    CurveData,
    DoubleCover,
    LSeries,
    apply_leg_operators,
    log_derivative_at,
    series_div,
    theta_value,
)
from .linalg import matmul
from .poly import Poly
from .weyl_poly import RootDatum


@dataclass
class LegSpec:
    mu: tuple
    eta: Poly
    eta_prime: Poly
    omega: Fraction = Fraction(0)


@dataclass
class VolumeResult:
    value: Fraction
    theorem: str
    breakdown: Dict = field(default_factory=dict)

    def as_dict(self):
        return {"theorem": self.theorem, "value": self.value, "breakdown": self.breakdown}


def dim_bun(rd: RootDatum, curve: CurveData) -> int:
    return (curve.g - 1) * rd.dim_g


def check_admissible(rd: RootDatum, mus: Sequence[tuple]):
    total = [sum(Fraction(m[k]) for m in mus) for k in range(rd.nvars)]
    if not rd.in_coroot_lattice(total):
        raise PreconditionError("sum of the legs is not in the coroot lattice")


def _is_dominant(rd, mu):
    return all(rd.pair(a, mu) >= 0 for a in rd.positive_roots)


def leg_data(rd: RootDatum, legs: Sequence[LegSpec]):
    """Per-leg constants c_j and eigenvalue vectors, with the commutation check."""
    mats, reports = [], []
    for leg in legs:
        mu = rd.check_coweight(leg.mu)
        if not rd.is_minuscule(mu):
            raise PreconditionError(f"coweight {tuple(str(x) for x in mu)} is not minuscule")
        if not _is_dominant(rd, mu):
            raise PreconditionError(f"coweight {tuple(str(x) for x in mu)} is not dominant")
        reports.append(eigenweight_report(rd, mu, leg.eta))
        mats.append(reports[-1].matrix)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if matmul(mats[i], mats[j]) != matmul(mats[j], mats[i]):
                raise PreconditionError("leg operators do not commute; the volume formula does not apply")
    diagonal = all(m[a][b] == 0 for m in mats for a in range(len(m)) for b in range(len(m)) if a != b)
    same = all(m == mats[0] for m in mats)
    eps = []
    for rep in reports:
        if any(e is None for e in rep.eigenvalues):
            raise PreconditionError("irrational eigenweights are not supported")
        eps.append(rep.eigenvalues)
    if not diagonal and not same:
        raise PreconditionError("joint spectrum of non-diagonal commuting blocks is not supported")
    consts = []
    for leg in legs:
        d1, d2 = degree_constants(rd, leg.mu, leg.eta, leg.eta_prime, leg.omega)
        consts.append((d1, d2))
    return consts, eps


def volume_split(rd: RootDatum, legs: Sequence[LegSpec], curve: CurveData, total: bool = False) -> VolumeResult:
    if legs:
        check_admissible(rd, [rd.check_coweight(l.mu) for l in legs])
    consts, eps = leg_data(rd, legs)
    degrees = [d // 2 for _, _, d in rd.fundamental_invariants]
    ops = [(c1 + c2, e) for (c1, c2), e in zip(consts, eps)]
    lval = apply_leg_operators(curve, degrees, ops)
    qpow = Fraction(curve.q) ** dim_bun(rd, curve)
    value = qpow * lval
    factor = rd.pi1_order if (total and rd.semisimple) else 1
    value *= factor
    return VolumeResult(value, "split_volume", {
        "group": rd.label,
        "dim_bun": dim_bun(rd, curve),
        "q_power": qpow,
        "motive_degrees": degrees,
        "legs": [{"c": c1 + c2, "d_omega": c1, "d_eta_prime": c2, "eigenweights": e}
                 for (c1, c2), e in zip(consts, eps)],
        "operator_value": lval,
        "pi1_factor": factor,
        "total": bool(total and rd.semisimple),
    })


def _mu_abs(sign) -> int:
    return sign_value(sign)


def gl_b_coefficients(d: int, signs: Sequence, degs: Sequence[int]) -> List[Fraction]:
    """Coefficients b_i of prod_j (d - |mu_r| - ... - |mu_j| - |mu_j| D_j + |mu_j| N)."""
    r = len(signs)
    m = [_mu_abs(s) for s in signs]
    poly = [Fraction(1)]
    for j in range(r):
        omega_j = d - sum(m[j:])
        c0 = Fraction(omega_j - m[j] * degs[j])
        c1 = Fraction(m[j])
        new = [Fraction(0)] * (len(poly) + 1)
        for k, v in enumerate(poly):
            new[k] += v * c0
            new[k + 1] += v * c1
        poly = new
    return poly


def gl_legs(n: int, d: int, signs: Sequence, degs: Sequence[int]) -> List[LegSpec]:
    """eta, eta' and component labels for the colength-one GL_n legs."""
    m = [_mu_abs(s) for s in signs]
    legs = []
    for j, s in enumerate(signs):
        omega_j = d - sum(m[j:])
        if m[j] == 1:
            mu = (1,) + (0,) * (n - 1)
            t = Poly.var(0, n)
        else:
            mu = (0,) * (n - 1) + (-1,)
            t = -Poly.var(n - 1, n)
        legs.append(LegSpec(mu, t ** n, (t ** (n - 1)).scale(-degs[j]), Fraction(omega_j)))
    return legs


def _check_gl_signs(signs, degs):
    r = len(signs)
    if r % 2:
        raise PreconditionError("the GL_n closed form needs an even number of legs")
    m = [_mu_abs(s) for s in signs]
    if sum(m) != 0:
        raise PreconditionError("the GL_n closed form needs equally many sharp and flat legs")
    if len(degs) != r:
        raise PreconditionError("one bundle degree D_j per leg is required")


def gl_star_L(curve: CurveData, n: int) -> LSeries:
    """L*(s) = (1 - q^-s) prod_{i=1}^n zeta_X(s + i) in t = q^-s."""
    out = LSeries([1], [1], curve.q)
    z = curve.zeta()
    for i in range(1, n + 1):
        out = out * z.shift(i)
    out.q = curve.q
    return out.star()


def volume_gln(n: int, d: int, signs: Sequence, degs: Sequence[int], curve: CurveData) -> VolumeResult:
    _check_gl_signs(signs, degs)
    r = len(signs)
    b = gl_b_coefficients(d, signs, degs)
    L = gl_star_L(curve, n)
    acc = sum((b[i] * theta_value(L, i) for i in range(r + 1)), Fraction(0))
    sign = (-1) ** (r // 2)
    qpow = Fraction(curve.q) ** (n * n * (curve.g - 1))
    return VolumeResult(sign * qpow * acc, "gl_closed_form", {
        "n": n, "component": d, "signs": [("sharp" if _mu_abs(s) > 0 else "flat") for s in signs],
        "bundle_degrees": list(degs), "b": b, "q_power": qpow, "sign": sign,
    })


def volume_gln_split(n: int, d: int, signs, degs, curve: CurveData) -> VolumeResult:
    """The same volume through volume_split with explicit eta, eta'."""
    from .weyl_poly import build_root_datum

    _check_gl_signs(signs, degs)
    return volume_split(build_root_datum("GL", n), gl_legs(n, d, signs, degs), curve)


# unitary groups

def unitary_L(cover: DoubleCover, n: int) -> LSeries:
    """prod_{i=1}^n L(chi^i, q^-i t^2), i.e. L_{X,U(n)}(2s) in t = q^-s."""
    q = cover.curve.q
    out = LSeries([1], [1], q)
    for i in range(1, n + 1):
        out = out * cover.L_power(i).scale_variable(Fraction(1, q ** i)).substitute_power(2)
    out.q = q
    return out


def _theta_with_power(F: LSeries, D: int, r: int) -> Fraction:
    # theta^r (t^D F) at t = 1 = sum_k C(r, k) D^(r-k) theta^k F (1)
    return sum((comb(r, k) * Fraction(D) ** (r - k) * theta_value(F, k) for k in range(r + 1)), Fraction(0))


def volume_unitary(n: int, r: int, D: int, cover: DoubleCover) -> VolumeResult:
    if r % 2:
        raise PreconditionError("the unitary volume formula needs r even")
    curve = cover.curve
    F = unitary_L(cover, n)
    per = Fraction(curve.q) ** (n * n * (curve.g - 1)) * _theta_with_power(F, D, r)
    return VolumeResult(2 * per, "unitary_volume", {
        "n": n, "r": r, "D": D, "cover": cover.kind, "per_component": per, "components": 2,
    })


def volume_unitary_series(n: int, r: int, D: int, cover: DoubleCover) -> Fraction:
    """Second route: t = e^-u, theta = -d/du, read off r! [u^r]."""
    curve = cover.curve
    F = unitary_L(cover, n)
    order = r
    # e^-u and e^-Du as truncated series
    exp_m = [Fraction((-1) ** k, factorial(k)) for k in range(order + 1)]

    def compose(poly):
        out = [Fraction(0)] * (order + 1)
        power = [Fraction(1)] + [Fraction(0)] * order
        for c in poly:
            for k in range(order + 1):
                out[k] += c * power[k]
            power = _series_mul(power, exp_m, order)
        return out

    num = compose(F.num)
    den = compose(F.den)
    ser = series_div(num, den, order)
    shift = [Fraction((-D) ** k, factorial(k)) for k in range(order + 1)]
    ser = _series_mul(ser, shift, order)
    per = Fraction(curve.q) ** (n * n * (curve.g - 1)) * (-1) ** r * factorial(r) * ser[r]
    return 2 * per


def _series_mul(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i, x in enumerate(a[:order + 1]):
        if x:
            for j in range(order + 1 - i):
                out[i + j] += x * b[j]
    return out


# PGL_n with conjugate legs

def multinomial(total: int, parts: Sequence[int]) -> int:
    if any(p < 0 for p in parts) or sum(parts) != total:
        return 0
    out = factorial(total)
    for p in parts:
        out //= factorial(p)
    return out


def colmez_multinomials(n: int, r: int):
    top = (n - 1) * r + 1
    m0 = multinomial(top, [n] + [n - 1] * (r - 1))
    mj = {j: (multinomial(top, [n + j - 1, n - j] + [n - 1] * (r - 2)) if r >= 2 else 0)
          for j in range(2, n + 1)}
    return m0, mj


def colmez_constants(group: FiniteGroupData, artin: ArtinLSystem, sigma, j: int):
    """c_{i,i'}(j) as a matrix, from the pullback of Xi along (sigma_i, sigma_i')."""
    r = len(sigma)
    c = [[Fraction(0)] * r for _ in range(r)]
    for i in range(r):
        for k in range(r):
            if k >= i:
                x = group.mul(group.inv(sigma[i]), sigma[k])
                c[i][k] = sum((group.chi(group.dual(rho), x) * artin.lam(rho, j) for rho in group.rep_names()),
                              Fraction(0))
            else:
                x = group.mul(group.inv(sigma[k]), sigma[i])
                c[i][k] = -sum((group.chi(group.dual(rho), x) * artin.lam(rho, 1 - j) for rho in group.rep_names()),
                               Fraction(0))
    return c


def _check_artin(group: FiniteGroupData, artin: ArtinLSystem):
    names = set(group.rep_names())
    if {r["name"] for r in artin.reps} != names:
        raise PreconditionError("Artin data must list exactly the irreducible representations of the group")
    for rho in names:
        if artin.rep(rho)["dim"] != group.dim(rho):
            raise PreconditionError(f"dimension of {rho} disagrees with the character table")


def colmez_prefactor(n: int, artin: ArtinLSystem) -> Fraction:
    zx = artin.zeta_x()
    q = artin.q
    val = Fraction(q) ** ((n * n - 1) * (artin.gX - 1))
    for d in range(2, n + 1):
        val *= zx(Fraction(1, q ** d))
    return val


def volume_colmez(n: int, signs: Sequence, group: FiniteGroupData, sigma: Sequence,
                  artin: ArtinLSystem):
    """Both the multinomial form and the Artin L-function form; asserted equal."""
    _check_artin(group, artin)
    r = len(signs)
    if r < 1 or len(sigma) != r:
        raise PreconditionError("need one group element per leg and at least one leg")
    for s in signs:
        sign_value(s)
    m0, mj = colmez_multinomials(n, r)
    pref = colmez_prefactor(n, artin)
    # form (a): constants c_{i,i'}(j)
    bracket_a = Fraction(0)
    for j in range(2, n + 1):
        c = colmez_constants(group, artin, sigma, j)
        for i in range(r):
            bracket_a -= c[i][i] * m0
            for k in range(r):
                if k != i:
                    bracket_a -= (-1) ** (j * nu(signs, i, k)) * c[i][k] * mj[j]
    # form (b): zeta log-derivatives and class-function L-terms
    lam_x = {j: log_derivative_at(artin.zeta_x(), j) for j in range(2, n + 1)}
    order = group.order
    bracket_b = Fraction(0)
    printed = Fraction(0)
    terms = []
    for j in range(2, n + 1):
        phi = phi_tuple(group, sigma, signs, j)
        conv = convolve(phi, dual(phi))
        coeffs = class_coefficients(conv)
        lam_phi = artin.lam_class(coeffs, j)
        extra = (artin.gY - 1) * order ** 2 * mj[j] * (conv(group.identity) - Fraction(r, order))
        # theta L / L = -L'/(log q L)
        t1 = -r * (m0 - mj[j]) * lam_x[j]
        t2 = -order ** 2 * mj[j] * lam_phi
        bracket_b += t1 + t2 + extra
        printed += (m0 - mj[j]) * lam_x[j] + order ** 2 * mj[j] * lam_phi - extra
        terms.append({"j": j, "zeta_term": t1, "artin_term": t2, "genus_term": extra,
                      "class_function": {k: v for k, v in coeffs.items() if v}})
    if bracket_a != bracket_b:
        raise InconsistencyError("multinomial and Artin forms of the PGL volume disagree")
    base = {"n": n, "r": r, "group": group.name, "prefactor": pref, "M0": m0,
            "Mj": {str(k): v for k, v in mj.items()}}
    res_a = VolumeResult(pref * bracket_a, "colmez_multinomial", dict(base, bracket=bracket_a))
    res_b = VolumeResult(pref * bracket_b, "colmez_artin", dict(
        base, bracket=bracket_b, terms=terms, as_printed_bracket=printed,
        printed_matches=(printed == bracket_b)))
    return res_a, res_b
