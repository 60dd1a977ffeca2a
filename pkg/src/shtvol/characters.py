"""Class functions on small Galois groups with rational character tables.

Integrals over the group use the Haar measure of total volume 1, so
averages replace sums.  The pairing of class functions is bilinear:
<f, g> = avg_s f(s) g(s), which gives <chi_rho, chi_rho_dual> = 1.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product
from typing import Dict, List, Sequence

from .errors import InconsistencyError, PreconditionError, SchemaError

SHARP, FLAT = "sharp", "flat"


def _compose(a, b):
    return tuple(a[b[i]] for i in range(len(a)))


def _inverse(a):
    inv = [0] * len(a)
    for i, x in enumerate(a):
        inv[x] = i
    return tuple(inv)


def _cycle_type(p):
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen:
            continue
        k, j = 0, i
        while j not in seen:
            seen.add(j)
            j = p[j]
            k += 1
        out.append(k)
    return tuple(sorted(out, reverse=True))


class FiniteGroupData:
    """A permutation group with its rational character table."""

    def __init__(self, name: str, elements: Sequence[tuple], characters: Dict[str, Dict[tuple, Fraction]]):
        self.name = name
        self.elements = sorted(elements)
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.identity = tuple(range(len(self.elements[0])))
        self.order = len(self.elements)
        eset = set(self.elements)
        for a in self.elements:
            for b in self.elements:
                if _compose(a, b) not in eset:
                    raise SchemaError("element list is not closed under multiplication")
        self.classes = []
        done = set()
        for g in self.elements:
            if g in done:
                continue
            cls = sorted({_compose(_compose(h, g), _inverse(h)) for h in self.elements})
            done.update(cls)
            self.classes.append(cls)
        self.characters = {n: {g: Fraction(v[g]) for g in self.elements} for n, v in characters.items()}
        self._check_table()

    def mul(self, a, b):
        return _compose(a, b)

    def inv(self, a):
        return _inverse(a)

    def rep_names(self) -> List[str]:
        return list(self.characters)

    def dim(self, rho: str) -> int:
        return int(self.characters[rho][self.identity])

    def dual(self, rho: str) -> str:
        chi = self.characters[rho]
        target = {g: chi[self.inv(g)] for g in self.elements}
        for n, c in self.characters.items():
            if c == target:
                return n
        raise InconsistencyError("dual character missing from table")

    def chi(self, rho: str, g) -> Fraction:
        return self.characters[rho][g]

    def _check_table(self):
        names = list(self.characters)
        if len(names) != len(self.classes):
            raise InconsistencyError("character table must have one row per conjugacy class")
        for a in names:
            for b in names:
                ip = sum(self.chi(a, g) * self.chi(b, self.inv(g)) for g in self.elements) / self.order
                if ip != (1 if a == b else 0):
                    raise InconsistencyError("character table fails row orthogonality")
        for cls in self.classes:
            if len({tuple(self.chi(n, g) for n in names) for g in cls}) != 1:
                raise InconsistencyError("characters must be class functions")

    def element_label(self, g) -> str:
        return "".join(str(x) for x in g)

    def parse_element(self, s):
        if isinstance(s, (list, tuple)):
            g = tuple(int(x) for x in s)
        elif isinstance(s, str) and s in ("e", "1", "id"):
            g = self.identity
        elif isinstance(s, str):
            g = tuple(int(c) for c in s)
        elif isinstance(s, int) and 0 <= s < self.order:
            g = self.elements[s]
        else:
            raise SchemaError(f"bad group element {s!r}")
        if g not in self.index:
            raise SchemaError(f"{s!r} is not an element of {self.name}")
        return g


def _symmetric(n):
    return list(permutations(range(n)))


def build_group(name: str) -> FiniteGroupData:
    name = name.lower()
    if name == "trivial":
        return FiniteGroupData("trivial", [(0,)], {"triv": {(0,): 1}})
    if name == "z2":
        els = _symmetric(2)
        return FiniteGroupData("z2", els, {
            "triv": {g: 1 for g in els},
            "sgn": {g: 1 if g == (0, 1) else -1 for g in els},
        })
    if name == "z2xz2":
        els = [(0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0)]
        a, b = els[1], els[2]

        def char(sa, sb):
            out = {}
            for i, j in product((0, 1), repeat=2):
                g = (0, 1, 2, 3)
                if i:
                    g = _compose(a, g)
                if j:
                    g = _compose(b, g)
                out[g] = sa ** i * sb ** j
            return out

        return FiniteGroupData("z2xz2", els, {
            "triv": char(1, 1), "chi_a": char(1, -1), "chi_b": char(-1, 1), "chi_ab": char(-1, -1),
        })
    if name in ("s3", "s4"):
        n = int(name[1])
        els = _symmetric(n)
        tables = {
            3: {"triv": {(1, 1, 1): 1, (2, 1): 1, (3,): 1},
                "sgn": {(1, 1, 1): 1, (2, 1): -1, (3,): 1},
                "std": {(1, 1, 1): 2, (2, 1): 0, (3,): -1}},
            4: {"triv": {(1, 1, 1, 1): 1, (2, 1, 1): 1, (2, 2): 1, (3, 1): 1, (4,): 1},
                "sgn": {(1, 1, 1, 1): 1, (2, 1, 1): -1, (2, 2): 1, (3, 1): 1, (4,): -1},
                "std": {(1, 1, 1, 1): 3, (2, 1, 1): 1, (2, 2): -1, (3, 1): 0, (4,): -1},
                "std_sgn": {(1, 1, 1, 1): 3, (2, 1, 1): -1, (2, 2): -1, (3, 1): 0, (4,): 1},
                "two": {(1, 1, 1, 1): 2, (2, 1, 1): 0, (2, 2): 2, (3, 1): -1, (4,): 0}},
        }[n]
        chars = {r: {g: t[_cycle_type(g)] for g in els} for r, t in tables.items()}
        return FiniteGroupData(name, els, chars)
    raise SchemaError(f"unsupported group {name!r}; choose z2, z2xz2, s3, s4")


def group_from_json(obj) -> FiniteGroupData:
    """Custom table: {"name", "elements": [[perm],...], "characters": {rho: [values in element order]}}."""
    if isinstance(obj, str):
        return build_group(obj)
    try:
        els = [tuple(int(x) for x in e) for e in obj["elements"]]
        chars = {r: dict(zip(els, (Fraction(v) for v in vals))) for r, vals in obj["characters"].items()}
        return FiniteGroupData(obj.get("name", "custom"), els, chars)
    except (KeyError, TypeError, ValueError):
        raise SchemaError("custom group needs elements and characters")


class GroupAlgebraElement:
    """A function on the group, i.e. an element of Q[Sigma]."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group: FiniteGroupData, coeffs: Dict[tuple, Fraction] | None = None):
        self.group = group
        self.coeffs = {g: Fraction(c) for g, c in (coeffs or {}).items() if c != 0}

    def __call__(self, g) -> Fraction:
        return self.coeffs.get(g, Fraction(0))

    def __eq__(self, other):
        return isinstance(other, GroupAlgebraElement) and self.group is other.group and self.coeffs == other.coeffs

    def __add__(self, other):
        _same(self, other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) + c
        return GroupAlgebraElement(self.group, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return GroupAlgebraElement(self.group, {g: v * c for g, v in self.coeffs.items()})

    def __repr__(self):
        parts = [f"{c}*[{self.group.element_label(g)}]" for g, c in sorted(self.coeffs.items())]
        return "GroupAlgebraElement(" + (" + ".join(parts) or "0") + ")"

    def as_dict(self):
        return {self.group.element_label(g): str(c) for g, c in sorted(self.coeffs.items())}


def _same(a, b):
    if a.group is not b.group and a.group.name != b.group.name:
        raise PreconditionError("group algebra elements live on different groups")


def delta(group: FiniteGroupData, g) -> GroupAlgebraElement:
    return GroupAlgebraElement(group, {g: 1})


def character(group: FiniteGroupData, rho: str) -> GroupAlgebraElement:
    return GroupAlgebraElement(group, group.characters[rho])


def convolve(phi: GroupAlgebraElement, psi: GroupAlgebraElement) -> GroupAlgebraElement:
    """(phi * psi)(g) = avg_h phi(g h^-1) psi(h)."""
    _same(phi, psi)
    G = phi.group
    out: Dict[tuple, Fraction] = {}
    for a, ca in phi.coeffs.items():
        for h, ch in psi.coeffs.items():
            g = G.mul(a, h)
            out[g] = out.get(g, 0) + ca * ch
    return GroupAlgebraElement(G, {g: c / G.order for g, c in out.items()})


def dual(phi: GroupAlgebraElement) -> GroupAlgebraElement:
    G = phi.group
    return GroupAlgebraElement(G, {G.inv(g): c for g, c in phi.coeffs.items()})


def pairing(phi: GroupAlgebraElement, psi: GroupAlgebraElement) -> Fraction:
    _same(phi, psi)
    return sum((c * psi(g) for g, c in phi.coeffs.items()), Fraction(0)) / phi.group.order


def class_coefficients(phi: GroupAlgebraElement) -> Dict[str, Fraction]:
    """a_rho = <phi, chi_rho_dual>, so that phi^natural = sum a_rho chi_rho."""
    G = phi.group
    return {rho: pairing(phi, character(G, G.dual(rho))) for rho in G.rep_names()}


def natural_projection(phi: GroupAlgebraElement) -> GroupAlgebraElement:
    G = phi.group
    out = GroupAlgebraElement(G)
    for rho, a in class_coefficients(phi).items():
        if a:
            out = out + character(G, rho).scale(a)
    return out


def sign_value(s) -> int:
    if s in (SHARP, "+", 1, "#", "♯", "plus"):
        return 1
    if s in (FLAT, "-", -1, "b", "♭", "minus"):
        return -1
    raise SchemaError(f"bad leg sign {s!r}; use sharp or flat")


def phi_tuple(group: FiniteGroupData, sigma: Sequence, signs: Sequence, j: int) -> GroupAlgebraElement:
    """Phi_j = sum_i sign_i^j delta_{sigma_i}."""
    if len(sigma) != len(signs):
        raise PreconditionError("sigma and signs must have equal length")
    out: Dict[tuple, Fraction] = {}
    for g, s in zip(sigma, signs):
        v = sign_value(s) ** (j % 2)
        out[g] = out.get(g, 0) + v
    return GroupAlgebraElement(group, out)


def nu(signs, i, k) -> int:
    return 0 if sign_value(signs[i]) == sign_value(signs[k]) else 1


def pair_character_sum(group, sigma, signs, j, rho) -> Fraction:
    """sum over ordered (i, i') of chi_{rho dual}(sigma_i^-1 sigma_i') (-1)^(j nu)."""
    rd = group.dual(rho)
    r = len(sigma)
    total = Fraction(0)
    for i in range(r):
        for k in range(r):
            total += group.chi(rd, group.mul(group.inv(sigma[i]), sigma[k])) * (-1) ** (j * nu(signs, i, k))
    return total


def check_character_identities(group, sigma, signs, j) -> tuple:
    """Both identities used to pass from constants c_{i,i'} to class functions."""
    G = group
    r = len(sigma)
    phi = phi_tuple(G, sigma, signs, j)
    conv = convolve(phi, dual(phi))
    first = all(
        pair_character_sum(G, sigma, signs, j, rho) == G.order ** 2 * pairing(conv, character(G, G.dual(rho)))
        for rho in G.rep_names())
    lhs = Fraction(0)
    for rho in G.rep_names():
        rd = G.dual(rho)
        for i in range(r):
            for k in range(i):
                lhs += G.chi(rd, G.mul(G.inv(sigma[k]), sigma[i])) * (-1) ** (j * nu(signs, i, k)) * G.dim(rho)
    second = lhs == Fraction(G.order) * (G.order * conv(G.identity) - r) / 2
    return first, second
