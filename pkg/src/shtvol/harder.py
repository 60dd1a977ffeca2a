"""Groupoid mass of Bun_G(F_q) on the projective line, summed exactly.

Every GL_n-bundle on P^1 splits as O(a_1) + ... + O(a_n) with a_1 >= ... >= a_n,
and its automorphism group has order

    prod_blocks |GL_m(F_q)| * q^(sum over pairs a_i > a_j of (a_i - a_j + 1)).

Writing a_i - a_{i+1} = g_i, the exponent is linear in the positive gaps, so
the sum over each zero pattern of the gaps is a product of geometric series
restricted to the congruence sum_k k g_k = d (mod n).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from .errors import PreconditionError


def gl_order(m: int, q: int) -> int:
    out = 1
    for i in range(m):
        out *= q ** m - q ** i
    return out


def mass_gl(n: int, d: int, q: int) -> Fraction:
    """Sum of 1/|Aut E| over rank n, degree d bundles on P^1 over F_q."""
    if n < 1:
        raise PreconditionError("rank must be positive")
    if n == 1:
        return Fraction(1, q - 1)
    total = Fraction(0)
    x = Fraction(1, q)
    for pattern in product((0, 1), repeat=n - 1):
        # pattern[k-1] = 1 means gap g_k > 0
        blocks, size = [], 1
        for p in pattern:
            if p:
                blocks.append(size)
                size = 1
            else:
                size += 1
        blocks.append(size)
        aut_blocks = 1
        for m in blocks:
            aut_blocks *= gl_order(m, q)
        pairs_apart = (n * (n - 1) - sum(m * (m - 1) for m in blocks)) // 2
        base = Fraction(1, aut_blocks) * x ** pairs_apart
        pos = [k for k in range(1, n) if pattern[k - 1]]
        # sum over residues r_k of g_k mod n with sum k r_k = d mod n
        acc = Fraction(0)
        for res in product(range(n), repeat=len(pos)):
            if (sum(k * r for k, r in zip(pos, res)) - d) % n:
                continue
            term = Fraction(1)
            for k, r in zip(pos, res):
                w = k * (n - k)
                first = r if r >= 1 else n
                term *= x ** (w * first) / (1 - x ** (w * n))
            acc += term
        total += base * acc
    return total


def mass_gl_truncated(n: int, d: int, q: int, spread: int) -> Fraction:
    """Brute-force partial sum over splitting types with a_1 - a_n <= spread."""
    total = Fraction(0)

    def rec(prefix, left):
        nonlocal total
        if len(prefix) == n:
            if sum(prefix) == d:
                total += 1 / Fraction(aut_order(prefix, q))
            return
        lo = prefix[-1] - spread if prefix else None
        hi = prefix[-1] if prefix else None
        if not prefix:
            for a in range(-spread - abs(d), spread + abs(d) + 1):
                rec([a], left)
        else:
            for a in range(hi, lo - 1, -1):
                if prefix[0] - a > spread:
                    break
                rec(prefix + [a], left)

    rec([], d)
    return total


def aut_order(a, q: int) -> int:
    a = sorted(a, reverse=True)
    out = 1
    i = 0
    while i < len(a):
        j = i
        while j < len(a) and a[j] == a[i]:
            j += 1
        out *= gl_order(j - i, q)
        i = j
    expo = sum(a[i] - a[j] + 1 for i in range(len(a)) for j in range(len(a)) if a[i] > a[j])
    return out * q ** expo


def mass_sl(n: int, q: int) -> Fraction:
    """Bun_SL_n -> Bun_GL_n^0 is a G_m(F_q)-torsor on groupoid points."""
    return (q - 1) * mass_gl(n, 0, q)
