"""Sparse commutative polynomials keyed by sorted variable-index tuples.

A monomial ``x_0^2 x_3`` is the tuple ``(0, 0, 3)``; the same representation
doubles as a basis monomial of a symmetric power ``S^k V``.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Sequence

Monomial = tuple[int, ...]
Poly = dict[Monomial, Fraction]


def monomials(nvars: int, degree: int) -> list[Monomial]:
    """Degree-``degree`` monomials in lexicographic order."""
    return list(combinations_with_replacement(range(nvars), degree))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(sorted(a + b))


def multinomial(m: Monomial) -> int:
    out = factorial(len(m))
    for c in Counter(m).values():
        out //= factorial(c)
    return out


def add_to(p: Poly, m: Monomial, c: Fraction) -> None:
    if not c:
        return
    t = p.get(m, 0) + c
    if t:
        p[m] = t
    else:
        p.pop(m, None)


def padd(*ps: Poly) -> Poly:
    out: Poly = {}
    for p in ps:
        for m, c in p.items():
            add_to(out, m, c)
    return out


def pscale(c, p: Poly) -> Poly:
    c = Fraction(c)
    return {m: c * x for m, x in p.items()} if c else {}


def pmul(p: Poly, r: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in r.items():
            add_to(out, mono_mul(m1, m2), c1 * c2)
    return out


def ppow(p: Poly, k: int) -> Poly:
    out: Poly = {(): Fraction(1)}
    for _ in range(k):
        out = pmul(out, p)
    return out


def linear(coeffs: Sequence[Fraction], offset: int = 0) -> Poly:
    return {(i + offset,): Fraction(c) for i, c in enumerate(coeffs) if c}


def quadratic(gram, left: int = 0, right: int = 0) -> Poly:
    """``sum_ij G_ij x_{left+i} x_{right+j}``."""
    out: Poly = {}
    d = len(gram)
    for i in range(d):
        for j in range(d):
            if gram[i][j]:
                add_to(out, mono_mul((left + i,), (right + j,)), Fraction(gram[i][j]))
    return out
