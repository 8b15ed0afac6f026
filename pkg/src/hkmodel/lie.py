"""Bracket saturation and Killing forms for finite families of operators.

Elements are opaque; callers supply ``bracket(x, y)`` and ``flatten(x)``
(a sparse coordinate dict, used only for linear algebra).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Generic, Sequence, TypeVar

from . import exactlin as el
from .exactlin import EchelonSpan

T = TypeVar("T")


@dataclass
class LieBasis(Generic[T]):
    elements: list[T]
    span: EchelonSpan
    bracket: Callable[[T, T], T]
    flatten: Callable[[T], dict[int, Fraction]]
    _table: list[list[list[Fraction]]] | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.elements)

    def contains(self, x: T) -> bool:
        return self.span.contains(self.flatten(x))

    def express(self, x: T) -> list[Fraction] | None:
        return self.span.express(self.flatten(x))

    def structure_constants(self) -> list[list[list[Fraction]]]:
        """``table[i][j]`` = coordinates of ``[b_i, b_j]``; raises if not closed."""
        if self._table is None:
            n = self.dim
            table = [[None] * n for _ in range(n)]
            for i in range(n):
                table[i][i] = [Fraction(0)] * n
                for j in range(i + 1, n):
                    c = self.express(self.bracket(self.elements[i], self.elements[j]))
                    if c is None:
                        raise ValueError(f"bracket of basis elements {i}, {j} leaves the span")
                    table[i][j] = c
                    table[j][i] = [-x for x in c]
            self._table = table
        return self._table

    def is_closed(self) -> bool:
        try:
            self.structure_constants()
        except ValueError:
            return False
        return True

    def killing_form(self) -> el.Matrix:
        table = self.structure_constants()
        n = self.dim
        # ad_i has matrix (ad_i)[l][k] = table[i][k][l]
        k = el.zeros(n, n)
        for i in range(n):
            for j in range(i, n):
                s = Fraction(0)
                ti, tj = table[i], table[j]
                for a in range(n):
                    row = ti[a]
                    for b in range(n):
                        if row[b] and tj[b][a]:
                            s += row[b] * tj[b][a]
                k[i][j] = k[j][i] = s
        return k

    def killing_signature(self) -> tuple[int, int, int]:
        return el.ldl_signature(self.killing_form())


def saturate(generators: Sequence[T], bracket: Callable[[T, T], T],
             flatten: Callable[[T], dict[int, Fraction]]) -> LieBasis[T]:
    """Smallest bracket-closed subspace containing ``generators``.

    New elements are bracketed with the generators only: a subspace that
    contains the generators and is stable under ``ad`` of every generator
    contains all iterated brackets, hence is the generated Lie algebra.
    Output order is deterministic (generators first, then breadth-first).
    """
    span = EchelonSpan()
    basis: list[T] = []
    gens: list[T] = []
    for g in generators:
        if span.add(flatten(g)):
            basis.append(g)
            gens.append(g)
    frontier = list(basis)
    while frontier:
        fresh = []
        for x in frontier:
            for g in gens:
                y = bracket(g, x)
                if span.add(flatten(y)):
                    basis.append(y)
                    fresh.append(y)
        frontier = fresh
    return LieBasis(basis, span, bracket, flatten)
