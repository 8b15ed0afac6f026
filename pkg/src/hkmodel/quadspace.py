"""Rational quadratic spaces, their isometries and spinor norms.

The form is stored by its Gram matrix ``G``: ``b(a, c) = a^T G c`` and
``q(a) = b(a, a)``. Spinor norms use the convention ``SN(tau_v) = [q(v)]``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from . import exactlin as el
from .exactlin import Matrix, SquarefreeClass, Vector


class NotAnIsometry(ValueError):
    pass


@dataclass(frozen=True)
class QuadraticSpace:
    gram: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        g = el.to_matrix(self.gram)
        object.__setattr__(self, "gram", tuple(tuple(r) for r in g))
        if not el.is_symmetric(g):
            raise ValueError("Gram matrix must be symmetric")
        if el.det(g) == 0:
            raise ValueError("Gram matrix is degenerate")

    @classmethod
    def from_rows(cls, rows) -> "QuadraticSpace":
        return cls(tuple(tuple(el.as_fraction(x) for x in r) for r in rows))

    @classmethod
    def diagonal(cls, entries: Sequence) -> "QuadraticSpace":
        return cls.from_rows(el.diag(entries))

    @property
    def d(self) -> int:
        return len(self.gram)

    @property
    def matrix(self) -> Matrix:
        return [list(r) for r in self.gram]

    def q(self, a: Sequence) -> Fraction:
        return bilinear(self, a, a)

    def signature(self) -> tuple[int, int, int]:
        return el.ldl_signature(self.matrix)

    def to_json(self) -> dict:
        return {"gram": [[el.format_rational(x) for x in r] for r in self.gram]}

    @classmethod
    def from_json(cls, data: dict) -> "QuadraticSpace":
        return cls.from_rows(data["gram"])


def bilinear(space: QuadraticSpace, a: Sequence, b: Sequence) -> Fraction:
    d = space.d
    if len(a) != d or len(b) != d:
        raise el.DimensionError(f"vectors must have length {d}")
    total = Fraction(0)
    for i, ai in enumerate(a):
        if ai:
            row = space.gram[i]
            for j, bj in enumerate(b):
                if bj and row[j]:
                    total += ai * row[j] * bj
    return total


def is_isometry(space: QuadraticSpace, phi: Matrix) -> bool:
    g = space.matrix
    if el.shape(phi) != (space.d, space.d):
        return False
    return el.matmul(el.matmul(el.transpose(phi), g), phi) == g


def reflection(space: QuadraticSpace, v: Sequence) -> Matrix:
    v = el.to_vector(v)
    qv = space.q(v)
    if qv == 0:
        raise ValueError("isotropic reflection vector")
    gv = el.matvec(space.matrix, v)  # b(x, v) = (Gv) . x
    d = space.d
    m = el.identity(d)
    for i in range(d):
        if v[i]:
            c = 2 * v[i] / qv
            for j in range(d):
                if gv[j]:
                    m[i][j] -= c * gv[j]
    return m


def orthogonal_basis(space: QuadraticSpace) -> list[Vector]:
    """A b-orthogonal basis of non-isotropic vectors (Gram-Schmidt with repair)."""
    d = space.d
    pool = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    out: list[Vector] = []
    while pool:
        idx = next((i for i, u in enumerate(pool) if space.q(u)), None)
        if idx is None:
            # all remaining vectors isotropic; some pair pairs nontrivially
            i, j = next((i, j) for i, j in itertools.combinations(range(len(pool)), 2)
                        if bilinear(space, pool[i], pool[j]))
            pool[i] = [x + y for x, y in zip(pool[i], pool[j])]
            idx = i
        u = pool.pop(idx)
        qu = space.q(u)
        out.append(u)
        pool = [[x - bilinear(space, w, u) / qu * y for x, y in zip(w, u)] for w in pool]
    return out


@dataclass
class IsometryWitness:
    phi: Matrix
    reflections: list[Vector]
    det: int
    spinor_norm: SquarefreeClass

    def product(self, space: QuadraticSpace) -> Matrix:
        m = el.identity(space.d)
        for v in self.reflections:
            m = el.matmul(m, reflection(space, v))
        return m

    def to_json(self) -> dict:
        return {
            "phi": [[el.format_rational(x) for x in r] for r in self.phi],
            "reflections": [[el.format_rational(x) for x in v] for v in self.reflections],
            "det": self.det,
            "spinor_norm": str(self.spinor_norm),
        }

    @classmethod
    def from_json(cls, data: dict) -> "IsometryWitness":
        return cls(
            phi=el.to_matrix(data["phi"]),
            reflections=[el.to_vector(v) for v in data["reflections"]],
            det=int(data["det"]),
            spinor_norm=SquarefreeClass(int(data["spinor_norm"])),
        )


def spinor_norm_of(space: QuadraticSpace, reflections: Sequence[Sequence]) -> SquarefreeClass:
    sn = SquarefreeClass(1)
    for v in reflections:
        sn = sn * el.squarefree_class(space.q(v))
    return sn


def decompose_isometry(space: QuadraticSpace, phi: Matrix) -> IsometryWitness:
    """Write ``phi`` as a product of at most ``2d`` reflections.

    Works through an orthogonal basis of non-isotropic vectors, fixing one at a
    time: ``tau_{psi(u) - u}`` when that vector is anisotropic, otherwise
    ``tau_u tau_{psi(u) + u}``. Either choice is orthogonal to the vectors
    already fixed, so they stay fixed.
    """
    phi = el.to_matrix(phi)
    if not is_isometry(space, phi):
        raise NotAnIsometry("matrix does not preserve the form")
    applied: list[Vector] = []
    psi = el.copy(phi)
    for u in orthogonal_basis(space):
        pu = el.matvec(psi, u)
        if pu == u:
            continue
        v = [x - y for x, y in zip(pu, u)]
        if space.q(v):
            steps = [v]
        else:
            steps = [[x + y for x, y in zip(pu, u)], u]
        for w in steps:
            psi = el.matmul(reflection(space, w), psi)
            applied.append(w)
    assert psi == el.identity(space.d)
    # tau_k ... tau_1 phi = 1, so phi = tau_1 ... tau_k
    witness = IsometryWitness(
        phi=phi,
        reflections=applied,
        det=(-1) ** len(applied),
        spinor_norm=spinor_norm_of(space, applied),
    )
    return witness


def mukai_extend(space: QuadraticSpace) -> QuadraticSpace:
    """Add a hyperbolic plane: basis order (e0, e4, V) with b(e0, e4) = 1."""
    d = space.d
    g = el.zeros(d + 2, d + 2)
    g[0][1] = g[1][0] = Fraction(1)
    for i in range(d):
        for j in range(d):
            g[i + 2][j + 2] = space.gram[i][j]
    return QuadraticSpace.from_rows(g)


def so_basis(space: QuadraticSpace) -> list[Matrix]:
    """Basis ``G^{-1}(E_ij - E_ji)``, i < j, of the Lie algebra so(V, q)."""
    d = space.d
    ginv = el.inverse(space.matrix)
    out = []
    for i, j in itertools.combinations(range(d), 2):
        a = el.zeros(d, d)
        a[i][j] = Fraction(1)
        a[j][i] = Fraction(-1)
        out.append(el.matmul(ginv, a))
    return out


def is_skew(space: QuadraticSpace, x: Matrix) -> bool:
    g = space.matrix
    return el.is_zero(el.add(el.matmul(el.transpose(x), g), el.matmul(g, x)))


def isotropic_vectors(space: QuadraticSpace, bound: int) -> Iterator[Vector]:
    """Nonzero integer vectors in the box [-bound, bound]^d with q = 0.

    An empty result only means none were found in the box.
    """
    for t in itertools.product(range(-bound, bound + 1), repeat=space.d):
        if any(t):
            v = [Fraction(x) for x in t]
            if space.q(v) == 0:
                yield v


def random_anisotropic_vector(space: QuadraticSpace, rng: random.Random, bound: int = 3) -> Vector:
    while True:
        v = [Fraction(rng.randint(-bound, bound)) for _ in range(space.d)]
        if any(v) and space.q(v):
            return v


def random_isometry(space: QuadraticSpace, rng: random.Random, length: int | None = None) -> IsometryWitness:
    """Seeded product of reflections in small integer vectors."""
    if length is None:
        length = rng.randint(1, 4)
    vs = [random_anisotropic_vector(space, rng) for _ in range(length)]
    m = el.identity(space.d)
    for v in vs:
        m = el.matmul(m, reflection(space, v))
    return IsometryWitness(phi=m, reflections=vs, det=(-1) ** length,
                           spinor_norm=spinor_norm_of(space, vs))
