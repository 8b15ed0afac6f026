"""Weight-two Hodge structures of CM type and their transport to all degrees.

A plane ``(x, y)`` with ``q(x) = q(y) > 0`` and ``b(x, y) = 0`` encodes the
period ``σ = x + iy``: ``H^{2,0}`` is spanned by σ, ``H^{0,2}`` by its
conjugate, and ``H^{1,1}`` is the orthogonal complement of the plane. Its
Weil operator is rational: ``w(x) = -2y``, ``w(y) = 2x``, zero on the
complement.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import exactlin as el
from . import polys
from .exactlin import Matrix, Vector
from .lefschetz import GradedOperator, so_derivation
from .quadspace import (IsometryWitness, NotAnIsometry, QuadraticSpace, bilinear,
                        decompose_isometry, is_isometry, is_skew)
from .verbitsky import VerbitskyModel, symmetric_power_matrix

J_CERTIFIED = "J_certified"
JPLUS_CERTIFIED = "Jplus_certified"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class HodgePlane:
    x: tuple[Fraction, ...]
    y: tuple[Fraction, ...]

    @classmethod
    def of(cls, x: Sequence, y: Sequence) -> "HodgePlane":
        return cls(tuple(el.to_vector(x)), tuple(el.to_vector(y)))

    def swapped(self) -> "HodgePlane":
        return HodgePlane(self.y, self.x)

    def validate(self, space: QuadraticSpace) -> None:
        qx, qy = space.q(self.x), space.q(self.y)
        if qx != qy or bilinear(space, self.x, self.y) != 0 or qx <= 0:
            raise ValueError("degenerate Hodge plane: need q(x) = q(y) > 0 and b(x, y) = 0")

    def image(self, phi: Matrix) -> "HodgePlane":
        return HodgePlane(tuple(el.matvec(phi, self.x)), tuple(el.matvec(phi, self.y)))

    def to_json(self) -> dict:
        return {"x": [el.format_rational(c) for c in self.x],
                "y": [el.format_rational(c) for c in self.y]}

    @classmethod
    def from_json(cls, data: dict) -> "HodgePlane":
        return cls.of(data["x"], data["y"])


def weil_derivation(space: QuadraticSpace, plane: HodgePlane) -> Matrix:
    """``w = (2/q(x)) (x (Gy)^T - y (Gx)^T)``, an element of so(V, q)."""
    plane.validate(space)
    g = space.matrix
    qx = space.q(plane.x)
    gx = el.matvec(g, list(plane.x))
    gy = el.matvec(g, list(plane.y))
    d = space.d
    c = 2 / qx
    return [[c * (plane.x[i] * gy[j] - plane.y[i] * gx[j]) for j in range(d)] for i in range(d)]


def weil_structure_ok(space: QuadraticSpace, w: Matrix) -> bool:
    """``w`` is skew for q, ``w^3 = -4w`` and ``rank(w) = 2``."""
    w3 = el.matmul(w, el.matmul(w, w))
    return is_skew(space, w) and w3 == el.scale(-4, w) and el.rank(w) == 2


def is_hodge_isometry(space: QuadraticSpace, phi: Matrix, p1: HodgePlane, p2: HodgePlane) -> bool:
    """``phi w_1 phi^{-1} = w_2``: phi carries each H^{p,q} of p1 onto that of p2."""
    phi = el.to_matrix(phi)
    if not is_isometry(space, phi):
        raise NotAnIsometry("matrix does not preserve the form")
    w1, w2 = weil_derivation(space, p1), weil_derivation(space, p2)
    return el.matmul(phi, w1) == el.matmul(w2, phi)


def extend_isometry(model: VerbitskyModel, phi: Matrix) -> GradedOperator:
    """The graded algebra automorphism induced by ``phi`` on ``S*V / I``."""
    phi = el.to_matrix(phi)
    if not is_isometry(model.space, phi):
        raise NotAnIsometry("matrix does not preserve the form")
    blocks = {}
    for k in range(model.top + 1):
        _, images = symmetric_power_matrix(phi, k)
        b = {}
        for a, mono in enumerate(model.basis_monomials(k)):
            col = el.sparse(model.reduce(k, images[mono]))
            if col:
                b[a] = col
        blocks[k] = b
    return GradedOperator(model, 0, blocks)


def coset_consistent(model: VerbitskyModel, phi: Matrix, rng: random.Random, trials: int = 5) -> bool:
    """Re-derive ψ on each basis monomial from a shifted representative ``m + i``.

    ``i`` is a random element of the ideal in that degree; agreement means
    the induced map does not depend on the representative.
    """
    psi = extend_isometry(model, phi)
    for k in range(model.n + 1, model.top + 1):
        deg = model.degrees[k]
        std = set(deg.standard)
        leading = [i for i in range(len(deg.monomials)) if i not in std]
        _, images = symmetric_power_matrix(phi, k)
        for _ in range(trials):
            # an ideal element: a leading monomial minus its reduction
            lead = deg.monomials[rng.choice(leading)]
            ideal_elt = {lead: Fraction(1)}
            for c, x in zip(model.basis_monomials(k), model.reduce_monomial(lead)):
                polys.add_to(ideal_elt, c, -x)
            a = rng.randrange(deg.dim)
            rep = polys.padd({model.basis_monomial(k, a): Fraction(1)},
                             polys.pscale(rng.randint(1, 5), ideal_elt))
            image = {}
            for m, c in rep.items():
                image = polys.padd(image, polys.pscale(c, images[m]))
            if el.sparse(model.reduce(k, image)) != psi.block(k).get(a, {}):
                return False
    return True


@dataclass
class MembershipVerdict:
    verdict: str
    det: int
    spinor_norm: str

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "det": self.det, "spinor_norm": self.spinor_norm}


def certify_membership(space: QuadraticSpace, phi: Matrix | IsometryWitness) -> MembershipVerdict:
    """Certificates from ``SO ⊂ J+`` and ``ker(SN) ⊂ J``; det -1 gives no certificate."""
    w = phi if isinstance(phi, IsometryWitness) else decompose_isometry(space, phi)
    if w.det == 1:
        verdict = J_CERTIFIED if w.spinor_norm.is_trivial() else JPLUS_CERTIFIED
    else:
        verdict = UNKNOWN
    return MembershipVerdict(verdict, w.det, str(w.spinor_norm))


@dataclass
class TransportReport:
    hodge_isometry: bool
    verdict: MembershipVerdict
    transport: bool
    degrees_checked: list[int]
    failed_degrees: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.hodge_isometry and self.transport

    def to_json(self) -> dict:
        return {
            "hodge_isometry": self.hodge_isometry,
            "verdict": self.verdict.verdict,
            "det": self.verdict.det,
            "spinor_norm": self.verdict.spinor_norm,
            "transport": "pass" if self.transport else "fail",
            "degrees_checked": self.degrees_checked,
            "failed_degrees": self.failed_degrees,
        }


def transport_verify(model: VerbitskyModel, phi: Matrix, p1: HodgePlane, p2: HodgePlane) -> TransportReport:
    """Check ``ψ ∘ w_1 = w_2 ∘ ψ`` in every degree, ψ the extension of phi.

    ``w_i`` are the Weil derivations of the planes acting on the whole model.
    """
    space = model.space
    phi = el.to_matrix(phi)
    if not is_hodge_isometry(space, phi, p1, p2):
        raise ValueError("phi is not a Hodge isometry between the given planes")
    psi = extend_isometry(model, phi)
    w1 = so_derivation(model, weil_derivation(space, p1))
    w2 = so_derivation(model, weil_derivation(space, p2))
    lhs, rhs = psi @ w1, w2 @ psi
    failed = [k for k in range(model.top + 1) if lhs.block(k) != rhs.block(k)]
    invertible = all(el.rank(psi.dense(k)) == model.dims[k] for k in range(model.top + 1))
    return TransportReport(True, certify_membership(space, phi), not failed and invertible,
                           list(range(model.top + 1)), failed)


def find_cm_planes(space: QuadraticSpace, bound: int = 2, limit: int = 20) -> list[HodgePlane]:
    """Rational CM planes with integer coordinates in a small box."""
    vecs = [list(map(Fraction, t)) for t in itertools.product(range(-bound, bound + 1), repeat=space.d)
            if any(t)]
    by_q: dict[Fraction, list[Vector]] = {}
    for v in vecs:
        qv = space.q(v)
        if qv > 0:
            by_q.setdefault(qv, []).append(v)
    out = []
    for qv in sorted(by_q):
        group = by_q[qv]
        for x, y in itertools.combinations(group, 2):
            if bilinear(space, x, y) == 0:
                out.append(HodgePlane.of(x, y))
                if len(out) >= limit:
                    return out
    return out
