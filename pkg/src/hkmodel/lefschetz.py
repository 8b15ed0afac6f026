"""Graded operators on SH(V, n), sl2-triples and the total Lie algebra.

Shifts are in cohomological degree: a Lefschetz operator has shift +2 and
maps ``A_k`` to ``A_{k+1}``. Blocks are column-sparse (see ``exactlin``).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import exactlin as el
from . import lie, polys
from .exactlin import Matrix, SparseBlock
from .quadspace import QuadraticSpace, is_skew, so_basis
from .verbitsky import AlgebraElement, VerbitskyModel


class NoSl2Completion(ValueError):
    pass


@dataclass(eq=False)
class GradedOperator:
    model: VerbitskyModel
    shift: int
    blocks: dict[int, SparseBlock]

    @property
    def step(self) -> int:
        return self.shift // 2

    def degrees(self) -> range:
        lo = max(0, -self.step)
        hi = min(self.model.top, self.model.top - self.step)
        return range(lo, hi + 1)

    def block(self, k: int) -> SparseBlock:
        return self.blocks.get(k, {})

    def dense(self, k: int) -> Matrix:
        dims = self.model.dims
        return el.sp_to_dense(self.block(k), dims[k + self.step], dims[k])

    def __matmul__(self, other: "GradedOperator") -> "GradedOperator":
        blocks = {}
        for k in other.degrees():
            mid = k + other.step
            if 0 <= mid + self.step <= self.model.top:
                b = el.sp_compose(self.block(mid), other.block(k))
                if b:
                    blocks[k] = b
        return GradedOperator(self.model, self.shift + other.shift, blocks)

    def _combine(self, other: "GradedOperator", c: Fraction) -> "GradedOperator":
        if self.shift != other.shift:
            raise ValueError("cannot add operators of different degree")
        blocks = {}
        for k in set(self.blocks) | set(other.blocks):
            b = el.sp_lincomb([(Fraction(1), self.block(k)), (c, other.block(k))])
            if b:
                blocks[k] = b
        return GradedOperator(self.model, self.shift, blocks)

    def __add__(self, other: "GradedOperator") -> "GradedOperator":
        return self._combine(other, Fraction(1))

    def __sub__(self, other: "GradedOperator") -> "GradedOperator":
        return self._combine(other, Fraction(-1))

    def __mul__(self, c) -> "GradedOperator":
        c = el.as_fraction(c)
        blocks = {k: el.sp_lincomb([(c, b)]) for k, b in self.blocks.items()} if c else {}
        return GradedOperator(self.model, self.shift, {k: b for k, b in blocks.items() if b})

    __rmul__ = __mul__

    def __neg__(self) -> "GradedOperator":
        return self * -1

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedOperator):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.shift == other.shift and (self - other).is_zero()

    def is_zero(self) -> bool:
        return not any(self.blocks.values())

    def apply(self, x: AlgebraElement) -> AlgebraElement:
        out = self.model.zero()
        for k in self.degrees():
            v = el.sp_apply(self.block(k), el.sparse(x.parts[k]))
            if v:
                dst = k + self.step
                dense = [Fraction(0)] * self.model.dims[dst]
                for i, c in v.items():
                    dense[i] = c
                out = out + self.model.homogeneous(dst, dense)
        return out

    def flatten(self) -> dict[int, Fraction]:
        offsets = _offsets(self.model)
        out = {}
        for k, b in self.blocks.items():
            base = offsets[(self.step, k)]
            rows = self.model.dims[k + self.step]
            for j, col in b.items():
                for i, x in col.items():
                    out[base + j * rows + i] = x
        return out


def bracket(a: GradedOperator, b: GradedOperator) -> GradedOperator:
    return (a @ b) - (b @ a)


_OFFSETS: dict[int, dict] = {}


def _offsets(model: VerbitskyModel) -> dict[tuple[int, int], int]:
    key = id(model)
    hit = _OFFSETS.get(key)
    if hit is None or hit["model"] is not model:
        dims, top = model.dims, model.top
        table, pos = {}, 0
        for step in sorted(range(-top, top + 1), key=lambda s: (abs(s), s)):
            for k in range(top + 1):
                if 0 <= k + step <= top:
                    table[(step, k)] = pos
                    pos += dims[k] * dims[k + step]
        hit = {"model": model, "table": table}
        _OFFSETS[key] = hit
    return hit["table"]


def operator_from_dense(model: VerbitskyModel, shift: int, blocks: dict[int, Matrix]) -> GradedOperator:
    return GradedOperator(model, shift, {k: el.sp_from_dense(m) for k, m in blocks.items()})


def identity_operator(model: VerbitskyModel) -> GradedOperator:
    return GradedOperator(model, 0, {k: {i: {i: Fraction(1)} for i in range(dm)}
                                     for k, dm in enumerate(model.dims)})


# ---------- the operators ----------


def grading_operator(model: VerbitskyModel) -> GradedOperator:
    """Acts on ``A_k`` (cohomological degree 2k) by ``2k - 2n``."""
    blocks = {}
    for k, dm in enumerate(model.dims):
        w = Fraction(2 * k - 2 * model.n)
        if w:
            blocks[k] = {i: {i: w} for i in range(dm)}
    return GradedOperator(model, 0, blocks)


def lefschetz_operator(model: VerbitskyModel, h: Sequence) -> GradedOperator:
    """Multiplication by the class of ``h``."""
    h = el.to_vector(h)
    blocks = {}
    for k in range(model.top):
        b: SparseBlock = {}
        for a, mono in enumerate(model.basis_monomials(k)):
            col: dict[int, Fraction] = {}
            for i, hi in enumerate(h):
                if hi:
                    for r, x in enumerate(model.reduce_monomial(polys.mono_mul(mono, (i,)))):
                        if x:
                            t = col.get(r, 0) + hi * x
                            if t:
                                col[r] = t
                            else:
                                col.pop(r, None)
            if col:
                b[a] = col
        if b:
            blocks[k] = b
    return GradedOperator(model, 2, blocks)


def _power_dense(op: GradedOperator, start: int, times: int) -> Matrix:
    """Dense matrix of ``op^times`` restricted to ``A_start``."""
    dims = op.model.dims
    m = el.identity(dims[start])
    k = start
    for _ in range(times):
        m = el.matmul(op.dense(k), m)
        k += op.step
    return m


def has_lefschetz(model: VerbitskyModel, h: Sequence) -> bool:
    """Whether ``L_h^{2j} : A_{n-j} -> A_{n+j}`` is invertible for j = 1..n.

    In cohomological degrees this is ``H^{2n-2j} -> H^{2n+2j}``; odd degrees
    are zero in the model.
    """
    lh = lefschetz_operator(model, h)
    n = model.n
    return all(el.rank(_power_dense(lh, n - j, 2 * j)) == model.dims[n - j]
               for j in range(1, n + 1))


def dual_lefschetz(model: VerbitskyModel, h: Sequence) -> GradedOperator:
    """The unique ``Λ_h`` making ``(Λ_h, θ, L_h)`` an sl2-triple.

    Built degree by degree from ``[L, Λ] = θ``. Below the middle degree,
    ``A_k = L(A_{k-1}) ⊕ P_k`` with ``P_k`` primitive (killed by Λ); above it
    ``L`` is onto. Both splittings only need inverses of the Lefschetz
    isomorphisms ``L^{2(n-j)} : A_j -> A_{2n-j}`` with ``j < n``.
    """
    lh = lefschetz_operator(model, h)
    n, top, dims = model.n, model.top, model.dims
    inv = {}
    for j in range(n):
        p = _power_dense(lh, j, 2 * (n - j))
        try:
            inv[j] = el.inverse(p)
        except ZeroDivisionError:
            raise NoSl2Completion(f"L_h^{2 * (n - j)} is not invertible on A_{j}") from None
    weight = [Fraction(2 * k - 2 * n) for k in range(top + 1)]

    lam: dict[int, Matrix] = {}
    for k in range(1, top + 1):
        # R_{k-1} = L Λ_{k-1} - θ_{k-1} on A_{k-1}; then Λ_k L = R_{k-1}
        r = el.scale(-weight[k - 1], el.identity(dims[k - 1]))
        if k - 1 >= 1:
            r = el.add(r, el.matmul(lh.dense(k - 2), lam[k - 1]))
        if k <= n:
            # preimage under L of the L(A_{k-1}) component of y
            e = 2 * n - 2 * k + 1
            pre = el.matmul(inv[k - 1], _power_dense(lh, k, e))
        else:
            j = 2 * n - k
            pre = el.matmul(_power_dense(lh, j, 2 * k - 2 * n - 1), inv[j])
        lam[k] = el.matmul(r, pre)
    return operator_from_dense(model, -2, lam)


def sl2_relations_hold(lh: GradedOperator, theta: GradedOperator, lam: GradedOperator) -> bool:
    return (bracket(theta, lh) == 2 * lh and bracket(theta, lam) == -2 * lam
            and bracket(lh, lam) == theta)


def sl2_completion_system(model: VerbitskyModel, h: Sequence) -> tuple[GradedOperator | None, int]:
    """Solve ``[L_h, X] = θ`` for a degree -2 operator X as one linear system.

    Returns the particular solution (or None) and the nullity of the
    homogeneous system; nullity 0 certifies uniqueness. Cost grows with the
    square of the model size, so this is meant for small models.
    """
    lh = lefschetz_operator(model, h)
    dims, top = model.dims, model.top
    # unknown X_k : A_k -> A_{k-1}, k = 1..top, entries numbered row-major
    var_off, pos = {}, 0
    for k in range(1, top + 1):
        var_off[k] = pos
        pos += dims[k - 1] * dims[k]
    nvars = pos
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    ld = {k: lh.dense(k) for k in range(top)}
    for k in range(top + 1):
        # (L X_k - X_{k+1} L)(e_c) = θ e_c for each basis vector c of A_k
        for c in range(dims[k]):
            for r in range(dims[k]):
                row = [Fraction(0)] * nvars
                if k >= 1:
                    lm = ld[k - 1]  # A_{k-1} -> A_k
                    for s in range(dims[k - 1]):
                        if lm[r][s]:
                            row[var_off[k] + s * dims[k] + c] += lm[r][s]
                if k + 1 <= top:
                    lk = ld[k]  # A_k -> A_{k+1}
                    for s in range(dims[k + 1]):
                        if lk[s][c]:
                            row[var_off[k + 1] + r * dims[k + 1] + s] -= lk[s][c]
                rows.append(row)
                rhs.append(Fraction(2 * k - 2 * model.n) if r == c else Fraction(0))
    sol, nullity = el.solve_with_nullity(rows, rhs)
    if sol is None:
        return None, nullity
    blocks = {}
    for k in range(1, top + 1):
        m = [[sol[var_off[k] + i * dims[k] + j] for j in range(dims[k])] for i in range(dims[k - 1])]
        blocks[k] = m
    return operator_from_dense(model, -2, blocks), nullity


def so_derivation(model: VerbitskyModel, x: Matrix) -> GradedOperator:
    """Degree-0 derivation extending ``x ∈ so(V, q)`` from ``A_1``."""
    if not is_skew(model.space, x):
        raise ValueError("matrix is not skew with respect to the form")
    d = model.d
    images = [polys.linear([x[i][j] for i in range(d)]) for j in range(d)]
    blocks = {}
    for k in range(1, model.top + 1):
        b: SparseBlock = {}
        for a, mono in enumerate(model.basis_monomials(k)):
            p: polys.Poly = {}
            for pos in range(k):
                rest = mono[:pos] + mono[pos + 1:]
                for m, c in images[mono[pos]].items():
                    polys.add_to(p, polys.mono_mul(rest, m), c)
            col = el.sparse(model.reduce(k, p))
            if col:
                b[a] = col
        if b:
            blocks[k] = b
    return GradedOperator(model, 0, blocks)


def derivation_well_defined(model: VerbitskyModel, x: Matrix) -> bool:
    """The derivation of S*V commutes with reduction, i.e. preserves the ideal."""
    dop = so_derivation(model, x)
    d = model.d
    images = [polys.linear([x[i][j] for i in range(d)]) for j in range(d)]
    for k in range(model.n + 1, model.top + 1):
        block = dop.block(k)
        for mono in model.degrees[k].monomials:
            p: polys.Poly = {}
            for pos in range(k):
                rest = mono[:pos] + mono[pos + 1:]
                for m, c in images[mono[pos]].items():
                    polys.add_to(p, polys.mono_mul(rest, m), c)
            lhs = model.reduce(k, p)
            rhs = el.sp_apply(block, el.sparse(model.reduce_monomial(mono)))
            if el.sparse(lhs) != rhs:
                return False
    return True


def is_derivation(model: VerbitskyModel, op: GradedOperator) -> bool:
    """Leibniz rule on every pair of basis elements."""
    if op.shift != 0:
        return False
    dims = model.dims
    for j in range(model.top + 1):
        for k in range(j, model.top + 1 - j):
            for a in range(dims[j]):
                da = el.sp_apply(op.block(j), {a: Fraction(1)})
                for b in range(dims[k]):
                    db = el.sp_apply(op.block(k), {b: Fraction(1)})
                    lhs = el.sp_apply(op.block(j + k), el.sparse(model.basis_product(j, a, k, b)))
                    rhs: dict[int, Fraction] = {}
                    for a2, c in da.items():
                        el._axpy(rhs, c, el.sparse(model.basis_product(j, a2, k, b)))
                    for b2, c in db.items():
                        el._axpy(rhs, c, el.sparse(model.basis_product(j, a, k, b2)))
                    if lhs != rhs:
                        return False
    return True


# ---------- the total Lie algebra ----------


def lefschetz_spanning_set(model: VerbitskyModel) -> list[list[Fraction]]:
    """``d`` Lefschetz classes spanning V: coordinate vectors, then e_i ± e_j."""
    d = model.d
    unit = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    candidates = list(unit)
    for i, j in itertools.combinations(range(d), 2):
        candidates.append([a + b for a, b in zip(unit[i], unit[j])])
    for i, j in itertools.combinations(range(d), 2):
        candidates.append([a - b for a, b in zip(unit[i], unit[j])])
    span = el.EchelonSpan()
    chosen = []
    for h in candidates:
        if len(chosen) == d:
            break
        if span.contains(el.sparse(h)) or not has_lefschetz(model, h):
            continue
        span.add(el.sparse(h))
        chosen.append(h)
    if len(chosen) < d:
        raise ValueError("could not find a spanning set of Lefschetz classes")
    return chosen


def gtot_generators(model: VerbitskyModel, classes=None) -> list[GradedOperator]:
    classes = classes if classes is not None else lefschetz_spanning_set(model)
    gens = [grading_operator(model)]
    gens += [lefschetz_operator(model, h) for h in classes]
    gens += [dual_lefschetz(model, h) for h in classes]
    return gens


def lie_closure(model: VerbitskyModel, generators: Sequence[GradedOperator]) -> lie.LieBasis:
    return lie.saturate(list(generators), bracket, GradedOperator.flatten)


def restriction_to_A1(op: GradedOperator) -> Matrix:
    return op.dense(1)


@dataclass
class GtotReport:
    dim: int
    expected_dim: int
    grading_dims: list[int]
    expected_grading: list[int]
    commuting_duals: bool
    duals_in_span: bool
    derivation_check: bool
    abelian_extremes: bool
    restriction_check: bool
    killing_signature: list[int] | None
    expected_killing: list[int] | None
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "expected_dim": self.expected_dim,
            "grading_dims": self.grading_dims,
            "expected_grading": self.expected_grading,
            "commuting_duals": self.commuting_duals,
            "duals_in_span": self.duals_in_span,
            "derivation_check": self.derivation_check,
            "abelian_extremes": self.abelian_extremes,
            "restriction_check": self.restriction_check,
            "killing_signature": self.killing_signature,
            "expected_killing": self.expected_killing,
            "failures": self.failures,
        }


def verify_gtot_structure(basis: lie.LieBasis, model: VerbitskyModel,
                          duals: Sequence[GradedOperator] = (),
                          killing: bool = True, extra_classes: int = 3) -> GtotReport:
    """Check the invariants that pin down ``g_tot ≅ so(Ṽ, q̃)`` as a graded algebra."""
    space = model.space
    d = model.d
    failures = []

    dim = basis.dim
    expected_dim = (d + 2) * (d + 1) // 2
    if dim != expected_dim:
        failures.append("dimension")

    by_shift: dict[int, list[GradedOperator]] = {}
    for b in basis.elements:
        by_shift.setdefault(b.shift, []).append(b)
    grading = [len(by_shift.get(s, [])) for s in (-2, 0, 2)]
    expected_grading = [d, d * (d - 1) // 2 + 1, d]
    if grading != expected_grading or set(by_shift) - {-2, 0, 2}:
        failures.append("grading")
    theta = grading_operator(model)
    if not all(bracket(theta, b) == b.shift * b for b in basis.elements):
        failures.append("grading")

    commuting = all(bracket(x, y).is_zero() for x, y in itertools.combinations(duals, 2))
    if not commuting:
        failures.append("commuting_duals")

    # duals of further Lefschetz classes stay inside the degree -2 part
    rng = random.Random(0)
    in_span = True
    for _ in range(extra_classes):
        h = [Fraction(rng.randint(-2, 2)) for _ in range(d)]
        if any(h) and space.q(h) and has_lefschetz(model, h):
            in_span &= basis.contains(dual_lefschetz(model, h))
    if not in_span:
        failures.append("duals_in_span")

    derivs = all(basis.contains(so_derivation(model, x)) for x in so_basis(space))
    if not derivs:
        failures.append("derivation_check")

    abelian = all(bracket(x, y).is_zero()
                  for s in (-2, 2) for x, y in itertools.combinations(by_shift.get(s, []), 2))
    if not abelian:
        failures.append("abelian_extremes")

    restriction = all(_skew_plus_scalar(space, restriction_to_A1(b)) for b in by_shift.get(0, []))
    if not restriction:
        failures.append("restriction_check")

    sig = expected_sig = None
    if killing:
        p, m, _ = space.signature()
        kp, km, kz = basis.killing_signature()
        sig = [kp, km, kz]
        expected_sig = [(p + 1) * (m + 1), p * (p + 1) // 2 + m * (m + 1) // 2, 0]
        if sig != expected_sig:
            failures.append("killing_signature")

    return GtotReport(dim, expected_dim, grading, expected_grading, commuting, in_span, derivs,
                      abelian, restriction, sig, expected_sig, failures)


def _skew_plus_scalar(space: QuadraticSpace, m: Matrix) -> bool:
    # G m + m^T G = 2 c G for the scalar part c
    g = space.matrix
    s = el.add(el.matmul(g, m), el.matmul(el.transpose(m), g))
    i, j = next((i, j) for i in range(space.d) for j in range(space.d) if g[i][j])
    c = s[i][j] / (2 * g[i][j])
    return s == el.scale(2 * c, g)
