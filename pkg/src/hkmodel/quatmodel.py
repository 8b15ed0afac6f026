"""Pointwise check of the so(4,1) action on forms of a flat hyperkähler space.

``M = H^n`` is a left module over the quaternions with the standard real
metric. Each of I, J, K gives a Kähler form ``ω_a(x, y) = g(ax, y)``, a
Lefschetz operator ``L_a`` on ``Λ*M*``, its metric adjoint ``Λ_a`` and the
derivation ``W_a`` induced by ``α -> α ∘ a`` on 1-forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import exactlin as el
from . import lie
from .exactlin import Matrix, SparseBlock

MAX_N = 2

# left multiplication by i, j, k on H with real basis (1, i, j, k)
_LEFT = {
    "I": [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
    "J": [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
    "K": [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
}


@dataclass
class QuaternionModule:
    n: int
    I: Matrix
    J: Matrix
    K: Matrix
    g: Matrix

    @property
    def dim(self) -> int:
        return 4 * self.n

    def unit(self, name: str) -> Matrix:
        return {"I": self.I, "J": self.J, "K": self.K}[name]

    def imaginary(self, alpha, beta, gamma) -> Matrix:
        """Left multiplication by ``alpha i + beta j + gamma k``."""
        return el.add(el.add(el.scale(alpha, self.I), el.scale(beta, self.J)), el.scale(gamma, self.K))


def rho(alpha, beta, gamma) -> Fraction:
    """``Re(a^2)`` for the imaginary quaternion ``a = alpha i + beta j + gamma k``."""
    return -(Fraction(alpha) ** 2 + Fraction(beta) ** 2 + Fraction(gamma) ** 2)


def _block_diag(block: list[list[int]], n: int) -> Matrix:
    m = el.zeros(4 * n, 4 * n)
    for b in range(n):
        for i in range(4):
            for j in range(4):
                m[4 * b + i][4 * b + j] = Fraction(block[i][j])
    return m


def build_quaternion_model(n: int) -> QuaternionModule:
    if n < 1:
        raise ValueError("n must be positive")
    return QuaternionModule(n, _block_diag(_LEFT["I"], n), _block_diag(_LEFT["J"], n),
                            _block_diag(_LEFT["K"], n), el.identity(4 * n))


def two_form(module: QuaternionModule, a: Matrix | str) -> Matrix:
    """Gram matrix of ``ω_a(x, y) = g(ax, y)``, i.e. ``a^T g``."""
    if isinstance(a, str):
        a = module.unit(a)
    return el.matmul(el.transpose(a), module.g)


# ---------- exterior algebra ----------


def _subsets(m: int) -> list[tuple[int, ...]]:
    return [s for k in range(m + 1) for s in itertools.combinations(range(m), k)]


def _sorted_sign(seq: list[int]) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


@dataclass
class ExteriorOperators:
    dim: int  # of Λ*M*
    basis: list[tuple[int, ...]]
    n: int
    L: dict[str, SparseBlock]
    Lam: dict[str, SparseBlock]
    W: dict[str, SparseBlock]
    theta: SparseBlock
    degree: list[int] = field(default_factory=list)


def wedge_operator(basis, index, omega: Matrix) -> SparseBlock:
    m = len(omega)
    out: SparseBlock = {}
    for col, s in enumerate(basis):
        ss = set(s)
        c: dict[int, Fraction] = {}
        for u in range(m):
            for v in range(u + 1, m):
                w = omega[u][v]
                if not w or u in ss or v in ss:
                    continue
                sign = (-1) ** (sum(1 for x in s if x < u) + sum(1 for x in s if x < v))
                tgt = index[tuple(sorted(s + (u, v)))]
                c[tgt] = c.get(tgt, 0) + sign * w
        c = {k: x for k, x in c.items() if x}
        if c:
            out[col] = c
    return out


def derivation_operator(basis, index, a: Matrix) -> SparseBlock:
    """Extend ``e^u -> sum_v a[u][v] e^v`` (that is ``α -> α ∘ a``) as a derivation."""
    m = len(a)
    out: SparseBlock = {}
    for col, s in enumerate(basis):
        c: dict[int, Fraction] = {}
        for p, u in enumerate(s):
            for v in range(m):
                x = a[u][v]
                if not x or (v != u and v in s):
                    continue
                seq = list(s)
                seq[p] = v
                tgt = index[tuple(sorted(seq))]
                c[tgt] = c.get(tgt, 0) + _sorted_sign(seq) * x
        c = {k: x for k, x in c.items() if x}
        if c:
            out[col] = c
    return out


def sp_transpose(b: SparseBlock) -> SparseBlock:
    out: SparseBlock = {}
    for j, col in b.items():
        for i, x in col.items():
            out.setdefault(i, {})[j] = x
    return out


def exterior_operators(module: QuaternionModule) -> ExteriorOperators:
    if module.n > MAX_N:
        raise ValueError("exterior dimension cap")
    basis = _subsets(module.dim)
    index = {s: i for i, s in enumerate(basis)}
    L, Lam, W = {}, {}, {}
    for name in "IJK":
        L[name] = wedge_operator(basis, index, two_form(module, name))
        # the metric on forms makes the monomial basis orthonormal since g = 1
        Lam[name] = sp_transpose(L[name])
        W[name] = derivation_operator(basis, index, module.unit(name))
    degree = [len(s) for s in basis]
    theta = {i: {i: Fraction(k - 2 * module.n)} for i, k in enumerate(degree) if k != 2 * module.n}
    return ExteriorOperators(len(basis), basis, module.n, L, Lam, W, theta, degree)


# ---------- verification ----------


def sp_bracket(a: SparseBlock, b: SparseBlock) -> SparseBlock:
    return el.sp_lincomb([(Fraction(1), el.sp_compose(a, b)), (Fraction(-1), el.sp_compose(b, a))])


def _flat(dim: int):
    def flatten(b: SparseBlock) -> dict[int, Fraction]:
        return {j * dim + i: x for j, col in b.items() for i, x in col.items()}
    return flatten


def _first_difference(a: SparseBlock, b: SparseBlock):
    diff = el.sp_lincomb([(Fraction(1), a), (Fraction(-1), b)])
    for j in sorted(diff):
        i = min(diff[j])
        return {"row": i, "col": j, "lhs": el.format_rational(a.get(j, {}).get(i, Fraction(0))),
                "rhs": el.format_rational(b.get(j, {}).get(i, Fraction(0)))}
    return None


@dataclass
class So41Report:
    identities: dict[str, bool]
    closure_dim: int
    killing: list[int]
    offending: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.identities.values()) and self.closure_dim == 10 and self.killing == [4, 6, 0]

    def to_json(self) -> dict:
        return {"identities": self.identities, "closure_dim": self.closure_dim,
                "killing": self.killing[:2], "offending": self.offending}


def verify_so41(ops: ExteriorOperators) -> So41Report:
    L, Lam, W, theta = ops.L, ops.Lam, ops.W, ops.theta
    identities: dict[str, bool] = {}
    offending = {}

    def check(name, lhs, rhs):
        bad = _first_difference(lhs, rhs)
        identities[name] = bad is None
        if bad:
            offending[name] = bad

    for a, b, c in (("I", "J", "K"), ("J", "K", "I"), ("K", "I", "J")):
        check(f"[Lam_{a},L_{b}]=W_{c}", sp_bracket(Lam[a], L[b]), W[c])
    for a, b in (("I", "J"), ("J", "K"), ("K", "I")):
        check(f"[Lam_{a},Lam_{b}]=0", sp_bracket(Lam[a], Lam[b]), {})
    for a in "IJK":
        check(f"[L_{a},Lam_{a}]=theta", sp_bracket(L[a], Lam[a]), theta)
        check(f"[theta,L_{a}]=2L_{a}", sp_bracket(theta, L[a]), el.sp_lincomb([(Fraction(2), L[a])]))
        check(f"[theta,Lam_{a}]=-2Lam_{a}", sp_bracket(theta, Lam[a]),
              el.sp_lincomb([(Fraction(-2), Lam[a])]))

    gens = [L[a] for a in "IJK"] + [Lam[a] for a in "IJK"]
    basis = lie.saturate(gens, sp_bracket, _flat(ops.dim))
    kp, km, kz = basis.killing_signature()
    return So41Report(identities, basis.dim, [kp, km, kz], offending)


def weil_square_eigen_check(ops: ExteriorOperators, name: str = "I") -> bool:
    """On 2-forms ``W_a^2`` is diagonalisable with eigenvalues exactly {-4, 0}."""
    w = ops.W[name]
    two = [i for i, k in enumerate(ops.degree) if k == 2]
    w2 = el.sp_compose(w, w)
    sub = [[w2.get(j, {}).get(i, Fraction(0)) for j in two] for i in two]
    ident = el.identity(len(two))
    plus4 = el.add(sub, el.scale(4, ident))
    return (el.is_zero(el.matmul(sub, plus4)) and not el.is_zero(sub) and not el.is_zero(plus4))
