"""Exact linear algebra over the rationals.

Matrices are plain lists of rows of :class:`fractions.Fraction`. Nothing here
ever rounds; every routine either returns an exact answer or raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Matrix = list[list[Fraction]]
Vector = list[Fraction]


class DimensionError(ValueError):
    pass


# ---------- scalars ----------


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {s!r}") from None
    if q == 0:
        raise ValueError(f"malformed rational {s!r}: zero denominator")
    return Fraction(p, q)


def format_rational(x: Fraction) -> str:
    """Canonical 'p/q' form; integers are written without a denominator."""
    x = Fraction(x)
    return str(x)


# ---------- construction ----------


def to_matrix(rows: Iterable[Iterable]) -> Matrix:
    m = [[as_fraction(x) for x in row] for row in rows]
    if m and any(len(r) != len(m[0]) for r in m):
        raise DimensionError("ragged matrix")
    return m


def to_vector(v: Iterable) -> Vector:
    return [as_fraction(x) for x in v]


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Fraction(1)
    return m


def diag(entries: Sequence) -> Matrix:
    n = len(entries)
    m = zeros(n, n)
    for i, x in enumerate(entries):
        m[i][i] = as_fraction(x)
    return m


def shape(m: Matrix) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def copy(m: Matrix) -> Matrix:
    return [row[:] for row in m]


# ---------- arithmetic ----------


def transpose(m: Matrix, cols: int | None = None) -> Matrix:
    if not m:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*m)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    ra, ca = shape(a)
    rb, cb = len(b), (len(b[0]) if b else 0)
    if ca != rb:
        raise DimensionError(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    out = []
    for row in a:
        acc = [Fraction(0)] * cb
        for k, x in enumerate(row):
            if x:
                brow = b[k]
                for j in range(cb):
                    y = brow[j]
                    if y:
                        acc[j] += x * y
        out.append(acc)
    return out


def matvec(m: Matrix, v: Sequence[Fraction]) -> Vector:
    if m and len(m[0]) != len(v):
        raise DimensionError(f"matrix has {len(m[0])} columns, vector has length {len(v)}")
    return [sum((x * y for x, y in zip(row, v) if x and y), Fraction(0)) for row in m]


def add(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise DimensionError("shape mismatch in add")
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sub(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise DimensionError("shape mismatch in sub")
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(c, a: Matrix) -> Matrix:
    c = as_fraction(c)
    return [[c * x for x in row] for row in a]


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return sub(matmul(a, b), matmul(b, a))


def is_zero(m: Matrix) -> bool:
    return all(not x for row in m for x in row)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionError("length mismatch in dot")
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def is_symmetric(m: Matrix) -> bool:
    r, c = shape(m)
    return r == c and all(m[i][j] == m[j][i] for i in range(r) for j in range(i))


# ---------- elimination ----------


def _pick_pivot(rows: Matrix, start: int, col: int) -> int | None:
    # leftmost column is fixed by the caller; among candidate rows take the
    # largest |numerator|, ties to the smallest index
    best, best_key = None, None
    for i in range(start, len(rows)):
        x = rows[i][col]
        if x:
            key = abs(x.numerator)
            if best is None or key > best_key:
                best, best_key = i, key
    return best


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns. The input is not modified."""
    a = copy(m)
    rows, cols = shape(a)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = _pick_pivot(a, r, c)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        nz = [(j, y) for j, y in enumerate(a[r]) if y]
        for i in range(rows):
            if i != r:
                f = a[i][c]
                if f:
                    row = a[i]
                    for j, y in nz:
                        row[j] -= f * y
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel(m: Matrix, cols: int | None = None) -> list[Vector]:
    """Basis of the null space, one vector per free column of the RREF.

    ``cols`` is needed only when ``m`` has no rows.
    """
    n = len(m[0]) if m else (cols or 0)
    r, pivots = rref(m) if m else ([], [])
    pivset = set(pivots)
    basis = []
    for f in range(n):
        if f in pivset:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(r, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def solve_linear(m: Matrix, b: Sequence) -> Vector | None:
    """One solution of ``m x = b`` with free variables set to zero, or None."""
    return solve_with_nullity(m, b)[0]


def solve_with_nullity(m: Matrix, b: Sequence) -> tuple[Vector | None, int]:
    """``solve_linear`` plus the dimension of the kernel of ``m``, from one elimination."""
    rows, cols = shape(m)
    if len(b) != rows:
        raise DimensionError(f"right-hand side has length {len(b)}, expected {rows}")
    aug = [row + [as_fraction(x)] for row, x in zip(m, b)]
    r, pivots = rref(aug)
    if pivots and pivots[-1] == cols:
        return None, cols - (len(pivots) - 1)
    x = [Fraction(0)] * cols
    for row, pc in zip(r, pivots):
        x[pc] = row[cols]
    return x, cols - len(pivots)


def inverse(m: Matrix) -> Matrix:
    n, c = shape(m)
    if n != c:
        raise DimensionError("inverse of a non-square matrix")
    aug = [row + e for row, e in zip(m, identity(n))]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in r]


def det(m: Matrix) -> Fraction:
    a = copy(m)
    n, c = shape(a)
    if n != c:
        raise DimensionError("determinant of a non-square matrix")
    d = Fraction(1)
    for col in range(n):
        p = _pick_pivot(a, col, col)
        if p is None:
            return Fraction(0)
        if p != col:
            a[col], a[p] = a[p], a[col]
            d = -d
        piv = a[col][col]
        d *= piv
        for i in range(col + 1, n):
            f = a[i][col] / piv
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return d


def ldl_signature(s: Matrix) -> tuple[int, int, int]:
    """Inertia (n_plus, n_minus, n_zero) of a symmetric matrix.

    Symmetric elimination; when every remaining diagonal entry vanishes a
    2x2 hyperbolic block is split off instead, which contributes (1, 1).
    """
    if not is_symmetric(s):
        raise ValueError("ldl_signature needs a symmetric matrix")
    a = copy(s)
    n = len(a)
    active = list(range(n))
    plus = minus = 0
    while active:
        piv = next((i for i in active if a[i][i]), None)
        if piv is not None:
            p = a[piv][piv]
            if p > 0:
                plus += 1
            else:
                minus += 1
            active.remove(piv)
            row = a[piv]
            for i in active:
                f = row[i] / p
                if f:
                    ai = a[i]
                    for j in active:
                        if row[j]:
                            ai[j] -= f * row[j]
            continue
        pair = next(((i, j) for i in active for j in active if j > i and a[i][j]), None)
        if pair is None:
            break
        i, j = pair
        # zero diagonal with a[i][j] != 0: the block [[0, c], [c, 0]] is hyperbolic
        c = a[i][j]
        plus += 1
        minus += 1
        active.remove(i)
        active.remove(j)
        ri, rj = a[i], a[j]
        for k in active:
            # eliminate against the 2x2 block; its inverse is [[0, 1/c], [1/c, 0]]
            fi = rj[k] / c
            fj = ri[k] / c
            if fi or fj:
                ak = a[k]
                for l in active:
                    ak[l] -= fi * ri[l] + fj * rj[l]
    return plus, minus, n - plus - minus


# ---------- incremental span ----------


class EchelonSpan:
    """Incrementally maintained row-echelon basis of a subspace of Q^N.

    Vectors are sparse dicts ``index -> Fraction``. Rows are kept fully
    reduced against each other so membership is a single sweep. Each row
    also remembers which combination of the accepted vectors produced it, so
    members can be written in the basis of accepted vectors.
    """

    def __init__(self) -> None:
        self.rows: dict[int, dict[int, Fraction]] = {}
        self.combos: dict[int, dict[int, Fraction]] = {}
        self.count = 0

    def __len__(self) -> int:
        return self.count

    def _reduce(self, v, combo=None):
        v = {k: x for k, x in v.items() if x}
        for p, row in self.rows.items():
            f = v.get(p)
            if f:
                _axpy(v, -f, row)
                if combo is not None:
                    _axpy(combo, -f, self.combos[p])
        return v

    def reduce(self, v: dict[int, Fraction]) -> dict[int, Fraction]:
        return self._reduce(v)

    def contains(self, v: dict[int, Fraction]) -> bool:
        return not self._reduce(v)

    def express(self, v: dict[int, Fraction]) -> list[Fraction] | None:
        """Coefficients of ``v`` on the accepted vectors, or None if outside."""
        combo: dict[int, Fraction] = {}
        if self._reduce(v, combo):
            return None
        return [-combo.get(i, Fraction(0)) for i in range(self.count)]

    def add(self, v: dict[int, Fraction]) -> bool:
        """Add ``v``; return False when it was already in the span."""
        combo = {self.count: Fraction(1)}
        r = self._reduce(v, combo)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        r = {k: x * inv for k, x in r.items()}
        combo = {k: x * inv for k, x in combo.items()}
        for q, row in self.rows.items():
            f = row.get(p)
            if f:
                _axpy(row, -f, r)
                _axpy(self.combos[q], -f, combo)
        self.rows[p] = r
        self.combos[p] = combo
        self.count += 1
        return True


def _axpy(y: dict[int, Fraction], a: Fraction, x: dict[int, Fraction]) -> None:
    for k, xv in x.items():
        t = y.get(k, 0) + a * xv
        if t:
            y[k] = t
        else:
            y.pop(k, None)


def sparse(v: Sequence[Fraction]) -> dict[int, Fraction]:
    return {i: x for i, x in enumerate(v) if x}


# ---------- square classes ----------


@dataclass(frozen=True)
class SquarefreeClass:
    """Class of a nonzero rational in Q^x / (Q^x)^2, by squarefree representative."""

    representative: int

    def __post_init__(self) -> None:
        if self.representative == 0:
            raise ValueError("zero has no square class")

    def __mul__(self, other: "SquarefreeClass") -> "SquarefreeClass":
        a, b = self.representative, other.representative
        g = gcd(a, b)
        return SquarefreeClass(a * b // (g * g))

    def is_trivial(self) -> bool:
        return self.representative == 1

    def __str__(self) -> str:
        return str(self.representative)


def _squarefree_part(m: int) -> int:
    from sympy import factorint

    out = 1
    for p, e in factorint(m).items():
        if e % 2:
            out *= p
    return out


def squarefree_class(r) -> SquarefreeClass:
    r = as_fraction(r)
    if r == 0:
        raise ValueError("squarefree_class of zero")
    sign = -1 if r < 0 else 1
    # p/q and p*q differ by the square q^2
    return SquarefreeClass(sign * _squarefree_part(abs(r.numerator) * r.denominator))


# ---------- column-sparse blocks ----------
#
# A block is ``{col: {row: value}}`` with zero columns omitted. Shapes are
# tracked by the caller.

SparseBlock = dict[int, dict[int, Fraction]]


def sp_from_dense(m: Matrix) -> SparseBlock:
    out: SparseBlock = {}
    for i, row in enumerate(m):
        for j, x in enumerate(row):
            if x:
                out.setdefault(j, {})[i] = x
    return out


def sp_to_dense(b: SparseBlock, rows: int, cols: int) -> Matrix:
    m = zeros(rows, cols)
    for j, col in b.items():
        for i, x in col.items():
            m[i][j] = x
    return m


def sp_apply(b: SparseBlock, v: dict[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for j, x in v.items():
        col = b.get(j)
        if col and x:
            _axpy(out, x, col)
    return out


def sp_compose(a: SparseBlock, b: SparseBlock) -> SparseBlock:
    """``a ∘ b``: apply b first."""
    out: SparseBlock = {}
    for j, col in b.items():
        c = sp_apply(a, col)
        if c:
            out[j] = c
    return out


def sp_lincomb(terms: Iterable[tuple[Fraction, SparseBlock]]) -> SparseBlock:
    out: SparseBlock = {}
    for c, b in terms:
        if not c:
            continue
        for j, col in b.items():
            tgt = out.setdefault(j, {})
            _axpy(tgt, c, col)
            if not tgt:
                del out[j]
    return out
