"""The graded algebra SH(V, n) = S*V / I and its top-degree integral.

``A_k`` is the degree-``k`` piece of the quotient (it models ``H^{2k}`` of a
manifold of real dimension ``4n``). The ideal ``I`` is generated by the
harmonic space ``H_{n+1} = ker(Laplacian) ⊂ S^{n+1}V``; over the complex
numbers that space is spanned by the powers ``a^{n+1}`` of isotropic classes.

Quotient bases consist of *standard monomials*: the monomials that are not
leading terms of any element of ``I_k`` (lexicographic order on sorted index
tuples). Reduction of a monomial to the standard basis is stored per degree.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import exactlin as el
from . import polys
from .exactlin import EchelonSpan, Matrix, Vector
from .polys import Monomial, Poly
from .quadspace import QuadraticSpace

# ideal-route construction is used up to this many monomials in top degree
IDEAL_ROUTE_LIMIT = 4000


class ModelError(RuntimeError):
    pass


# ---------- Laplacian and harmonic polynomials ----------


def laplacian_monomial(gram, m: Monomial) -> Poly:
    """Pair contraction: sum over positions j < k of 2 b(x_j, x_k) times the rest."""
    out: Poly = {}
    for j in range(len(m)):
        for k in range(j + 1, len(m)):
            g = gram[m[j]][m[k]]
            if g:
                rest = m[:j] + m[j + 1:k] + m[k + 1:]
                polys.add_to(out, rest, 2 * g)
    return out


def laplacian_poly(gram, p: Poly) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        for r, x in laplacian_monomial(gram, m).items():
            polys.add_to(out, r, c * x)
    return out


def laplacian(space: QuadraticSpace, m: int) -> Matrix:
    """Matrix of the Laplacian ``S^m V -> S^{m-2} V`` in monomial bases."""
    if m < 2:
        raise ValueError("the Laplacian needs degree at least 2")
    src = polys.monomials(space.d, m)
    dst = polys.monomials(space.d, m - 2)
    index = {mono: i for i, mono in enumerate(dst)}
    out = el.zeros(len(dst), len(src))
    for j, mono in enumerate(src):
        for r, x in laplacian_monomial(space.gram, mono).items():
            out[index[r]][j] += x
    return out


def harmonic_space(space: QuadraticSpace, m: int) -> list[Vector]:
    """Basis (in monomial coordinates) of the harmonic polynomials of degree m."""
    if m < 2:
        n = len(polys.monomials(space.d, m))
        return el.identity(n)
    return el.kernel(laplacian(space, m))


def dual_quadric(space: QuadraticSpace) -> Poly:
    """``qbar = sum (G^-1)_ij e_i e_j``, the O(V, q)-invariant element of S^2 V."""
    ginv = el.inverse(space.matrix)
    return polys.quadratic(ginv)


# ---------- the model ----------


@dataclass
class Degree:
    monomials: list[Monomial]
    standard: list[int]  # indices into monomials
    reduction: dict[Monomial, Vector]  # filled only for degrees above n

    @property
    def dim(self) -> int:
        return len(self.standard)


@dataclass
class VerbitskyModel:
    space: QuadraticSpace
    n: int
    degrees: list[Degree]
    method: str
    top_scale: Fraction = Fraction(1)
    _products: dict = field(default_factory=dict, repr=False)

    @property
    def d(self) -> int:
        return self.space.d

    @property
    def dims(self) -> list[int]:
        return [deg.dim for deg in self.degrees]

    @property
    def top(self) -> int:
        return 2 * self.n

    def basis_monomial(self, k: int, i: int) -> Monomial:
        deg = self.degrees[k]
        return deg.monomials[deg.standard[i]]

    def basis_monomials(self, k: int) -> list[Monomial]:
        deg = self.degrees[k]
        return [deg.monomials[i] for i in deg.standard]

    # -- reduction

    def reduce_monomial(self, m: Monomial) -> Vector:
        k = len(m)
        if k > self.top:
            raise ValueError("monomial above the top degree")
        if k <= self.n:
            # no relations: standard monomials are all monomials in lex order
            v = [Fraction(0)] * self.degrees[k].dim
            v[_lex_rank(self.d, m)] = Fraction(1)
            return v
        return self.degrees[k].reduction[m]

    def reduce(self, k: int, p: Poly) -> Vector:
        out = [Fraction(0)] * self.degrees[k].dim
        for m, c in p.items():
            if len(m) != k:
                raise ValueError(f"polynomial is not homogeneous of degree {k}")
            if k <= self.n:
                out[_lex_rank(self.d, m)] += c
            else:
                for i, x in enumerate(self.degrees[k].reduction[m]):
                    if x:
                        out[i] += c * x
        return out

    def lift(self, k: int, v: Sequence[Fraction]) -> Poly:
        """Polynomial in standard monomials representing coordinates ``v``."""
        return {self.basis_monomial(k, i): Fraction(x) for i, x in enumerate(v) if x}

    # -- products

    def basis_product(self, j: int, a: int, k: int, b: int) -> Vector:
        key = (j, a, k, b) if (j, a) <= (k, b) else (k, b, j, a)
        hit = self._products.get(key)
        if hit is None:
            m = polys.mono_mul(self.basis_monomial(j, a), self.basis_monomial(k, b))
            hit = self.reduce_monomial(m)
            self._products[key] = hit
        return hit

    def multiply(self, j: int, x: Sequence[Fraction], k: int, y: Sequence[Fraction]) -> Vector:
        if j + k > self.top:
            return []
        out = [Fraction(0)] * self.degrees[j + k].dim
        for a, xa in enumerate(x):
            if not xa:
                continue
            for b, yb in enumerate(y):
                if not yb:
                    continue
                c = xa * yb
                for i, z in enumerate(self.basis_product(j, a, k, b)):
                    if z:
                        out[i] += c * z
        return out

    def structure_constants(self, j: int, k: int) -> list[list[Vector]]:
        """``table[a][b]`` = coordinates of (basis a of A_j) * (basis b of A_k)."""
        return [[self.basis_product(j, a, k, b) for b in range(self.dims[k])]
                for a in range(self.dims[j])]

    # -- elements

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(tuple([Fraction(0)] * dm) for dm in self.dims))

    def homogeneous(self, k: int, v: Sequence) -> "AlgebraElement":
        parts = [[Fraction(0)] * dm for dm in self.dims]
        parts[k] = el.to_vector(v)
        if len(parts[k]) != self.dims[k]:
            raise el.DimensionError(f"A_{k} has dimension {self.dims[k]}")
        return AlgebraElement(self, tuple(tuple(p) for p in parts))

    def unit(self) -> "AlgebraElement":
        return self.homogeneous(0, [1])

    def vector_class(self, h: Sequence) -> "AlgebraElement":
        """Class of ``h in V`` in ``A_1``."""
        return self.homogeneous(1, self.reduce(1, polys.linear(el.to_vector(h))))

    def poly_class(self, p: Poly) -> "AlgebraElement":
        by_degree: dict[int, Poly] = {}
        for m, c in p.items():
            by_degree.setdefault(len(m), {})[m] = c
        out = self.zero()
        for k, pk in by_degree.items():
            if k <= self.top:
                out = out + self.homogeneous(k, self.reduce(k, pk))
        return out

    def qbar(self) -> "AlgebraElement":
        return self.poly_class(dual_quadric(self.space))

    def integrate(self, x: "AlgebraElement") -> Fraction:
        return integrate(self, x)

    # -- serialization

    def manifest(self, with_products: bool = True) -> dict:
        data = {
            "gram": self.space.to_json()["gram"],
            "n": self.n,
            "dims": self.dims,
            "standard_monomials": [[list(m) for m in self.basis_monomials(k)]
                                   for k in range(self.top + 1)],
            "integral_of_top_basis": el.format_rational(self.top_scale),
        }
        if with_products:
            data["structure_constants"] = {
                f"{j},{k}": [[[el.format_rational(x) for x in v] for v in row]
                             for row in self.structure_constants(j, k)]
                for j in range(self.top + 1) for k in range(j, self.top + 1 - j)
            }
        return data

    def content_hash(self) -> str:
        data = self.manifest(with_products=False)
        data["reductions"] = {
            str(k): [[el.format_rational(x) for x in self.degrees[k].reduction[m]]
                     for m in self.degrees[k].monomials]
            for k in range(self.n + 1, self.top + 1)
        }
        blob = json.dumps(data, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def _lex_rank(d: int, m: Monomial) -> int:
    return _lex_index(d, len(m))[m]


@lru_cache(maxsize=None)
def _lex_index(d: int, k: int) -> dict[Monomial, int]:
    return {mono: i for i, mono in enumerate(polys.monomials(d, k))}


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    model: VerbitskyModel
    parts: tuple[tuple[Fraction, ...], ...]

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.model, tuple(tuple(x + y for x, y in zip(p, r))
                                                for p, r in zip(self.parts, other.parts)))

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.model, tuple(tuple(-x for x in p) for p in self.parts))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def __mul__(self, other) -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            c = el.as_fraction(other)
            return AlgebraElement(self.model, tuple(tuple(c * x for x in p) for p in self.parts))
        model = self.model
        out = [[Fraction(0)] * dm for dm in model.dims]
        for j, x in enumerate(self.parts):
            if not any(x):
                continue
            for k, y in enumerate(other.parts):
                if j + k > model.top or not any(y):
                    continue
                for i, z in enumerate(model.multiply(j, x, k, y)):
                    out[j + k][i] += z
        return AlgebraElement(model, tuple(tuple(p) for p in out))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "AlgebraElement":
        out = self.model.unit()
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraElement) and self.parts == other.parts

    def component(self, k: int) -> tuple[Fraction, ...]:
        return self.parts[k]

    def is_zero(self) -> bool:
        return not any(x for p in self.parts for x in p)


# ---------- construction ----------


def _ideal_route(space: QuadraticSpace, n: int, k: int, harmonic: list[Vector]) -> tuple[list[int], dict]:
    """Standard monomials and reductions in degree k > n from the ideal itself."""
    d = space.d
    mons = polys.monomials(d, k)
    index = {m: i for i, m in enumerate(mons)}
    hmons = polys.monomials(d, n + 1)
    span = EchelonSpan()
    for s in polys.monomials(d, k - n - 1):
        for h in harmonic:
            v: dict[int, Fraction] = {}
            for j, c in enumerate(h):
                if c:
                    v[index[polys.mono_mul(s, hmons[j])]] = c
            span.add(v)
    pivots = span.rows
    standard = [i for i in range(len(mons)) if i not in pivots]
    pos = {c: t for t, c in enumerate(standard)}
    reduction = {}
    for i, m in enumerate(mons):
        v = [Fraction(0)] * len(standard)
        if i in pivots:
            for c, x in pivots[i].items():
                if c != i:
                    v[pos[c]] = -x
        else:
            v[pos[i]] = Fraction(1)
        reduction[m] = v
    return standard, reduction


def _apolar_route(space: QuadraticSpace, n: int, k: int) -> tuple[list[int], dict]:
    """Same data as the ideal route, read off the Poincare pairing with S^{2n-k}.

    For a Poincare-duality quotient with one-dimensional top degree, ``I_k``
    is the kernel of ``m -> (T(m m'))_{m'}`` where ``T`` is the invariant
    functional ``Laplacian^n`` on ``S^{2n}V``. The standard monomials are the
    columns that are independent of all later columns.
    """
    d = space.d
    gram = space.gram
    mons = polys.monomials(d, k)
    partners = polys.monomials(d, 2 * n - k)
    functional = _top_functional(gram, n)

    def pairing(m: Monomial) -> dict[int, Fraction]:
        out = {}
        for j, p in enumerate(partners):
            t = functional(polys.mono_mul(m, p))
            if t:
                out[j] = t
        return out

    images = [pairing(m) for m in mons]
    span = EchelonSpan()
    standard = []
    for i in range(len(mons) - 1, -1, -1):
        if span.add(images[i]):
            standard.append(i)
        if len(span) == len(partners):
            break
    standard.sort()
    r = len(standard)
    block = [[images[c].get(j, Fraction(0)) for c in standard] for j in range(len(partners))]
    if r != len(partners):
        raise ModelError("Poincare pairing is degenerate")
    binv = el.inverse(block)
    reduction = {}
    for i, m in enumerate(mons):
        img = images[i]
        reduction[m] = [sum((row[j] * x for j, x in img.items()), Fraction(0)) for row in binv]
    return standard, reduction


def _top_functional(gram, n: int):
    @lru_cache(maxsize=None)
    def t(m: Monomial) -> Fraction:
        if not m:
            return Fraction(1)
        # contract the first factor with every later one
        total = Fraction(0)
        first = m[0]
        for k in range(1, len(m)):
            if k > 1 and m[k] == m[k - 1]:
                continue
            g = gram[first][m[k]]
            if g:
                mult = sum(1 for x in m[1:] if x == m[k])
                total += mult * g * t(m[1:k] + m[k + 1:])
        return total

    return t


def build_model(space: QuadraticSpace, n: int, method: str = "auto") -> VerbitskyModel:
    """Build SH(V, n) with integral normalised by ``∫[qbar^n] = 1``.

    ``method`` selects how relations are found in degrees above ``n``:
    ``"ideal"`` row-reduces the products ``S^{k-n-1} · H_{n+1}``;
    ``"apolar"`` reads the same ideal off the Poincare pairing and is much
    cheaper for large ``d``. ``"auto"`` uses the ideal route when the top
    symmetric power is small.
    """
    d = space.d
    if d < 2 or n < 1:
        raise ValueError("need dim V >= 2 and n >= 1")
    if method == "auto":
        method = "ideal" if len(polys.monomials(d, 2 * n)) <= IDEAL_ROUTE_LIMIT else "apolar"
    if method not in ("ideal", "apolar"):
        raise ValueError(f"unknown method {method!r}")
    harmonic = harmonic_space(space, n + 1) if method == "ideal" else []
    degrees = []
    for k in range(2 * n + 1):
        mons = polys.monomials(d, k)
        if k <= n:
            degrees.append(Degree(mons, list(range(len(mons))), {}))
            continue
        if method == "ideal":
            standard, reduction = _ideal_route(space, n, k, harmonic)
        else:
            standard, reduction = _apolar_route(space, n, k)
        degrees.append(Degree(mons, standard, reduction))
    model = VerbitskyModel(space, n, degrees, method)
    if model.dims[-1] != 1:
        raise ModelError(f"top degree has dimension {model.dims[-1]}, expected 1")
    top_qbar = model.reduce(2 * n, polys.ppow(dual_quadric(space), n))[0]
    if top_qbar == 0:
        raise ModelError("[qbar^n] vanishes in the top degree")
    model.top_scale = 1 / top_qbar
    return model


def integrate(model: VerbitskyModel, x: AlgebraElement) -> Fraction:
    """Top-degree component times the normalisation ``∫[qbar^n] = 1``."""
    return x.parts[model.top][0] * model.top_scale


def integrate_monomial(model: VerbitskyModel, m: Monomial) -> Fraction:
    return model.reduce_monomial(m)[0] * model.top_scale


def symmetric_power_matrix(phi: Matrix, k: int) -> tuple[list[Monomial], dict[Monomial, Poly]]:
    """Image of each degree-k monomial under the map induced by ``phi`` on S^k V."""
    d = len(phi)
    cols = [polys.linear([phi[i][j] for i in range(d)]) for j in range(d)]
    mons = polys.monomials(d, k)
    images: dict[Monomial, Poly] = {}
    for m in mons:
        p: Poly = {(): Fraction(1)}
        for i in m:
            p = polys.pmul(p, cols[i])
        images[m] = p
    return mons, images


def in_ideal(model: VerbitskyModel, p: Poly) -> bool:
    """Whether a homogeneous polynomial maps to zero in the quotient."""
    if not p:
        return True
    k = len(next(iter(p)))
    if k > model.top:
        return True
    return not any(model.reduce(k, p))


# ---------- Fujiki relations ----------


@dataclass
class FujikiReport:
    C_n: Fraction | None
    top_power: bool
    one_polarized: bool
    orthogonal_pair: bool
    mismatch: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.top_power and self.one_polarized and self.orthogonal_pair

    def to_json(self) -> dict:
        return {
            "C_n": None if self.C_n is None else el.format_rational(self.C_n),
            "top_power": self.top_power,
            "one_polarized": self.one_polarized,
            "orthogonal_pair": self.orthogonal_pair,
            "mismatch": self.mismatch,
        }


def _top_form_poly(model: VerbitskyModel, a_deg: int, b_deg: int) -> Poly:
    """``∫[a^{a_deg} b^{b_deg}]`` as a polynomial in the coordinates of a and b.

    Variables ``0..d-1`` are the coordinates of ``a``, ``d..2d-1`` those of b.
    Coefficients are the polarised top form times multinomial weights.
    """
    d = model.d
    out: Poly = {}
    for ma in polys.monomials(d, a_deg):
        wa = polys.multinomial(ma)
        for mb in polys.monomials(d, b_deg):
            val = integrate_monomial(model, polys.mono_mul(ma, mb))
            if val:
                key = ma + tuple(d + j for j in mb)
                out[key] = wa * polys.multinomial(mb) * val
    return out


def _compare(lhs: Poly, rhs: Poly, d: int) -> dict | None:
    for m in sorted(set(lhs) | set(rhs)):
        if lhs.get(m, 0) != rhs.get(m, 0):
            a = [i for i in m if i < d]
            b = [i - d for i in m if i >= d]
            w = polys.multinomial(tuple(a)) * polys.multinomial(tuple(b))
            return {
                "a_multiset": a,
                "b_multiset": b,
                "lhs": el.format_rational(Fraction(lhs.get(m, 0)) / w),
                "rhs": el.format_rational(Fraction(rhs.get(m, 0)) / w),
            }
    return None


def _ratio(lhs: Poly, ref: Poly) -> Fraction:
    for m in sorted(ref):
        if ref[m]:
            return Fraction(lhs.get(m, 0)) / ref[m]
    raise ModelError("reference polynomial vanishes")


def fujiki_constant_closed_form(d: int, n: int) -> Fraction:
    """``C = (2n-1)!! / prod_{k=1..n} (d + 2k - 2)`` under ``∫[qbar^n] = 1``.

    Comes from applying ``Δ^n`` to both sides: ``Δ^n (a.x)^{2n} = (2n)! q(a)^n``
    and ``Δ qbar^k = 2k (d + 2k - 2) qbar^{k-1}``. Independent of the quotient.
    """
    num = Fraction(1)
    for k in range(1, n + 1):
        num *= Fraction(2 * k - 1, d + 2 * k - 2)
    return num


def fujiki_verify(model: VerbitskyModel) -> FujikiReport:
    """Check the Fujiki relation and its two consequences as polynomial identities.

    * ``∫[a^{2n}] = C q(a)^n``
    * ``∫[a^{2n-1} b] = C q(a)^{n-1} q(a, b)``
    * ``(2n-1) ∫[a^{2n-2} b^2] = C q(a)^{n-1} q(b)`` whenever ``q(a, b) = 0``;
      checked by substituting ``b -> q(a) b - q(a, b) a``, which is orthogonal
      to ``a`` for every ``(a, b)``, and comparing all coefficients.
    """
    n, d, g = model.n, model.d, model.space.gram
    qa = polys.quadratic(g)
    qb = polys.quadratic(g, d, d)
    bab = polys.quadratic(g, 0, d)
    qa_n = polys.ppow(qa, n)

    top = _top_form_poly(model, 2 * n, 0)
    c = _ratio(top, qa_n)
    mismatch = {}

    bad = _compare(top, polys.pscale(c, qa_n), d)
    if bad:
        mismatch["top_power"] = bad

    lhs23 = _top_form_poly(model, 2 * n - 1, 1)
    rhs23 = polys.pscale(c, polys.pmul(polys.ppow(qa, n - 1), bab))
    bad = _compare(lhs23, rhs23, d)
    if bad:
        mismatch["one_polarized"] = bad

    x = _top_form_poly(model, 2 * n - 2, 2)
    lhs24 = polys.pscale(2 * n - 1, polys.padd(
        polys.pmul(polys.ppow(qa, 2), x),
        polys.pscale(-2, polys.pmul(polys.pmul(qa, bab), lhs23)),
        polys.pmul(polys.ppow(bab, 2), top),
    ))
    q_sub = polys.padd(polys.pmul(polys.ppow(qa, 2), qb),
                       polys.pscale(-1, polys.pmul(qa, polys.ppow(bab, 2))))
    rhs24 = polys.pscale(c, polys.pmul(polys.ppow(qa, n - 1), q_sub))
    bad = _compare(lhs24, rhs24, d)
    if bad:
        mismatch["orthogonal_pair"] = bad

    return FujikiReport(c, "top_power" not in mismatch, "one_polarized" not in mismatch,
                        "orthogonal_pair" not in mismatch, mismatch)


@dataclass
class ToddLevel:
    k: int
    C_k: Fraction | None
    identity: bool
    nonzero: bool

    @property
    def passed(self) -> bool:
        return self.identity and self.nonzero


@dataclass
class ToddFujikiReport:
    levels: list[ToddLevel]
    positive: bool

    def to_json(self) -> dict:
        return {
            "levels": [{"k": lv.k,
                        "C_k": None if lv.C_k is None else el.format_rational(lv.C_k),
                        "identity": lv.identity, "nonzero": lv.nonzero, "pass": lv.passed}
                       for lv in self.levels],
            "positive": self.positive,
        }


def todd_fujiki_verify(model: VerbitskyModel, t: AlgebraElement) -> ToddFujikiReport:
    """Check ``∫[a^{2k} t] = C_k q(a)^k`` for k = 0..n with an even class t.

    ``t`` must have unit degree-zero part and vanish in odd degrees of the
    model (it lives in ``H^{4*}``).
    """
    n, d = model.n, model.d
    if t.parts[0] != (Fraction(1),):
        raise ValueError("the class must have degree-zero component 1")
    if any(any(t.parts[k]) for k in range(1, model.top + 1, 2)):
        raise ValueError("the class must be concentrated in degrees divisible by 4")
    qa = polys.quadratic(model.space.gram)
    levels = []
    for k in range(n + 1):
        tk = t.parts[model.top - 2 * k]
        lhs: Poly = {}
        for m in polys.monomials(d, 2 * k):
            val = model.multiply(2 * k, model.reduce_monomial(m), model.top - 2 * k, tk)
            val = val[0] * model.top_scale
            if val:
                lhs[m] = polys.multinomial(m) * val
        ref = polys.ppow(qa, k)
        ck = _ratio(lhs, ref)
        ok = _compare(lhs, polys.pscale(ck, ref), d) is None
        levels.append(ToddLevel(k, ck if ok else None, ok, ok and ck != 0))
    c0 = levels[0].C_k
    return ToddFujikiReport(levels, c0 is not None and c0 > 0)
