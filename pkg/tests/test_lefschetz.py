from __future__ import annotations

import random
from fractions import Fraction

import pytest

from hkmodel import exactlin as el
from hkmodel import lefschetz as lf
from hkmodel.quadspace import QuadraticSpace, is_skew, isotropic_vectors, so_basis
from hkmodel.verbitsky import build_model


def test_grading_eigenvalues(models):
    for entries, n in (([1, 1, 1], 1), ([1] * 5, 2)):
        m = models(entries, n)
        theta = lf.grading_operator(m)
        for k in range(m.top + 1):
            assert theta.dense(k) == el.scale(2 * k - 2 * n, el.identity(m.dims[k]))
        assert sum(sum(theta.dense(k)[i][i] for i in range(m.dims[k])) for k in range(m.top + 1)) == 0


def test_lefschetz_operator_examples(models):
    m = models([1, 1, 1], 1)
    e1 = m.vector_class([1, 0, 0])
    lh = lf.lefschetz_operator(m, [1, 0, 0])
    assert lh.apply(m.unit()) == e1
    assert lh.apply(e1) == m.qbar() * Fraction(1, 3)
    top = m.qbar()
    assert lh.apply(top).is_zero()


def test_has_lefschetz(models):
    m = models([1, -1, 1], 2)
    assert lf.has_lefschetz(m, [1, 0, 0])
    assert lf.has_lefschetz(m, [1, 2, 0])
    assert not lf.has_lefschetz(m, [0, 0, 0])
    for a in isotropic_vectors(m.space, 2):
        assert not lf.has_lefschetz(m, a)
    with pytest.raises(lf.NoSl2Completion):
        lf.dual_lefschetz(m, [1, 1, 0])


def test_dual_lefschetz_worked_example(models):
    m = models([1, 1, 1], 1)
    lam = lf.dual_lefschetz(m, [1, 0, 0])
    assert lam.apply(m.vector_class([1, 0, 0])) == m.unit() * 2
    assert lam.apply(m.vector_class([0, 1, 0])).is_zero()
    assert lam.apply(m.vector_class([0, 0, 1])).is_zero()
    assert lam.apply(m.qbar()) == m.vector_class([1, 0, 0]) * 6


def test_dual_lefschetz_scaling(models):
    m = models([1, 1, 2], 2)
    h = [Fraction(1), Fraction(1), Fraction(0)]
    c = Fraction(-3, 2)
    assert lf.dual_lefschetz(m, [c * x for x in h]) == lf.dual_lefschetz(m, h) * (1 / c)


@pytest.mark.parametrize("entries,n", [([1, 1, 1], 1), ([1, 1, -1, -1], 1), ([1] * 5, 1),
                                       ([1, 1, 1], 2), ([1, -1, 2, 1], 2), ([1] * 5, 2)])
def test_sl2_triples_and_uniqueness(entries, n):
    m = build_model(QuadraticSpace.diagonal(entries), n)
    theta = lf.grading_operator(m)
    rng = random.Random(1)
    classes = lf.lefschetz_spanning_set(m)
    classes.append([Fraction(rng.randint(1, 3)) for _ in range(m.d)])
    for h in classes:
        if not lf.has_lefschetz(m, h):
            continue
        lh, lam = lf.lefschetz_operator(m, h), lf.dual_lefschetz(m, h)
        assert lf.bracket(theta, lh) == 2 * lh
        assert lf.bracket(theta, lam) == -2 * lam
        assert lf.bracket(lh, lam) == theta
        alt, nullity = lf.sl2_completion_system(m, h)
        assert nullity == 0 and alt == lam


def test_closure_examples(models):
    m = models([1, 1, 1], 1)
    assert lf.lie_closure(m, [lf.grading_operator(m)]).dim == 1
    basis = lf.lie_closure(m, lf.gtot_generators(m))
    rep = lf.verify_gtot_structure(basis, m)
    assert rep.passed, rep.failures
    assert (rep.dim, rep.grading_dims) == (10, [3, 4, 3])
    assert rep.killing_signature == [4, 6, 0]
    lam1, lam2 = (lf.dual_lefschetz(m, h) for h in ([1, 0, 0], [0, 1, 0]))
    assert lf.bracket(lam1, lam2).is_zero()


@pytest.mark.parametrize("entries,n,dim,grading", [
    ([1, 1, -1, -1], 1, 15, [4, 7, 4]),
    ([1, 1, 1, -1], 1, 15, [4, 7, 4]),
    ([1] * 5, 2, 21, [5, 11, 5]),
    ([2, 3, 5], 2, 10, [3, 4, 3]),
    ([1, 1, 1, -1, -1], 2, 21, [5, 11, 5]),
])
def test_gtot_structure(entries, n, dim, grading):
    m = build_model(QuadraticSpace.diagonal(entries), n)
    classes = lf.lefschetz_spanning_set(m)
    duals = [lf.dual_lefschetz(m, h) for h in classes]
    basis = lf.lie_closure(m, lf.gtot_generators(m, classes))
    rep = lf.verify_gtot_structure(basis, m, duals)
    assert rep.passed, rep.failures
    assert rep.dim == dim and rep.grading_dims == grading


def test_closure_independent_of_generating_set(models):
    m = models([1, 1, -1, 2], 1)
    rng = random.Random(4)
    first = lf.lie_closure(m, lf.gtot_generators(m))
    classes = []
    span = el.EchelonSpan()
    while len(classes) < m.d:
        h = [Fraction(rng.randint(-3, 3)) for _ in range(m.d)]
        if lf.has_lefschetz(m, h) and span.add(el.sparse(h)):
            classes.append(h)
    second = lf.lie_closure(m, lf.gtot_generators(m, classes))
    assert first.dim == second.dim
    assert all(first.contains(x) for x in second.elements)
    assert all(second.contains(x) for x in first.elements)


def test_so_derivations(models):
    m = models([1, -1, 1], 2)
    zero = lf.so_derivation(m, el.zeros(3, 3))
    assert zero.is_zero()
    for x in so_basis(m.space):
        dop = lf.so_derivation(m, x)
        assert dop.apply(m.qbar()).is_zero()
        assert dop.apply(m.qbar() ** 2).is_zero()
        assert lf.derivation_well_defined(m, x)
        assert lf.restriction_to_A1(dop) == x
    with pytest.raises(ValueError):
        lf.so_derivation(m, el.identity(3))


@pytest.mark.parametrize("entries,n", [([1, 1, 1], 1), ([1, 1, -1, 1], 1), ([1] * 5, 1),
                                       ([1, 1, 1], 2), ([1, -1, 1, 1], 2), ([1] * 5, 2)])
def test_leibniz_exhaustive(entries, n):
    m = build_model(QuadraticSpace.diagonal(entries), n)
    rng = random.Random(7)
    basis = so_basis(m.space)
    combo = el.zeros(m.d, m.d)
    for x in basis:
        combo = el.add(combo, el.scale(rng.randint(-2, 2), x))
    assert is_skew(m.space, combo)
    for x in basis[:3] + [combo]:
        assert lf.is_derivation(m, lf.so_derivation(m, x))
    # Lefschetz operators are not derivations (wrong degree) and the grading is not either
    assert not lf.is_derivation(m, lf.lefschetz_operator(m, [1] + [0] * (m.d - 1)))
    assert not lf.is_derivation(m, lf.grading_operator(m))


def test_graded_operator_algebra(models):
    m = models([1, 1, 1], 2)
    a = lf.lefschetz_operator(m, [1, 2, 0])
    b = lf.lefschetz_operator(m, [0, 1, 1])
    assert a + b == lf.lefschetz_operator(m, [1, 3, 1])
    assert (a - a).is_zero()
    # multiplication is commutative so Lefschetz operators commute
    assert lf.bracket(a, b).is_zero()
    with pytest.raises(ValueError):
        a + lf.grading_operator(m)
