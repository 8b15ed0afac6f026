from __future__ import annotations

import random
from fractions import Fraction

import pytest

from hkmodel import exactlin as el
from hkmodel import hodge
from hkmodel.lefschetz import so_derivation
from hkmodel.quadspace import (NotAnIsometry, QuadraticSpace, random_isometry, reflection,
                               so_basis)
from hkmodel.verbitsky import build_model

K3_4 = QuadraticSpace.diagonal([1, 1, 1, -1])
K3_5 = QuadraticSpace.diagonal([1, 1, 1, -1, -1])
P12 = hodge.HodgePlane.of([1, 0, 0, 0], [0, 1, 0, 0])


def test_weil_derivation_example():
    w = hodge.weil_derivation(K3_4, P12)
    expect = el.zeros(4, 4)
    expect[0][1], expect[1][0] = Fraction(2), Fraction(-2)
    assert w == expect
    assert el.matvec(w, [0, 0, 1, 0]) == [0, 0, 0, 0]
    assert el.matvec(w, [1, 0, 0, 0]) == [0, -2, 0, 0]
    assert hodge.weil_derivation(K3_4, P12.swapped()) == el.scale(-1, w)


def test_weil_structure_on_found_planes():
    for space in (K3_4, K3_5, QuadraticSpace.from_rows([[2, 1, 0], [1, 2, 0], [0, 0, -1]])):
        planes = hodge.find_cm_planes(space)
        assert planes
        for p in planes:
            w = hodge.weil_derivation(space, p)
            assert hodge.weil_structure_ok(space, w)
            assert el.matvec(w, list(p.x)) == [-2 * c for c in p.y]
            assert el.matvec(w, list(p.y)) == [2 * c for c in p.x]


@pytest.mark.parametrize("x,y", [([1, 0, 0, 0], [0, 2, 0, 0]),
                                 ([1, 0, 0, 0], [1, 1, 0, 0]),
                                 ([0, 0, 0, 1], [1, 1, 1, 1])])
def test_degenerate_planes_rejected(x, y):
    with pytest.raises(ValueError):
        hodge.weil_derivation(K3_4, hodge.HodgePlane.of(x, y))


def test_hodge_isometry_examples():
    ident = el.identity(4)
    assert hodge.is_hodge_isometry(K3_4, ident, P12, P12)
    assert hodge.is_hodge_isometry(K3_4, reflection(K3_4, [0, 0, 1, 0]), P12, P12)
    assert not hodge.is_hodge_isometry(K3_4, ident, P12, P12.swapped())
    with pytest.raises(NotAnIsometry):
        hodge.is_hodge_isometry(K3_4, el.diag([2, 1, 1, 1]), P12, P12)


def test_orientation_flip_keeps_verdicts():
    rng = random.Random(8)
    planes = hodge.find_cm_planes(K3_4)
    for _ in range(10):
        phi = random_isometry(K3_4, rng).phi
        p1 = rng.choice(planes)
        p2 = p1.image(phi)
        assert hodge.is_hodge_isometry(K3_4, phi, p1, p2)
        assert hodge.is_hodge_isometry(K3_4, phi, p1.swapped(), p2.swapped())


def test_extend_isometry_examples(models):
    m = models([1, 1, 1], 1)
    psi = hodge.extend_isometry(m, el.identity(3))
    for k in range(m.top + 1):
        assert psi.dense(k) == el.identity(m.dims[k])
    neg = hodge.extend_isometry(m, el.scale(-1, el.identity(3)))
    assert neg.dense(0) == [[1]] and neg.dense(2) == [[1]]
    assert neg.dense(1) == el.scale(-1, el.identity(3))
    rng = random.Random(2)
    for _ in range(5):
        phi = random_isometry(m.space, rng).phi
        psi = hodge.extend_isometry(m, phi)
        assert psi.apply(m.qbar()) == m.qbar()
        assert psi.dense(1) == phi
    with pytest.raises(NotAnIsometry):
        hodge.extend_isometry(m, el.diag([1, 2, 1]))


@pytest.mark.parametrize("entries,n", [([1, 1, 1, -1], 1), ([1, -1, 1], 2), ([1, 1, 1, -1, -1], 2)])
def test_extension_is_multiplicative_and_well_defined(entries, n):
    m = build_model(QuadraticSpace.diagonal(entries), n)
    rng = random.Random(6)
    for _ in range(4):
        phi = random_isometry(m.space, rng).phi
        psi = hodge.extend_isometry(m, phi)
        assert psi.apply(m.unit()) == m.unit()
        for k in range(m.top + 1):
            assert el.rank(psi.dense(k)) == m.dims[k]
        for j in range(1, m.top + 1):
            for k in range(j, m.top + 1 - j):
                for a in range(m.dims[j]):
                    for b in range(m.dims[k]):
                        x = m.homogeneous(j, _unit(m.dims[j], a))
                        y = m.homogeneous(k, _unit(m.dims[k], b))
                        assert psi.apply(x * y) == psi.apply(x) * psi.apply(y)
        assert hodge.coset_consistent(m, phi, rng)


def _unit(n, i):
    v = [Fraction(0)] * n
    v[i] = Fraction(1)
    return v


def test_naturality(models):
    m = models([1, 1, 1, -1], 2)
    rng = random.Random(9)
    for _ in range(5):
        a, b = random_isometry(m.space, rng).phi, random_isometry(m.space, rng).phi
        lhs = hodge.extend_isometry(m, el.matmul(a, b))
        rhs = hodge.extend_isometry(m, a) @ hodge.extend_isometry(m, b)
        assert lhs == rhs


def test_so_derivation_naturality(models):
    m = models([1, 1, 1, -1], 2)
    rng = random.Random(10)
    basis = so_basis(m.space)
    for _ in range(5):
        phi = random_isometry(m.space, rng).phi
        x = el.zeros(4, 4)
        for b in basis:
            x = el.add(x, el.scale(rng.randint(-2, 2), b))
        psi = hodge.extend_isometry(m, phi)
        conj = el.matmul(phi, el.matmul(x, el.inverse(phi)))
        assert so_derivation(m, conj) @ psi == psi @ so_derivation(m, x)


def test_membership_examples():
    assert hodge.certify_membership(K3_4, el.identity(4)).verdict == hodge.J_CERTIFIED
    s = QuadraticSpace.diagonal([2, 8])
    prod = el.matmul(reflection(s, [1, 0]), reflection(s, [0, 1]))
    v = hodge.certify_membership(s, prod)
    assert v.verdict == hodge.J_CERTIFIED and v.spinor_norm == "1"
    assert hodge.certify_membership(K3_4, reflection(K3_4, [1, 0, 0, 0])).verdict == hodge.UNKNOWN
    s3 = QuadraticSpace.diagonal([1, 3])
    prod = el.matmul(reflection(s3, [1, 0]), reflection(s3, [0, 1]))
    assert hodge.certify_membership(s3, prod).verdict == hodge.JPLUS_CERTIFIED
    minus = el.scale(-1, el.identity(2))
    assert hodge.certify_membership(QuadraticSpace.diagonal([1, 1]), minus).verdict == hodge.J_CERTIFIED


def test_transport_examples(models):
    m = models([1, 1, 1, -1], 1)
    rep = hodge.transport_verify(m, el.identity(4), P12, P12)
    assert rep.passed and rep.verdict.verdict == hodge.J_CERTIFIED
    assert rep.to_json()["degrees_checked"] == [0, 1, 2]
    rep = hodge.transport_verify(m, reflection(K3_4, [0, 0, 1, 0]), P12, P12)
    assert rep.passed and rep.verdict.verdict == hodge.UNKNOWN
    phi = el.matmul(reflection(K3_4, [1, 0, 1, 0]), reflection(K3_4, [0, 1, 1, 0]))
    rep = hodge.transport_verify(m, phi, P12, P12.image(phi))
    assert rep.passed and rep.verdict.det == 1
    with pytest.raises(ValueError):
        hodge.transport_verify(m, el.identity(4), P12, P12.swapped())


def test_transport_seeded(models):
    rng = random.Random(12)
    for entries, n in (([1, 1, 1, -1], 1), ([1, 1, 1, -1, -1], 2)):
        m = models(entries, n)
        planes = hodge.find_cm_planes(m.space)
        for _ in range(6):
            w = random_isometry(m.space, rng)
            p1 = rng.choice(planes)
            rep = hodge.transport_verify(m, w.phi, p1, p1.image(w.phi))
            assert rep.passed
            assert rep.verdict.verdict == hodge.certify_membership(m.space, w).verdict


def test_transport_fails_for_wrong_plane_operator(models):
    # the extension of an isometry that is not Hodge does not intertwine the Weil operators
    m = models([1, 1, 1, -1], 1)
    phi = reflection(K3_4, [1, 0, 1, 0])
    psi = hodge.extend_isometry(m, phi)
    w = so_derivation(m, hodge.weil_derivation(K3_4, P12))
    assert not (psi @ w == w @ psi)


def test_plane_json_round_trip():
    p = hodge.HodgePlane.of(["1/2", 0, 0, 0], [0, "1/2", 0, 0])
    assert hodge.HodgePlane.from_json(p.to_json()) == p
