from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hkmodel import exactlin as el
from hkmodel import quatmodel as qm


@pytest.fixture(scope="module")
def ops1():
    return qm.exterior_operators(qm.build_quaternion_model(1))


def test_quaternion_relations():
    h = qm.build_quaternion_model(2)
    one = el.identity(8)
    minus = el.scale(-1, one)
    assert el.matmul(h.I, h.I) == el.matmul(h.J, h.J) == el.matmul(h.K, h.K) == minus
    assert el.matmul(h.I, h.J) == h.K
    assert el.matmul(h.J, h.K) == h.I
    assert el.matmul(h.K, h.I) == h.J
    # each complex structure is g-orthogonal, so the Kähler forms are skew
    for name in "IJK":
        w = qm.two_form(h, name)
        assert el.transpose(w) == el.scale(-1, w)


@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4))
def test_imaginary_square(a, b, c):
    h = qm.build_quaternion_model(1)
    x = h.imaginary(a, b, c)
    assert el.matmul(x, x) == el.scale(qm.rho(a, b, c), el.identity(4))


def test_so41_identities(ops1):
    rep = qm.verify_so41(ops1)
    assert all(rep.identities.values()), rep.offending
    assert rep.closure_dim == 10
    assert rep.killing == [4, 6, 0]
    assert rep.passed


def test_theta_sign_convention(ops1):
    # [L, Lam] gives theta; the reversed order gives its negative
    for a in "IJK":
        assert qm.sp_bracket(ops1.L[a], ops1.Lam[a]) == ops1.theta
        rev = qm.sp_bracket(ops1.Lam[a], ops1.L[a])
        assert rev == el.sp_lincomb([(Fraction(-1), ops1.theta)])


def test_weil_square_eigenvalues(ops1):
    for a in "IJK":
        assert qm.weil_square_eigen_check(ops1, a)


def test_weil_operators_are_brackets_of_lefschetz(ops1):
    # W_I, W_J, W_K close into a copy of so(3): [W_I, W_J] = 2 W_K up to sign
    wi, wj, wk = (ops1.W[a] for a in "IJK")
    br = qm.sp_bracket(wi, wj)
    assert br in (el.sp_lincomb([(Fraction(2), wk)]), el.sp_lincomb([(Fraction(-2), wk)]))


def test_dimension_cap():
    with pytest.raises(ValueError, match="exterior dimension cap"):
        qm.exterior_operators(qm.build_quaternion_model(qm.MAX_N + 1))
    with pytest.raises(ValueError):
        qm.build_quaternion_model(0)


def test_n2_closure():
    rep = qm.verify_so41(qm.exterior_operators(qm.build_quaternion_model(2)))
    assert rep.passed
