import random

import hypothesis.strategies as st
import pytest
from hypothesis import given

from helpers import assert_equal, assert_zero, rand_field
from jetsym import expr as ex
from jetsym.jet import JetSpace
from jetsym.vfield import (InvolutionError, VectorField, commutator,
                           evolutionary_rep, involution_coefficients,
                           is_evolutionary_rep, is_lie_algebra)


@pytest.fixture
def sp2():
    return JetSpace(["x"], ["u", "v"], 2)


def F(sp, xi, phi):
    return VectorField(sp, tuple(sp.parse(e) for e in xi),
                       tuple(sp.parse(e) for e in phi))


def test_field_classifiers(sp2):
    X = F(sp2, ["-1"], ["u", "v"])
    assert X.is_lie_point() and not X.is_vertical()
    V = F(sp2, ["0"], ["u + u_x", "v + v_x"])
    assert V.is_vertical() and V.coefficient_order == 1


def test_evolutionary_rep_examples(sp2):
    X = F(sp2, ["-1"], ["u", "v"])
    V = evolutionary_rep(X)
    assert_equal(V.phi[0], sp2.parse("u + u_x"))
    assert_equal(V.phi[1], sp2.parse("v + v_x"))
    # a vertical field is its own representative
    W = F(sp2, ["0"], ["u", "v"])
    assert_field_equal_vf(evolutionary_rep(W), W)
    sp1 = JetSpace(["x"], ["u"], 2)
    dx = VectorField(sp1, (ex.ONE,), (ex.ZERO,))
    assert_equal(evolutionary_rep(dx).phi[0], sp1.parse("-u_x"))


def assert_field_equal_vf(A, B):
    for a, b in zip(A.xi + A.phi, B.xi + B.phi):
        assert_zero(a - b)


def test_is_evolutionary_rep_accepts(sp2):
    V = F(sp2, ["0"], ["u + u_x", "v + v_x"])
    ok, X = is_evolutionary_rep(V)
    assert ok
    assert_equal(X.xi[0], sp2.parse("-1"))
    assert_equal(X.phi[0], sp2.parse("u"))
    assert_equal(X.phi[1], sp2.parse("v"))
    # round trip
    assert_field_equal_vf(evolutionary_rep(X), V)


def test_is_evolutionary_rep_rejects_off_diagonal(sp2):
    # dQ^u/dv_x nonzero with nonzero xi is forbidden
    W = F(sp2, ["0"], ["u_x + u*(1 + v + v_x)", "v + v_x"])
    ok, reason = is_evolutionary_rep(W)
    assert not ok
    assert "v_x" in reason and "u" in reason


def test_is_evolutionary_rep_rejects_mismatched_xi(sp2):
    V = F(sp2, ["0"], ["u_x", "2*v_x"])
    ok, reason = is_evolutionary_rep(V)
    assert not ok


def test_commutator_examples():
    sp = JetSpace(["x"], ["u"], 2)
    dx = VectorField(sp, (ex.ONE,), (ex.ZERO,))
    xdx = VectorField(sp, (sp.parse("x"),), (ex.ZERO,))
    Z = commutator(dx, xdx)
    assert_equal(Z.xi[0], ex.ONE)
    assert_zero(Z.phi[0])

    sp2 = JetSpace(["x"], ["u", "v"], 2)
    X1 = F(sp2, ["0"], ["u", "v"])
    X2 = F(sp2, ["0"], ["v", "-u"])
    Z = commutator(X1, X2)
    assert_zero(Z.phi[0])
    assert_zero(Z.phi[1])

    A = F(sp2, ["0"], ["u", "0"])
    B = F(sp2, ["0"], ["v", "0"])
    Z = commutator(A, B)
    assert_equal(Z.phi[0], sp2.parse("-v"))


def test_commutator_antisymmetry_and_self(sp2):
    X = F(sp2, ["x"], ["u*v", "x + v"])
    assert_field_equal_vf(commutator(X, X),
                          F(sp2, ["0"], ["0", "0"]))
    Y = F(sp2, ["u"], ["v", "x"])
    lhs = commutator(X, Y)
    rhs = commutator(Y, X)
    for a, b in zip(lhs.xi + lhs.phi, rhs.xi + rhs.phi):
        assert_zero(a + b)


@given(st.integers(0, 10 ** 6))
def test_jacobi_identity(seed):
    rng = random.Random(seed)
    sp = JetSpace(["x"], ["u"], 3)
    X = rand_field(rng, sp, degree=2, terms=2)
    Y = rand_field(rng, sp, degree=2, terms=2)
    Z = rand_field(rng, sp, degree=2, terms=2)
    total = commutator(commutator(X, Y), Z) \
        .plus(commutator(commutator(Y, Z), X)) \
        .plus(commutator(commutator(Z, X), Y))
    for e in total.xi + total.phi:
        assert_zero(e)


@given(st.integers(0, 10 ** 6))
def test_evolutionary_round_trip(seed):
    rng = random.Random(seed)
    sp = JetSpace(["x"], ["u", "v"], 2)
    X = rand_field(rng, sp, degree=1, terms=2)
    V = evolutionary_rep(X)
    ok, back = is_evolutionary_rep(V)
    assert ok
    assert_field_equal_vf(evolutionary_rep(back), V)


def test_involution_rank_deficient_but_consistent():
    sp = JetSpace(["x"], ["u"], 2)
    dx = VectorField(sp, (ex.ONE,), (ex.ZERO,))
    xdx = VectorField(sp, (sp.parse("x"),), (ex.ZERO,))
    res = involution_coefficients([dx, xdx])
    assert res.rank_deficient
    fs = res.coefficients[(0, 1)]
    assert_equal(fs[0], ex.ONE)
    assert_zero(fs[1])


def test_involution_commuting_set(sp2):
    X1 = F(sp2, ["0"], ["u", "v"])
    X2 = F(sp2, ["0"], ["v", "-u"])
    res = involution_coefficients([X1, X2])
    for f in res.coefficients[(0, 1)]:
        assert_zero(f)


def test_involution_unique_solve(sp2):
    X1 = F(sp2, ["0"], ["1", "0"])
    X2 = F(sp2, ["0"], ["u", "v"])
    res = involution_coefficients([X1, X2])
    fs = res.coefficients[(0, 1)]
    assert_equal(fs[0], ex.ONE)
    assert_zero(fs[1])
    assert not res.rank_deficient
    ok, consts = is_lie_algebra([X1, X2])
    assert ok and consts[(0, 1)][0] == ex.ONE


def test_not_in_involution_raises(sp2):
    # d/dx and d/du + x d/dv: the bracket d/dv leaves the pointwise span
    X1 = F(sp2, ["1"], ["0", "0"])
    X2 = F(sp2, ["0"], ["1", "x"])
    with pytest.raises(InvolutionError):
        involution_coefficients([X1, X2])


def test_is_lie_algebra_examples(sp2):
    X1 = F(sp2, ["0"], ["u", "v"])
    X2 = F(sp2, ["0"], ["v", "-u"])
    ok, consts = is_lie_algebra([X1, X2])
    assert ok
    assert all(c == ex.ZERO for c in consts[(0, 1)])

    sp = JetSpace(["x"], ["u"], 2)
    dx = VectorField(sp, (ex.ONE,), (ex.ZERO,))
    edx = VectorField(sp, (sp.parse("exp(x)"),), (ex.ZERO,))
    ok, witness = is_lie_algebra([dx, edx])
    assert not ok
    assert_equal(witness, sp.parse("exp(x)"))

    ok, consts = is_lie_algebra([dx])
    assert ok and consts == {}


def test_prolonged_apply_and_characteristic(sp2):
    from jetsym.prolong import standard_prolong
    X = F(sp2, ["-1"], ["u", "v"])
    P = standard_prolong(X, 2)
    Q = P.characteristic()
    assert_equal(Q[0], sp2.parse("u + u_x"))
    assert_equal(Q[1], sp2.parse("v + v_x"))
    # P acts as a derivation
    e = sp2.parse("u_x*v")
    got = P.apply(e)
    expect = P.coefficient(0, (1,)) * sp2.parse("v") + \
        sp2.parse("u_x") * P.coefficient(1, (0,))
    assert_zero(got - expect)
