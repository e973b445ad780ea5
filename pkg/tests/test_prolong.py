import random

import hypothesis.strategies as st
import pytest
from hypothesis import given

from helpers import (assert_equal, assert_field_zero, assert_fields_equal,
                     assert_zero, base_symbols, rand_field, rand_poly)
from jetsym import expr as ex
from jetsym.jet import JetSpace, total_derivative
from jetsym.matrix import MatrixExpr
from jetsym.prolong import (MaurerCartanError, TwistSpec, apply_gauge_set,
                            apply_gauge_vertical, bracket_defect,
                            lambda_prolong, mu_prolong, prolong_combination,
                            sigma_prolong, standard_prolong)
from jetsym.vfield import VectorField, commutator


@pytest.fixture
def sp1():
    return JetSpace(["x"], ["u"], 2)


@pytest.fixture
def sp2():
    return JetSpace(["x"], ["u", "v"], 2)


def F(sp, xi, phi):
    return VectorField(sp, tuple(sp.parse(e) for e in xi),
                       tuple(sp.parse(e) for e in phi))


def M(sp, rows):
    return MatrixExpr(tuple(tuple(sp.parse(e) for e in row) for row in rows))


# ---------------------------------------------------------------------------
# standard prolongation
# ---------------------------------------------------------------------------

def test_standard_prolong_scaling_field(sp2):
    W = F(sp2, ["0"], ["u", "1"])
    P = standard_prolong(W, 2)
    assert_equal(P.coefficient(0, (1,)), sp2.parse("u_x"))
    assert_equal(P.coefficient(0, (2,)), sp2.parse("u_xx"))
    assert_zero(P.coefficient(1, (1,)))
    assert_zero(P.coefficient(1, (2,)))


def test_standard_prolong_trivial(sp1):
    P = standard_prolong(F(sp1, ["0"], ["1"]), 3)
    for k in (1, 2, 3):
        assert_zero(P.coefficient(0, (k,)))


def test_standard_prolong_rotation(sp2):
    W2 = F(sp2, ["0"], ["v", "-u"])
    P = standard_prolong(W2, 2)
    assert_equal(P.coefficient(0, (1,)), sp2.parse("v_x"))
    assert_equal(P.coefficient(1, (1,)), sp2.parse("-u_x"))
    assert_equal(P.coefficient(0, (2,)), sp2.parse("v_xx"))
    assert_equal(P.coefficient(1, (2,)), sp2.parse("-u_xx"))


def test_standard_prolong_order_bound(sp1):
    # coefficients of a point field depend on jets of order <= |J|
    from jetsym.vfield import jet_order
    X = F(sp1, ["x + u"], ["u^2"])
    P = standard_prolong(X, 3)
    for (a, J), e in P.psi.items():
        assert jet_order(e, sp1) <= J.order


def test_recursion_residual(sp1):
    # psi_{J,i} - (D_i psi_J - u_{J,k} D_i xi^k) vanishes identically
    X = F(sp1, ["x*u"], ["u^2 + x"])
    P = standard_prolong(X, 3)
    dxi = total_derivative(X.xi[0], 0, sp1)
    for k in range(3):
        lhs = P.coefficient(0, (k + 1,))
        rhs = total_derivative(P.coefficient(0, (k,)), 0, sp1) - \
            ex.sym(sp1.jet(0, (k + 1,))) * dxi
        assert_zero(lhs - rhs)


# ---------------------------------------------------------------------------
# mu prolongation
# ---------------------------------------------------------------------------

def test_mu_prolong_display(sp2):
    lam = M(sp2, [["0", "u_x"], ["0", "0"]])
    Y = mu_prolong(F(sp2, ["0"], ["0", "1"]), 2, [lam])
    assert_equal(Y.coefficient(0, (1,)), sp2.parse("u_x"))
    assert_equal(Y.coefficient(0, (2,)), sp2.parse("u_xx"))
    assert_zero(Y.coefficient(1, (1,)))
    assert_zero(Y.coefficient(1, (2,)))
    assert Y.provenance == "mu"


def test_mu_zero_matrix_degenerates(sp2):
    zero = MatrixExpr.zero(2)
    X = F(sp2, ["x"], ["u*v", "x + u"])
    got = mu_prolong(X, 2, [zero])
    want = standard_prolong(X, 2)
    # structurally identical coefficients, not merely equivalent
    assert set(got.psi) == set(want.psi)
    for key in got.psi:
        assert ex.normalize(got.psi[key]) == ex.normalize(want.psi[key])


def test_mu_maurer_cartan_enforcement():
    sp = JetSpace(["x", "y"], ["u"], 2)
    lx = MatrixExpr(((sp.parse("u"),),))
    ly = MatrixExpr(((sp.parse("0"),),))
    X = VectorField(sp, (ex.ZERO, ex.ZERO), (ex.ONE,))
    with pytest.raises(MaurerCartanError):
        mu_prolong(X, 2, [lx, ly])
    # the same call passes with enforcement off
    mu_prolong(X, 2, [lx, ly], enforce_mc=False)


def test_mu_dimension_mismatch(sp2):
    with pytest.raises(ValueError):
        mu_prolong(F(sp2, ["0"], ["0", "1"]), 2, [MatrixExpr.identity(3)])
    with pytest.raises(ValueError):
        mu_prolong(F(sp2, ["0"], ["0", "1"]), 2, [])


# ---------------------------------------------------------------------------
# lambda prolongation
# ---------------------------------------------------------------------------

def test_lambda_prolong_display(sp1):
    lam = sp1.parse("(x + x^2)*exp(u)")
    Y = lambda_prolong(F(sp1, ["0"], ["1"]), 2, lam)
    assert_equal(Y.coefficient(0, (1,)), lam)
    assert_equal(
        Y.coefficient(0, (2,)),
        sp1.parse("(exp(u)*(x^2 + x)^2 + 2*x + x*u_x*(x + 1) + 1)*exp(u)"))
    assert Y.provenance == "lambda"


def test_lambda_zero_is_standard(sp1):
    X = F(sp1, ["x"], ["u^2"])
    assert_fields_equal(lambda_prolong(X, 2, ex.ZERO),
                        standard_prolong(X, 2))


def test_lambda_first_order_step(sp1):
    lam = sp1.parse("x^2 + 1")
    Y = lambda_prolong(F(sp1, ["0"], ["1"]), 1, lam)
    assert_equal(Y.coefficient(0, (1,)), lam)


@given(st.integers(0, 10 ** 6))
def test_lambda_equals_mu_with_scalar_matrix(seed):
    rng = random.Random(seed)
    sp = JetSpace(["x"], ["u", "v"], 2)
    lam = rand_poly(rng, base_symbols(sp) + [sp.resolve("u_x")], 1, 2)
    X = rand_field(rng, sp, degree=1, terms=2)
    lams = [MatrixExpr.identity(2).scale(lam)]
    assert_fields_equal(lambda_prolong(X, 2, lam),
                        mu_prolong(X, 2, lams, enforce_mc=False))


# ---------------------------------------------------------------------------
# sigma prolongation
# ---------------------------------------------------------------------------

def test_sigma_prolong_displays(sp2):
    X1 = F(sp2, ["0"], ["u", "v"])
    X2 = F(sp2, ["0"], ["v", "-u"])
    sig = M(sp2, [["0", "u_x"], ["0", "0"]])
    Y1, Y2 = sigma_prolong([X1, X2], 2, sig)
    assert_equal(Y1.coefficient(0, (1,)), sp2.parse("u_x*(1 + v)"))
    assert_equal(Y1.coefficient(1, (1,)), sp2.parse("v_x - u*u_x"))
    assert_equal(Y1.coefficient(0, (2,)),
                 sp2.parse("u_xx*(1 + v) + 2*u_x*v_x"))
    assert_equal(Y1.coefficient(1, (2,)),
                 sp2.parse("v_xx - u*u_xx - 2*u_x^2"))
    assert_equal(Y2.coefficient(0, (1,)), sp2.parse("v_x"))
    assert_equal(Y2.coefficient(1, (1,)), sp2.parse("-u_x"))
    assert_equal(Y2.coefficient(0, (2,)), sp2.parse("v_xx"))
    assert_equal(Y2.coefficient(1, (2,)), sp2.parse("-u_xx"))


def test_sigma_zero_is_componentwise_standard(sp2):
    X1 = F(sp2, ["x"], ["u", "v^2"])
    X2 = F(sp2, ["1"], ["v", "u*x"])
    got = sigma_prolong([X1, X2], 2, MatrixExpr.zero(2))
    assert_fields_equal(got[0], standard_prolong(X1, 2))
    assert_fields_equal(got[1], standard_prolong(X2, 2))


@given(st.integers(0, 10 ** 6))
def test_sigma_single_field_is_lambda(seed):
    rng = random.Random(seed)
    sp = JetSpace(["x"], ["u"], 2)
    lam = rand_poly(rng, base_symbols(sp) + [sp.resolve("u_x")], 1, 2)
    X = rand_field(rng, sp, degree=1, terms=2)
    got = sigma_prolong([X], 2, MatrixExpr(((lam,),)))
    assert_fields_equal(got[0], lambda_prolong(X, 2, lam))


@given(st.integers(0, 10 ** 6))
def test_sigma_first_order_matches_proof_formula(seed):
    rng = random.Random(seed)
    sp = JetSpace(["x"], ["u", "v"], 2)
    symbols = base_symbols(sp)
    fields = [rand_field(rng, sp, 1, 2) for _ in range(2)]
    sig = MatrixExpr(tuple(
        tuple(rand_poly(rng, symbols + [sp.resolve("u_x")], 1, 1)
              for _ in range(2)) for _ in range(2)))
    got = sigma_prolong(fields, 1, sig)
    ux = {a: ex.sym(sp.jet(a, (1,))) for a in range(2)}
    for al in range(2):
        X = fields[al]
        for a in range(2):
            expect = total_derivative(X.phi[a], 0, sp) - \
                ux[a] * total_derivative(X.xi[0], 0, sp)
            for be in range(2):
                expect = expect + sig[al, be] * \
                    (fields[be].phi[a] - ux[a] * fields[be].xi[0])
            assert_zero(got[al].coefficient(a, (1,)) - expect)


def test_sigma_requires_one_independent():
    sp = JetSpace(["x", "y"], ["u"], 1)
    X = VectorField(sp, (ex.ZERO, ex.ZERO), (ex.ONE,))
    with pytest.raises(ValueError):
        sigma_prolong([X], 1, MatrixExpr.identity(1))


def test_sigma_dimension_mismatch(sp2):
    X1 = F(sp2, ["0"], ["u", "v"])
    with pytest.raises(ValueError):
        sigma_prolong([X1], 1, MatrixExpr.identity(2))


# ---------------------------------------------------------------------------
# gauges
# ---------------------------------------------------------------------------

def test_apply_gauge_vertical_examples(sp2):
    A = M(sp2, [["1", "u"], ["0", "1"]])
    X = F(sp2, ["0"], ["0", "1"])
    W = apply_gauge_vertical(A, X)
    assert_equal(W.phi[0], sp2.parse("u"))
    assert_equal(W.phi[1], sp2.parse("1"))
    # identity leaves fields alone
    I2 = MatrixExpr.identity(2)
    W2 = apply_gauge_vertical(I2, X)
    assert_zero(W2.phi[0] - X.phi[0])
    # on the twisted prolongation of example 2 it lands on the display
    lam = M(sp2, [["0", "u_x"], ["0", "0"]])
    Y = mu_prolong(X, 2, [lam])
    Z = apply_gauge_vertical(A, Y)
    assert_equal(Z.coefficient(0, (0,)), sp2.parse("u"))
    assert_equal(Z.coefficient(1, (0,)), sp2.parse("1"))
    assert_equal(Z.coefficient(0, (1,)), sp2.parse("u_x"))
    assert_equal(Z.coefficient(0, (2,)), sp2.parse("u_xx"))


def test_apply_gauge_set_examples(sp2):
    A = M(sp2, [["1", "u"], ["0", "1"]])
    X1 = F(sp2, ["0"], ["u", "v"])
    X2 = F(sp2, ["0"], ["v", "-u"])
    W1, W2 = apply_gauge_set(A, [X1, X2])
    assert_equal(W1.phi[0], sp2.parse("u*(1 + v)"))
    assert_equal(W1.phi[1], sp2.parse("v - u^2"))
    assert_zero(W2.phi[0] - X2.phi[0])
    got = apply_gauge_set(MatrixExpr.identity(2), [X1, X2])
    assert_zero(got[0].phi[0] - X1.phi[0])


# ---------------------------------------------------------------------------
# combinations and bracket defects
# ---------------------------------------------------------------------------

def test_combination_constant_coefficient_has_zero_defect(sp1):
    X = F(sp1, ["x"], ["u^2"])
    Zn, defect, _ = prolong_combination([sp1.parse("2")], [X], 2)
    assert_field_zero(defect)
    assert_fields_equal(Zn, standard_prolong(X, 2).scaled(2))


def test_combination_remark1_first_order(sp1):
    X = F(sp1, ["x"], ["u^2"])
    f = sp1.parse("x + u")
    Zn, defect, prolongs = prolong_combination([f], [X], 1)
    Q = X.characteristic()[0]
    dxf = total_derivative(f, 0, sp1)
    assert_zero(defect.coefficient(0, (1,)) - Q * dxf)
    assert_field_zero(Zn.minus(prolongs[0].scaled(f)).minus(defect))


def test_combination_defect_values(sp1):
    # f = u, X = d/dx: defect levels -u_x^2 and -3 u_x u_xx
    X = F(sp1, ["1"], ["0"])
    Zn, defect, _ = prolong_combination([sp1.parse("u")], [X], 2)
    assert_zero(defect.coefficient(0, (1,)) - sp1.parse("-u_x^2"))
    assert_zero(defect.coefficient(0, (2,)) - sp1.parse("-3*u_x*u_xx"))


@given(st.integers(0, 10 ** 6))
def test_combination_identity_random(seed):
    rng = random.Random(seed)
    sp = JetSpace(["x"], ["u"], 2)
    symbols = base_symbols(sp)
    fields = [rand_field(rng, sp, 1, 2) for _ in range(2)]
    coeffs = [rand_poly(rng, symbols, 1, 2) for _ in range(2)]
    n = rng.choice([1, 2])
    Zn, defect, prolongs = prolong_combination(coeffs, fields, n)
    mix = prolongs[0].scaled(coeffs[0]).plus(prolongs[1].scaled(coeffs[1]))
    assert_field_zero(Zn.minus(mix).minus(defect))


def test_bracket_defect_lie_algebra_has_zero_gamma(sp2):
    X1 = F(sp2, ["0"], ["u", "v"])
    X2 = F(sp2, ["0"], ["v", "-u"])
    out = bracket_defect([X1, X2], 2)
    assert_field_zero(out[(0, 1)].gamma_direct)
    assert_field_zero(out[(0, 1)].gamma_recursion)


def test_bracket_defect_exponential_pair(sp1):
    dx = F(sp1, ["1"], ["0"])
    edx = F(sp1, ["exp(x)"], ["0"])
    out = bracket_defect([dx, edx], 1)
    item = out[(0, 1)]
    assert_equal(item.F[0], sp1.parse("exp(x)"))
    assert_zero(item.F[1])
    assert_zero(item.gamma_direct.coefficient(0, (1,)) -
                sp1.parse("-u_x*exp(x)"))
    assert_fields_equal(item.gamma_direct, item.gamma_recursion)


def test_bracket_defect_single_field_empty(sp1):
    assert bracket_defect([F(sp1, ["1"], ["0"])], 2) == {}


# ---------------------------------------------------------------------------
# structural properties
# ---------------------------------------------------------------------------

@given(st.integers(0, 10 ** 6))
def test_prolongation_bracket_identity(seed):
    rng = random.Random(seed)
    sp = JetSpace(["x"], ["u"], 3)
    X = rand_field(rng, sp, degree=2, terms=2)
    Y = rand_field(rng, sp, degree=2, terms=2)
    n = rng.choice([1, 2, 3])
    lhs = commutator(standard_prolong(X, n), standard_prolong(Y, n))
    rhs = standard_prolong(commutator(X, Y), n)
    assert_field_zero(lhs.minus(rhs))


@given(st.integers(0, 10 ** 6))
def test_constant_linearity(seed):
    rng = random.Random(seed)
    sp = JetSpace(["x"], ["u"], 2)
    X = rand_field(rng, sp, degree=2, terms=2)
    c = ex.num(rng.randint(-5, 5), rng.randint(1, 4))
    lhs = standard_prolong(X.scaled(c), 2)
    rhs = standard_prolong(X, 2).scaled(c)
    assert_field_zero(lhs.minus(rhs))


def test_twist_spec_validation(sp2):
    TwistSpec("lambda", lam=sp2.parse("u_x")).validate(sp2)
    with pytest.raises(ValueError):
        TwistSpec("lambda", lam=sp2.parse("u_xx")).validate(sp2)
    spec = TwistSpec("sigma", sigma=M(sp2, [["0", "u_xx"], ["0", "0"]]))
    spec.validate(sp2)
    assert spec.warnings  # jet order above 1 is accepted but flagged
    pde = JetSpace(["x", "y"], ["u"], 1)
    with pytest.raises(ValueError):
        TwistSpec("sigma", sigma=MatrixExpr.identity(1)).validate(pde)
    with pytest.raises(ValueError):
        TwistSpec("chi").validate(sp2)
