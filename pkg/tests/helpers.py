"""Shared generators for randomized suites: seeded, reproducible."""

from __future__ import annotations

from fractions import Fraction

from jetsym import expr as ex
from jetsym.matrix import MatrixExpr
from jetsym.vfield import VectorField


def assert_zero(e, msg=""):
    v = ex.is_zero(e)
    assert v == ex.PROVEN_ZERO, f"{msg} residual {ex.render(e)} is {v}"


def assert_equal(a, b, msg=""):
    assert ex.canonically_equal(a, b), \
        f"{msg} {ex.render(a)} != {ex.render(b)}"


def assert_field_zero(P, msg=""):
    for label, e in P.coefficients_with_labels():
        assert_zero(e, f"{msg} {label}")


def assert_fields_equal(P, Q, msg=""):
    assert_field_zero(P.minus(Q), msg)


def rand_poly(rng, symbols, degree=2, terms=3, coeff=3):
    """Random polynomial with small integer coefficients; never zero."""
    total = ex.ZERO
    for _ in range(rng.randint(1, terms)):
        c = rng.randint(-coeff, coeff)
        if c == 0:
            c = 1
        t = ex.num(c)
        for _ in range(rng.randint(0, degree)):
            t = t * ex.sym(rng.choice(symbols))
        total = total + t
    if ex.is_zero(total) == ex.PROVEN_ZERO:
        total = total + 1
    return ex.normalize(total)


def rand_expr(rng, symbols, depth=3):
    """Random expression over the full node vocabulary."""
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5 and symbols:
            return ex.sym(rng.choice(symbols))
        return ex.num(rng.randint(-4, 4), rng.randint(1, 3))
    kind = rng.choice(["add", "mul", "pow", "exp", "sin", "cos", "ln"])
    if kind == "add":
        return rand_expr(rng, symbols, depth - 1) + \
            rand_expr(rng, symbols, depth - 1)
    if kind == "mul":
        return rand_expr(rng, symbols, depth - 1) * \
            rand_expr(rng, symbols, depth - 1)
    if kind == "pow":
        return ex.power(rand_expr(rng, symbols, depth - 1),
                        rng.choice([2, 3, -1, Fraction(1, 2)]))
    arg = rand_expr(rng, symbols, depth - 1)
    if kind == "exp":
        return ex.exp(arg)
    if kind == "sin":
        return ex.sin(arg)
    if kind == "cos":
        return ex.cos(arg)
    return ex.ln(arg)


def base_symbols(space):
    from jetsym.jet import MultiIndex
    out = list(space.x_symbols())
    for a in range(space.p):
        out.append(space.jet(a, MultiIndex.zero(space.q)))
    return out


def rand_field(rng, space, degree=2, terms=2, vertical=False):
    symbols = base_symbols(space)
    xi = tuple(ex.ZERO if vertical else rand_poly(rng, symbols, degree, terms)
               for _ in range(space.q))
    phi = tuple(rand_poly(rng, symbols, degree, terms)
                for _ in range(space.p))
    return VectorField(space, xi, phi)


def rand_invertible_matrix(rng, space, size, degree=2, unit_det=True):
    """Invertible polynomial matrix; unit determinant by construction when
    unit_det, otherwise certified nonsingular by the zero test."""
    symbols = base_symbols(space)
    if unit_det:
        upper = MatrixExpr(tuple(
            tuple(ex.ONE if i == j else
                  (rand_poly(rng, symbols, degree, 2) if j > i else ex.ZERO)
                  for j in range(size))
            for i in range(size)))
        lower = MatrixExpr(tuple(
            tuple(ex.ONE if i == j else
                  (rand_poly(rng, symbols, 1, 1) if j < i else ex.ZERO)
                  for j in range(size))
            for i in range(size)))
        return lower.mul(upper)
    while True:
        A = MatrixExpr(tuple(
            tuple(rand_poly(rng, symbols, 1, 2) for _ in range(size))
            for _ in range(size)))
        if ex.is_zero(A.det()) == ex.PROVEN_NONZERO:
            return A
