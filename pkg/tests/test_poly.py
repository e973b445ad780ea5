from fractions import Fraction

import hypothesis.strategies as st
from hypothesis import given

from jetsym import expr as ex
from jetsym.expr import INDEPENDENT, Symbol
from jetsym.poly import (ONE_MONO, padd, pexactdiv, pgcd, pmul, ppow,
                         psub)

X = ex.sym(Symbol("x", INDEPENDENT))
Y = ex.sym(Symbol("y", INDEPENDENT))
Z = ex.sym(Symbol("z", INDEPENDENT))


def atom(a, e=1):
    return {((a, e),): Fraction(1)}


def const(c):
    return {ONE_MONO: Fraction(c)} if c else {}


def poly_x_minus(c):
    return padd(atom(X), const(-c))


def test_mul_and_pow():
    f = padd(atom(X), const(1))          # x + 1
    sq = pmul(f, f)
    assert sq == ppow(f, 2)
    assert sq == {((X, 2),): Fraction(1), ((X, 1),): Fraction(2),
                  ONE_MONO: Fraction(1)}


def test_exactdiv_exact_and_failing():
    f = psub(ppow(atom(X), 2), const(1))     # x^2 - 1
    g = poly_x_minus(1)                      # x - 1
    q = pexactdiv(f, g)
    assert q == padd(atom(X), const(1))
    assert pexactdiv(padd(f, const(1)), g) is None


def test_gcd_univariate():
    f = psub(ppow(atom(X), 2), const(1))
    g = psub(atom(X), const(1))
    got = pgcd(f, g)
    # any associate of x - 1
    assert pexactdiv(got, g) is not None or pexactdiv(g, got) is not None
    assert pexactdiv(f, got) is not None


def test_gcd_multivariate():
    # (x+y)^2 * x and (x+y) * y share exactly (x+y)
    common = padd(atom(X), atom(Y))
    f = pmul(ppow(common, 2), atom(X))
    g = pmul(common, atom(Y))
    got = pgcd(f, g)
    assert pexactdiv(f, got) is not None
    assert pexactdiv(g, got) is not None
    assert pexactdiv(got, common) is not None


def test_gcd_monomial_fast_path():
    f = pmul(atom(X, 2), atom(Y))
    g = pmul(atom(X), padd(atom(Y), const(3)))
    got = pgcd(f, g)
    assert got == atom(X)


small = st.integers(-3, 3)


@st.composite
def polys(draw, atoms=(X, Y, Z)):
    nterms = draw(st.integers(1, 4))
    p = {}
    for _ in range(nterms):
        exps = [draw(st.integers(0, 2)) for _ in atoms]
        mono = tuple(sorted(((a, e) for a, e in zip(atoms, exps) if e),
                            key=lambda t: t[0].skey))
        c = draw(small)
        if c:
            p[mono] = p.get(mono, Fraction(0)) + c
    return {m: c for m, c in p.items() if c}


@given(polys(), polys())
def test_gcd_divides_both(f, g):
    got = pgcd(f, g)
    if not f and not g:
        return
    if f:
        assert pexactdiv(f, got) is not None
    if g:
        assert pexactdiv(g, got) is not None


@given(polys(), polys())
def test_exactdiv_of_product(f, g):
    if not f or not g:
        return
    q = pexactdiv(pmul(f, g), g)
    assert q == f


@given(polys(), polys(), polys())
def test_ring_laws(f, g, h):
    assert pmul(f, padd(g, h)) == padd(pmul(f, g), pmul(f, h))
    assert pmul(f, g) == pmul(g, f)
    assert padd(f, psub({}, f)) == {}
