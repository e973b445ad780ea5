import random
from math import comb

import hypothesis.strategies as st
import pytest
from hypothesis import given

from helpers import assert_equal, assert_zero, rand_expr, rand_poly
from jetsym import expr as ex
from jetsym.jet import (JetSpace, MultiIndex, Section, contact_forms,
                        prolong_section, total_derivative)


def test_multiindex_order_and_increment():
    J = MultiIndex((2, 1))
    assert J.order == 3
    assert J.increment(0).entries == (3, 1)
    assert J.increment(0).order == 4
    with pytest.raises(ValueError):
        MultiIndex((-1, 0))


@given(st.lists(st.integers(0, 3), min_size=1, max_size=3),
       st.integers(0, 2), st.integers(0, 2))
def test_multiindex_increment_commutes(entries, i, k):
    J = MultiIndex(tuple(entries))
    q = len(entries)
    i, k = i % q, k % q
    assert J.increment(i).increment(k) == J.increment(k).increment(i)
    assert J.increment(i).order == J.order + 1


def test_coordinate_count():
    for q, p, n in [(1, 1, 2), (2, 1, 2), (1, 2, 3), (2, 2, 2)]:
        sp = JetSpace([f"x{i}" for i in range(q)],
                      [f"u{a}" for a in range(p)], n)
        coords = sp.coordinates()
        assert len(coords) == q + p * comb(n + q, q)
        assert len(coords) == sp.n_coordinates()
        assert len(set(coords)) == len(coords)


def test_name_validation():
    with pytest.raises(ValueError):
        JetSpace(["x"], ["x"], 1)
    with pytest.raises(ValueError):
        JetSpace(["x"], ["u", "u_x"], 1)
    with pytest.raises(ValueError):
        JetSpace(["x"], ["u"], 1, params=["u"])


def test_total_derivative_examples():
    sp = JetSpace(["x"], ["u", "v"], 2)
    assert_equal(total_derivative(sp.parse("u"), 0, sp), sp.parse("u_x"))
    got = total_derivative(sp.parse("(x + x^2)*exp(u)"), 0, sp)
    assert_equal(got, sp.parse("(1 + 2*x)*exp(u) + (x + x^2)*exp(u)*u_x"))
    got = total_derivative(sp.parse("u_x*exp(-v)"), 0, sp)
    assert_equal(got, sp.parse("u_xx*exp(-v) - u_x*v_x*exp(-v)"))


@given(st.integers(0, 10 ** 6))
def test_total_derivatives_commute(seed):
    rng = random.Random(seed)
    sp = JetSpace(["x", "y"], ["u"], 3)
    symbols = [sp.resolve(n) for n in ("x", "y", "u", "u_x", "u_y")]
    e = rand_expr(rng, symbols, depth=2)
    try:
        dxy = total_derivative(total_derivative(e, 0, sp), 1, sp)
        dyx = total_derivative(total_derivative(e, 1, sp), 0, sp)
    except ex.ExprError:
        return
    assert ex.is_zero(dxy - dyx) == ex.PROVEN_ZERO


def test_prolong_section_examples():
    sp = JetSpace(["x"], ["u", "v"], 2, params=["k1", "k2", "c"])
    f = Section(sp, {"u": sp.parse("k1*exp(-x)"), "v": sp.parse("k2*exp(-x)")})
    asg = prolong_section(f, sp)
    assert_equal(asg[sp.resolve("u_x")], sp.parse("-k1*exp(-x)"))
    assert_equal(asg[sp.resolve("u_xx")], sp.parse("k1*exp(-x)"))
    assert_equal(asg[sp.resolve("v_x")], sp.parse("-k2*exp(-x)"))
    assert_equal(asg[sp.resolve("v_xx")], sp.parse("k2*exp(-x)"))

    const = Section(sp, {"u": sp.parse("c"), "v": sp.parse("0")})
    asg = prolong_section(const, sp)
    assert asg[sp.resolve("u_x")] == ex.ZERO
    assert asg[sp.resolve("u_xx")] == ex.ZERO

    sp3 = JetSpace(["x"], ["u"], 3)
    cubic = Section(sp3, {"u": sp3.parse("x^3")})
    asg = prolong_section(cubic, sp3)
    assert_equal(asg[sp3.resolve("u_x")], sp3.parse("3*x^2"))
    assert_equal(asg[sp3.resolve("u_xx")], sp3.parse("6*x"))
    assert_equal(asg[sp3.resolve("u_xxx")], sp3.parse("6"))


def test_section_rejects_jets():
    sp = JetSpace(["x"], ["u"], 2)
    with pytest.raises(ValueError):
        Section(sp, {"u": sp.parse("u_x")})
    with pytest.raises(ValueError):
        Section(sp, {})


def test_contact_forms_shapes():
    sp = JetSpace(["x"], ["u"], 1)
    forms = contact_forms(sp)
    assert len(forms) == 1
    f = forms[0]
    assert f.coefficients[("du", 0, MultiIndex((0,)))] == ex.ONE
    assert_equal(f.coefficients[("dx", 0)], -sp.parse("u_x"))

    sp2 = JetSpace(["x", "y"], ["u"], 1)
    forms = contact_forms(sp2)
    assert len(forms) == 1
    assert_equal(forms[0].coefficients[("dx", 1)], -sp2.parse("u_y"))

    sp3 = JetSpace(["x"], ["u", "v"], 2)
    assert len(contact_forms(sp3)) == 4


@given(st.integers(0, 10 ** 6))
def test_contact_annihilation_di_consistency(seed):
    # the assignment value of u^a_{J,i} is the x^i derivative of the
    # value of u^a_J, for every form on a prolonged section
    rng = random.Random(seed)
    sp = JetSpace(["x", "y"], ["u"], 2)
    xs = [sp.resolve("x"), sp.resolve("y")]
    f = Section(sp, {"u": rand_poly(rng, xs, degree=3, terms=3)})
    asg = prolong_section(f, sp)
    for form in contact_forms(sp):
        val = asg[sp.jet(form.a, form.J)]
        for i in range(sp.q):
            partner = asg[sp.jet(form.a, form.J.increment(i))]
            assert_zero(partner - ex.diff(val, xs[i]))


def test_space_auto_extends_order():
    sp = JetSpace(["x"], ["u"], 1)
    e = sp.parse("u_x")
    d = total_derivative(e, 0, sp)
    assert_equal(d, ex.sym(sp.resolve("u_xx")))
    d3 = total_derivative(d, 0, sp)
    assert_equal(d3, ex.sym(sp.resolve("u_xxx")))
