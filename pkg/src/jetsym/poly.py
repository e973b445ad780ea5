"""Sparse multivariate polynomial arithmetic over exact rationals.

A polynomial is a dict mapping monomials to nonzero Fraction (or int)
coefficients.  A monomial is a tuple of (atom, exponent) pairs sorted by
the atom's `skey` attribute; atoms are opaque hashable objects (the
expression layer uses canonical expression nodes).  Exponents are
positive rationals, stored as ints when integral, so radicals of atoms
live in the same lattice as ordinary powers.

GCD is a primitive polynomial-remainder sequence, recursing on the atom
set; it is exact and geared to the small, mostly-monomial denominators
this engine produces, not to adversarial inputs.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd
from math import lcm as int_lcm

ONE_MONO = ()
P_ZERO: dict = {}
P_ONE = {ONE_MONO: Fraction(1)}


def nexp(e):
    """Coerce an integral Fraction exponent back to int."""
    if isinstance(e, Fraction) and e.denominator == 1:
        return int(e)
    return e


def mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    merged = dict(m1)
    for a, e in m2:
        ne = merged.get(a, 0) + e
        if ne == 0:
            del merged[a]
        else:
            merged[a] = ne
    return tuple(sorted(((a, nexp(e)) for a, e in merged.items()),
                        key=lambda p: p[0].skey))


def mono_degree(m):
    return sum(e for _, e in m)


def mono_div(m1, m2):
    """m1 / m2, or None if any exponent would go negative."""
    if not m2:
        return m1
    rest = dict(m1)
    for a, e in m2:
        ne = rest.get(a, 0) - e
        if ne < 0:
            return None
        if ne == 0:
            rest.pop(a, None)
        else:
            rest[a] = ne
    return tuple(sorted(((a, nexp(e)) for a, e in rest.items()),
                        key=lambda p: p[0].skey))


def _atom_axis(*polys):
    """All atoms occurring in the given polynomials, sorted by skey."""
    atoms = set()
    for f in polys:
        for m in f:
            for a, _ in m:
                atoms.add(a)
    return sorted(atoms, key=lambda a: a.skey)


def _mono_vec(m, axis_index):
    v = [0] * len(axis_index)
    for a, e in m:
        v[axis_index[a]] = e
    return v


def _order_key(m, axis_index):
    # graded lexicographic over the aligned exponent vectors
    return (mono_degree(m), tuple(_mono_vec(m, axis_index)))


def leading(f, axis_index):
    return max(f, key=lambda m: _order_key(m, axis_index))


def padd(f, g):
    if not f:
        return dict(g)
    out = dict(f)
    for m, c in g.items():
        nc = out.get(m, 0) + c
        if nc == 0:
            out.pop(m, None)
        else:
            out[m] = nc
    return out


def pneg(f):
    return {m: -c for m, c in f.items()}


def psub(f, g):
    return padd(f, pneg(g))


def pmul_term(f, m, c):
    if c == 0:
        return {}
    return {mono_mul(fm, m): fc * c for fm, fc in f.items()}


def pmul(f, g):
    if not f or not g:
        return {}
    if len(g) > len(f):
        f, g = g, f
    out: dict = {}
    for m, c in g.items():
        for fm, fc in f.items():
            key = mono_mul(fm, m)
            nc = out.get(key, 0) + fc * c
            if nc == 0:
                out.pop(key, None)
            else:
                out[key] = nc
    return out


def ppow(f, k):
    if k < 0:
        raise ValueError("negative power on a polynomial")
    out = dict(P_ONE)
    base = f
    while k:
        if k & 1:
            out = pmul(out, base)
        base = pmul(base, base) if k > 1 else base
        k >>= 1
    return out


def pconst(c):
    c = Fraction(c)
    return {} if c == 0 else {ONE_MONO: c}


def patom(a, e=1):
    e = nexp(e)
    if e == 0:
        return dict(P_ONE)
    return {((a, e),): Fraction(1)}


def is_const(f):
    return not f or (len(f) == 1 and ONE_MONO in f)


def const_value(f):
    return Fraction(0) if not f else Fraction(f[ONE_MONO])


def pderiv_atom(f, a):
    """Partial derivative treating all atoms as independent variables."""
    out: dict = {}
    for m, c in f.items():
        for i, (atom, e) in enumerate(m):
            if atom == a:
                rest = m[:i] + ((atom, nexp(e - 1)),) + m[i + 1:]
                if e == 1:
                    rest = m[:i] + m[i + 1:]
                nc = out.get(rest, 0) + c * e
                if nc == 0:
                    out.pop(rest, None)
                else:
                    out[rest] = nc
                break
    return out


def pexactdiv(f, g):
    """Exact quotient f/g, or None when g does not divide f."""
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    if not f:
        return {}
    if is_const(g):
        c = g[ONE_MONO]
        return {m: fc / c for m, fc in f.items()}
    axis = _atom_axis(f, g)
    idx = {a: i for i, a in enumerate(axis)}
    glead = leading(g, idx)
    gc = g[glead]
    q: dict = {}
    r = dict(f)
    while r:
        rlead = leading(r, idx)
        t = mono_div(rlead, glead)
        if t is None:
            return None
        c = r[rlead] / gc
        q[t] = q.get(t, 0) + c
        r = psub(r, pmul_term(g, t, c))
    return q


def pcontent(f):
    """Rational content with the sign of an arbitrary fixed term."""
    if not f:
        return Fraction(0)
    num = 0
    den = 1
    for c in f.values():
        c = Fraction(c)
        num = int_gcd(num, c.numerator)
        den = int_lcm(den, c.denominator)
    c = Fraction(num, den)
    # sign normalization: leading (max key under a cheap stable order)
    lead = max(f, key=lambda m: (mono_degree(m), m and tuple(
        (a.skey, e) for a, e in m)))
    if f[lead] < 0:
        c = -c
    return c


def pprimitive(f):
    c = pcontent(f)
    if c in (0, 1):
        return dict(f)
    return {m: Fraction(v) / c for m, v in f.items()}


def _mono_gcd_all(f, g):
    """Common monomial factor across every term of f and g."""
    mins: dict = {}
    first = True
    for poly in (f, g):
        for m in poly:
            md = dict(m)
            if first:
                mins = dict(md)
                first = False
            else:
                for a in list(mins):
                    e = md.get(a, 0)
                    if e < mins[a]:
                        if e == 0:
                            del mins[a]
                        else:
                            mins[a] = e
            if not mins:
                return ONE_MONO
    return tuple(sorted(((a, nexp(e)) for a, e in mins.items()),
                        key=lambda p: p[0].skey))


def _to_univar(f, v):
    """View f as univariate in atom v with polynomial coefficients."""
    out: dict = {}
    for m, c in f.items():
        deg = 0
        rest = []
        for a, e in m:
            if a == v:
                deg = e
            else:
                rest.append((a, e))
        key = tuple(rest)
        coef = out.setdefault(deg, {})
        nc = coef.get(key, 0) + c
        if nc == 0:
            del coef[key]
        else:
            coef[key] = nc
    return {d: coef for d, coef in out.items() if coef}


def _from_univar(fu, v):
    out: dict = {}
    for d, coef in fu.items():
        vm = patom(v, d) if d else dict(P_ONE)
        for m, c in pmul(coef, vm).items():
            nc = out.get(m, 0) + c
            if nc == 0:
                out.pop(m, None)
            else:
                out[m] = nc
    return out


def _uni_content(fu):
    g: dict = {}
    for coef in fu.values():
        g = pgcd(g, coef)
        if is_const(g) and g:
            break
    return g if g else dict(P_ONE)


def pdivides_try(f, g, step_cap=None):
    """Exact quotient f/g, or None; gives up past a step budget so it is
    safe as a speculative fast path on large inputs."""
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    if not f:
        return {}
    if is_const(g):
        c = g[ONE_MONO]
        return {m: Fraction(fc) / c for m, fc in f.items()}
    if step_cap is None:
        step_cap = 4 * len(f) + 64
    axis = _atom_axis(f, g)
    idx = {a: i for i, a in enumerate(axis)}
    glead = leading(g, idx)
    gc = g[glead]
    q: dict = {}
    r = dict(f)
    steps = 0
    while r:
        steps += 1
        if steps > step_cap:
            return None
        rlead = leading(r, idx)
        t = mono_div(rlead, glead)
        if t is None:
            return None
        c = r[rlead] / gc
        q[t] = q.get(t, 0) + c
        r = psub(r, pmul_term(g, t, c))
    return q


def pmaxnorm(f):
    return max((abs(Fraction(c)) for c in f.values()), default=Fraction(0))


def _integerize(f):
    """Scale to integer coefficients (content removed, positive lead)."""
    c = pcontent(f)
    return {m: int(Fraction(v) / c) for m, v in f.items()}


def _has_fractional_exponents(f):
    for m in f:
        for _, e in m:
            if isinstance(e, Fraction):
                return True
    return False


def _eval_at(f, v, xi):
    """Evaluate an integer-coefficient poly at atom v = xi."""
    out: dict = {}
    for m, c in f.items():
        rest = []
        power = 0
        for a, e in m:
            if a == v:
                power = e
            else:
                rest.append((a, e))
        key = tuple(rest)
        out[key] = out.get(key, 0) + c * xi ** power
    return {m: c for m, c in out.items() if c}


def _heu_interpolate(h, v, xi):
    """Rebuild the xi-adic expansion of h as a polynomial in v."""
    H: dict = {}
    g = dict(h)
    i = 0
    while g:
        if i > 4000:
            return None
        r = {}
        for m, c in g.items():
            rc = ((c + xi // 2) % xi) - xi // 2
            if rc:
                r[m] = rc
        for m, c in r.items():
            mm = mono_mul(m, ((v, i),)) if i else m
            H[mm] = H.get(mm, 0) + c
        ng = {}
        for m, c in g.items():
            val = (c - r.get(m, 0)) // xi
            if val:
                ng[m] = val
        g = ng
        i += 1
    return {m: Fraction(c) for m, c in H.items() if c}


def _int_content(f):
    c = 0
    for v in f.values():
        c = int_gcd(c, abs(int(v)))
        if c == 1:
            return 1
    return c or 1


def _heugcd(f, g, depth=0):
    """Evaluation/reconstruction gcd on integer-coefficient polynomials;
    None when the heuristic gives up (caller falls back to a remainder
    sequence).  Any returned value is verified by exact division.

    The common integer content is split off before the variable recursion
    and multiplied back into the result: evaluated images carry the gcd
    of higher levels inside their contents, so stripping it would lose
    the reconstruction channel."""
    axis = _atom_axis(f, g)
    if not axis:
        return {ONE_MONO: int_gcd(int(f.get(ONE_MONO, 0)),
                                  int(g.get(ONE_MONO, 0)))}
    if depth > 12:
        return None
    common = int_gcd(_int_content(f), _int_content(g))
    if common > 1:
        f = {m: int(c) // common for m, c in f.items()}
        g = {m: int(c) // common for m, c in g.items()}

    # evaluate the atom of smallest degree spread first
    def degspread(v):
        return max(max((dict(m).get(v, 0) for m in p), default=0)
                   for p in (f, g))
    v = min(axis, key=lambda a: (degspread(a), a.skey))
    norm = min(pmaxnorm(f), pmaxnorm(g))
    xi = 2 * int(norm) + 29
    for _ in range(6):
        ff = _eval_at(f, v, xi)
        gg = _eval_at(g, v, xi)
        if ff and gg:
            hh = _heugcd(ff, gg, depth + 1)
            if hh is not None:
                cand = _heu_interpolate(hh, v, xi)
                if cand:
                    cand = {m: int(c) for m, c in pprimitive(cand).items()}
                    cap = 24 * (len(f) + len(g)) + 256
                    if pdivides_try(f, cand, cap) is not None and \
                            pdivides_try(g, cand, cap) is not None:
                        if common > 1:
                            cand = {m: c * common for m, c in cand.items()}
                        return cand
        xi = 2 * xi + 29
    return None


def _prem(fu, gu, lead_g, deg_g):
    """Pseudo-remainder of univariate-in-v polys with poly coefficients."""
    r = dict(fu)
    while r:
        deg_r = max(r)
        if deg_r < deg_g:
            break
        lead_r = r[deg_r]
        # r <- lead_g * r - lead_r * x^(deg_r-deg_g) * g
        nr: dict = {}
        for d, coef in r.items():
            nr[d] = pmul(coef, lead_g)
        for d, coef in gu.items():
            shifted = d + deg_r - deg_g
            nr[shifted] = psub(nr.get(shifted, {}), pmul(coef, lead_r))
        r = {d: c for d, c in nr.items() if c}
        if max(r, default=-1) == deg_r:  # leading term must cancel
            r.pop(deg_r)
    return r


def pgcd(f, g):
    """A greatest common divisor of f and g, primitive up to sign."""
    if not f:
        return pprimitive(g) if g else {}
    if not g:
        return pprimitive(f)
    if is_const(f) or is_const(g):
        return dict(P_ONE)
    if len(f) == 1 or len(g) == 1:
        cm = _mono_gcd_all(f, g)
        return {cm: Fraction(1)}
    # quick common-monomial extraction keeps the recursion shallow
    cm = _mono_gcd_all(f, g)
    if cm != ONE_MONO:
        f = {mono_div(m, cm): c for m, c in f.items()}
        g = {mono_div(m, cm): c for m, c in g.items()}
        inner = pgcd(f, g)
        return pmul_term(inner, cm, Fraction(1))
    # one side dividing the other settles it outright
    if len(g) <= len(f) and pdivides_try(f, g) is not None:
        return pprimitive(g)
    if len(f) <= len(g) and pdivides_try(g, f) is not None:
        return pprimitive(f)
    # evaluation-reconstruction heuristic, verified by exact division
    if not (_has_fractional_exponents(f) or _has_fractional_exponents(g)):
        got = _heugcd(_integerize(f), _integerize(g))
        if got is not None:
            return got
    axis = _atom_axis(f, g)
    if not axis:
        return dict(P_ONE)
    v = axis[0]
    fu = _to_univar(f, v)
    gu = _to_univar(g, v)
    if max(fu) == 0 or max(gu) == 0:
        # one side free of v: gcd lives in the v-content of the other
        side = f if max(fu) == 0 else g
        other = gu if max(fu) == 0 else fu
        return pgcd(side, _uni_content(other))
    cf = _uni_content(fu)
    cg = _uni_content(gu)
    gamma = pgcd(cf, cg)
    fp = {d: pexactdiv(c, cf) for d, c in fu.items()}
    gp = {d: pexactdiv(c, cg) for d, c in gu.items()}
    while gp:
        deg_g = max(gp)
        r = _prem(fp, gp, gp[deg_g], deg_g)
        fp = gp
        if not r:
            gp = {}
            break
        if max(r) == 0:
            # nonzero remainder of degree 0: gcd in v is trivial
            fp = {0: dict(P_ONE)}
            gp = {}
            break
        rc = _uni_content(r)
        gp = {d: pexactdiv(c, rc) for d, c in r.items()}
    result = _from_univar(fp, v)
    result = pprimitive(result)
    return pmul(gamma, result) if not is_const(gamma) or \
        const_value(gamma) != 1 else result
