"""Exact symbolic expression core.

Expressions are immutable trees over exact rational constants, symbols,
sums, products, rational powers and the kernels exp/ln/sin/cos.  Every
expression owns a cached canonical form: a reduced fraction of
multivariate polynomials whose variables ("atoms") are symbols, kernel
subterms and fractional-power bases.  The kernel rewrite rules

    exp(a)*exp(b) -> exp(a+b),  exp(0) -> 1,  ln(1) -> 0,
    sin(0) -> 0,  cos(0) -> 1,  sin(a)^2 + cos(a)^2 -> 1

are folded into the canonical form, so structural equality of canonical
forms implies mathematical equality (never the converse; `is_zero`
falls back to numeric probing when canonicalization is incomplete).
"""

from __future__ import annotations

import math as _math
import random
from fractions import Fraction

from .poly import (ONE_MONO, const_value, is_const, mono_degree, padd,
                   pdivides_try, pexactdiv, pgcd, pmul, pmul_term, ppow,
                   psub)

NUM = "num"
SYM = "sym"
ADD = "add"
MUL = "mul"
POW = "pow"
EXP = "exp"
LN = "ln"
SIN = "sin"
COS = "cos"

KERNEL_KINDS = (EXP, LN, SIN, COS)

INDEPENDENT = "independent"
DEPENDENT_JET = "dependent-jet"
PARAMETER = "parameter"

PROVEN_ZERO = "proven-zero"
PROVEN_NONZERO = "proven-nonzero"
PROBABLY_ZERO = "probably-zero"
UNKNOWN = "unknown"

DEFAULT_PROBE_SEED = 1347
PROBE_POINTS = 5
PROBE_TOL = 1e-9

_KIND_RANK = {NUM: 0, SYM: 1, POW: 2, EXP: 3, LN: 4, SIN: 5, COS: 6,
              MUL: 7, ADD: 8}


class ExprError(Exception):
    pass


class EvalDomainError(ExprError):
    pass


class MissingSymbolsError(ExprError):
    def __init__(self, symbols):
        self.symbols = tuple(symbols)
        names = ", ".join(s.name for s in self.symbols)
        super().__init__(f"assignment does not cover: {names}")


class Symbol:
    """A named coordinate; kind is fixed at creation."""

    __slots__ = ("name", "kind")

    def __init__(self, name, kind):
        if kind not in (INDEPENDENT, DEPENDENT_JET, PARAMETER):
            raise ValueError(f"bad symbol kind {kind!r}")
        self.name = name
        self.kind = kind

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return (isinstance(other, Symbol) and self.name == other.name
                and self.kind == other.kind)

    def __hash__(self):
        return hash((self.name, self.kind))


class Expr:
    __slots__ = ("kind", "args", "data", "_hash", "_norm", "_skey", "_free")

    def __init__(self, kind, args=(), data=None):
        self.kind = kind
        self.args = args
        self.data = data
        self._hash = None
        self._norm = None
        self._skey = None
        self._free = None

    # -- identity ----------------------------------------------------

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return (self.kind == other.kind and self.data == other.data
                and self.args == other.args)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.kind, self.data, self.args))
        return self._hash

    @property
    def skey(self):
        if self._skey is None:
            k = _KIND_RANK[self.kind]
            if self.kind == NUM:
                self._skey = (k, (self.data.numerator, self.data.denominator))
            elif self.kind == SYM:
                self._skey = (k, self.data.kind, self.data.name)
            elif self.kind == POW:
                self._skey = (k, self.args[0].skey,
                              (self.data.numerator, self.data.denominator))
            else:
                self._skey = (k,) + tuple(a.skey for a in self.args)
        return self._skey

    @property
    def free_symbols(self):
        if self._free is None:
            if self.kind == SYM:
                self._free = frozenset((self.data,))
            elif self.kind == NUM:
                self._free = frozenset()
            else:
                acc = frozenset()
                for a in self.args:
                    acc |= a.free_symbols
                self._free = acc
        return self._free

    # -- operators ---------------------------------------------------

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return add(self, mul(num(-1), _coerce(other)))

    def __rsub__(self, other):
        return add(_coerce(other), mul(num(-1), self))

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return mul(self, power(_coerce(other), -1))

    def __rtruediv__(self, other):
        return mul(_coerce(other), power(self, -1))

    def __pow__(self, e):
        return power(self, e)

    def __neg__(self):
        return mul(num(-1), self)

    def __repr__(self):
        try:
            return render(self)
        except ExprError:
            return f"<{self.kind} expr>"


def _coerce(v):
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return num(v)
    raise TypeError(f"cannot use {type(v).__name__} as an expression")


def num(p, q=1):
    return Expr(NUM, data=Fraction(p, q))


ZERO = num(0)
ONE = num(1)


def sym(s):
    if not isinstance(s, Symbol):
        raise TypeError("sym() wants a Symbol")
    return Expr(SYM, data=s)


def add(*es):
    es = tuple(_coerce(e) for e in es)
    flat = []
    for e in es:
        if e.kind == ADD:
            flat.extend(e.args)
        elif e.kind == NUM and e.data == 0:
            continue
        else:
            flat.append(e)
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Expr(ADD, tuple(flat))


def mul(*es):
    es = tuple(_coerce(e) for e in es)
    flat = []
    for e in es:
        if e.kind == MUL:
            flat.extend(e.args)
        elif e.kind == NUM and e.data == 1:
            continue
        else:
            flat.append(e)
    if any(e.kind == NUM and e.data == 0 for e in flat):
        return ZERO
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Expr(MUL, tuple(flat))


def power(base, e):
    base = _coerce(base)
    if isinstance(e, Expr):
        if e.kind != NUM:
            raise ExprError("power exponent must be an exact rational")
        e = e.data
    e = Fraction(e)
    if e == 1:
        return base
    return Expr(POW, (base,), e)


def exp(e):
    return Expr(EXP, (_coerce(e),))


def ln(e):
    return Expr(LN, (_coerce(e),))


def sin(e):
    return Expr(SIN, (_coerce(e),))


def cos(e):
    return Expr(COS, (_coerce(e),))


# ----------------------------------------------------------------------
# canonical form: reduced fraction of fixed polynomials
# ----------------------------------------------------------------------

def _pone():
    return {ONE_MONO: Fraction(1)}


RF_ZERO = ({}, {ONE_MONO: Fraction(1)})


def _kernel_atom(kind, arg):
    """Canonical kernel over a canonical argument, or a constant."""
    if arg.kind == NUM:
        c = arg.data
        if kind == EXP and c == 0:
            return None, Fraction(1)
        if kind == LN and c == 1:
            return None, Fraction(0)
        if kind == SIN and c == 0:
            return None, Fraction(0)
        if kind == COS and c == 0:
            return None, Fraction(1)
    return Expr(kind, (arg,)), None


def _frac_root(c, e):
    """Exact value of c**e for rational c and e, or None."""
    if c == 1:
        return Fraction(1)
    if c == 0:
        if e <= 0:
            raise ExprError("zero raised to a nonpositive fractional power")
        return Fraction(0)
    if e.denominator == 1:
        return c ** e.numerator
    if c < 0:
        return None

    def iroot(n, k):
        if n == 1:
            return 1
        r = round(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand > 0 and cand ** k == n:
                return cand
        return None

    rn = iroot(c.numerator, e.denominator)
    rd = iroot(c.denominator, e.denominator)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd) ** e.numerator


def _term_clean(m):
    exps = 0
    for a, e in m:
        if a.kind == EXP:
            exps += 1
            if exps > 1 or e != 1:
                return False
        elif a.kind == COS:
            if e >= 2:
                return False
        elif a.kind in (SYM, LN, SIN):
            continue
        else:  # composite fractional-power base
            if e >= 1:
                return False
    return True


def _fix_poly(p):
    """Restore per-term invariants after raw polynomial arithmetic."""
    for _ in range(64):
        if all(_term_clean(m) for m in p):
            return p
        out: dict = {}
        for m, c in p.items():
            if _term_clean(m):
                nc = out.get(m, 0) + c
                if nc == 0:
                    out.pop(m, None)
                else:
                    out[m] = nc
                continue
            piece = {ONE_MONO: Fraction(c)}
            exp_args = []
            for a, e in m:
                if a.kind == EXP:
                    exp_args.append((a.args[0], Fraction(e)))
                elif a.kind == COS and e >= 2:
                    k = int(e // 2)
                    arg = a.args[0]
                    sin_atom, _ = _kernel_atom(SIN, arg)
                    pyth = psub(_pone(), {((sin_atom, 2),): Fraction(1)})
                    piece = pmul(piece, ppow(pyth, k))
                    rest = e - 2 * k
                    if rest:
                        piece = pmul(piece, {((a, rest),): Fraction(1)})
                elif a.kind in (SYM, LN, SIN):
                    piece = pmul_term(piece, ((a, e),), Fraction(1))
                else:
                    if e >= 1:
                        t = int(e // 1)
                        bn, bd = _norm(a)
                        if not is_const(bd) or const_value(bd) != 1:
                            raise ExprError(
                                "fractional power base is not denominator-free")
                        piece = pmul(piece, ppow(bn, t))
                        rest = e - t
                        if rest:
                            piece = pmul(
                                piece, {((a, rest),): Fraction(1)})
                    else:
                        piece = pmul_term(piece, ((a, e),), Fraction(1))
            if exp_args:
                total = ZERO
                for arg, e in exp_args:
                    total = total + num(e) * arg
                total = normalize(total)
                atom, const = _kernel_atom(EXP, total)
                if atom is not None:
                    piece = pmul_term(piece, ((atom, 1),), Fraction(1))
            for mm, cc in piece.items():
                nc = out.get(mm, 0) + cc
                if nc == 0:
                    out.pop(mm, None)
                else:
                    out[mm] = nc
        p = out
    raise ExprError("term normalization did not settle")


def _fmul(f, g):
    return _fix_poly(pmul(f, g))


def _fpow(f, k):
    return _fix_poly(ppow(f, k))


def _den_common_mono(den):
    mins = None
    for m in den:
        md = dict(m)
        if mins is None:
            mins = md
        else:
            for a in list(mins):
                e = md.get(a, 0)
                if e <= 0:
                    del mins[a]
                elif e < mins[a]:
                    mins[a] = e
        if not mins:
            return ()
    return tuple(mins.items()) if mins else ()


def rf_make(numf, den):
    if not den:
        raise ExprError("division by zero in normalization")
    if not numf:
        return ({}, _pone())
    # exp kernels are units: never leave one as a common factor of the
    # denominator
    for a, e in _den_common_mono(den):
        if a.kind == EXP:
            inv_arg = normalize(num(-e) * a.args[0])
            atom, _ = _kernel_atom(EXP, inv_arg)
            if atom is not None:
                unit = {((atom, 1),): Fraction(1)}
                numf = _fmul(numf, unit)
                den = _fmul(den, unit)
    if not (is_const(den) and const_value(den) == 1):
        q = pdivides_try(numf, den)
        if q is not None:
            numf, den = q, {ONE_MONO: Fraction(1)}
        else:
            g = pgcd(numf, den)
            if not (is_const(g) and const_value(g) in (1, -1)):
                numf = pexactdiv(numf, g)
                den = pexactdiv(den, g)
    lead = max(den, key=lambda m: (mono_degree(m),
                                   tuple((a.skey, e) for a, e in m)))
    lc = den[lead]
    if lc != 1:
        numf = {m: Fraction(c) / lc for m, c in numf.items()}
        den = {m: Fraction(c) / lc for m, c in den.items()}
    return (numf, den)


def rf_add(a, b):
    n1, d1 = a
    n2, d2 = b
    if d1 == d2:
        return rf_make(padd(n1, n2), d1)
    # one denominator dividing the other keeps fractions from compounding
    q = pdivides_try(d2, d1)
    if q is not None:
        return rf_make(padd(_fmul(n1, q), n2), d2)
    q = pdivides_try(d1, d2)
    if q is not None:
        return rf_make(padd(n1, _fmul(n2, q)), d1)
    return rf_make(padd(_fmul(n1, d2), _fmul(n2, d1)), _fmul(d1, d2))


def rf_mul(a, b):
    n1, d1 = a
    n2, d2 = b
    return rf_make(_fmul(n1, n2), _fmul(d1, d2))


def _poly_frac_power(p, e):
    """p**e for fractional e; p must be a fixed polynomial."""
    if not p:
        return {}
    if len(p) == 1:
        (m, c), = p.items()
        piece = _pone()
        croot = _frac_root(Fraction(c), e)
        if croot is None:
            base = num(c)
            piece = pmul_term(piece, ((base, e),), Fraction(1))
        else:
            piece = {ONE_MONO: croot}
        for a, ae in m:
            piece = _fmul(piece, _fix_poly({((a, ae * e),): Fraction(1)}))
        return _fix_poly(piece)
    base = rebuild((p, _pone()))
    return _fix_poly({((base, e),): Fraction(1)})


def rf_pow(rf, e):
    e = Fraction(e)
    n, d = rf
    if e == 0:
        return (_pone(), _pone())
    if e.denominator == 1:
        k = e.numerator
        if k < 0:
            if not n:
                raise ExprError("division by zero in normalization")
            n, d = d, n
            k = -k
        return rf_make(_fpow(n, k), _fpow(d, k))
    if e < 0:
        if not n:
            raise ExprError("division by zero in normalization")
        n, d = d, n
        e = -e
    return rf_make(_poly_frac_power(n, e), _poly_frac_power(d, e))


def _norm(e):
    if e._norm is not None:
        return e._norm
    k = e.kind
    if k == NUM:
        rf = ({ONE_MONO: e.data} if e.data else {}, _pone())
    elif k == SYM:
        rf = ({((e, 1),): Fraction(1)}, _pone())
    elif k == ADD:
        rf = _norm(e.args[0])
        for a in e.args[1:]:
            rf = rf_add(rf, _norm(a))
    elif k == MUL:
        rf = _norm(e.args[0])
        for a in e.args[1:]:
            rf = rf_mul(rf, _norm(a))
    elif k == POW:
        rf = rf_pow(_norm(e.args[0]), e.data)
    else:  # kernel
        arg = rebuild(_norm(e.args[0]))
        atom, const = _kernel_atom(k, arg)
        if atom is None:
            rf = ({ONE_MONO: const} if const else {}, _pone())
        else:
            rf = ({((atom, 1),): Fraction(1)}, _pone())
    e._norm = rf
    return rf


def _term_key(m):
    return (mono_degree(m), tuple((a.skey, Fraction(e)) for a, e in m))


def _term_expr(m, c):
    pieces = []
    for a, e in m:
        pieces.append(a if e == 1 else Expr(POW, (a,), Fraction(e)))
    if not pieces:
        return num(c)
    if c != 1:
        pieces = [num(c)] + pieces
    if len(pieces) == 1:
        return pieces[0]
    return Expr(MUL, tuple(pieces))


def _poly_expr(p):
    if not p:
        return ZERO
    terms = sorted(p.items(), key=lambda mc: _term_key(mc[0]), reverse=True)
    exprs = [_term_expr(m, c) for m, c in terms]
    if len(exprs) == 1:
        return exprs[0]
    return Expr(ADD, tuple(exprs))


def rebuild(rf):
    """Canonical expression tree of a normal form."""
    n, d = rf
    ne = _poly_expr(n)
    if is_const(d) and const_value(d) == 1:
        out = ne
    else:
        de = Expr(POW, (_poly_expr(d),), Fraction(-1))
        if ne.kind == NUM and ne.data == 1:
            out = de
        else:
            out = Expr(MUL, (ne, de))
    if out._norm is None:
        out._norm = rf
    return out


def normalize(e):
    """Canonical form; idempotent, equality-faithful."""
    return rebuild(_norm(e))


def canonically_equal(a, b):
    return _norm(a) == _norm(b)


def complexity(e):
    n, d = _norm(e)
    return (len(n) + len(d)
            + sum(len(m) for m in n) + sum(len(m) for m in d))


# ----------------------------------------------------------------------
# differentiation
# ----------------------------------------------------------------------

def _atom_diff(a, s):
    if a.kind == SYM:
        return (_pone(), _pone()) if a.data == s else RF_ZERO
    if a.kind == EXP:
        g = _norm_diff(_norm(a.args[0]), s)
        return rf_mul(g, ({((a, 1),): Fraction(1)}, _pone()))
    if a.kind == LN:
        g = _norm_diff(_norm(a.args[0]), s)
        return rf_mul(g, rf_pow(_norm(a.args[0]), -1))
    if a.kind == SIN:
        g = _norm_diff(_norm(a.args[0]), s)
        atom, const = _kernel_atom(COS, a.args[0])
        cosp = ({ONE_MONO: const} if const else {}, _pone()) \
            if atom is None else ({((atom, 1),): Fraction(1)}, _pone())
        return rf_mul(g, cosp)
    if a.kind == COS:
        g = _norm_diff(_norm(a.args[0]), s)
        atom, const = _kernel_atom(SIN, a.args[0])
        sinp = ({ONE_MONO: const} if const else {}, _pone()) \
            if atom is None else ({((atom, 1),): Fraction(1)}, _pone())
        return rf_mul(rf_mul(g, sinp), ({ONE_MONO: Fraction(-1)}, _pone()))
    # composite base
    return _norm_diff(_norm(a), s)


def _poly_diff(p, s):
    total = RF_ZERO
    atoms = set()
    for m in p:
        for a, _ in m:
            atoms.add(a)
    for a in sorted(atoms, key=lambda x: x.skey):
        if s not in a.free_symbols:
            continue
        da = _atom_diff(a, s)
        if not da[0]:
            continue
        # sum over terms of c * e * rest * a^(e-1); a^(e-1) goes through
        # rf_pow so negative and fractional exponents land in the right
        # side of the fraction
        acc = RF_ZERO
        by_exp = {}
        for m, c in p.items():
            e = None
            rest = []
            for aa, ee in m:
                if aa == a:
                    e = ee
                else:
                    rest.append((aa, ee))
            if e is None:
                continue
            bucket = by_exp.setdefault(Fraction(e), {})
            key = tuple(rest)
            nc = bucket.get(key, 0) + Fraction(c) * e
            if nc == 0:
                bucket.pop(key, None)
            else:
                bucket[key] = nc
        for e, bucket in sorted(by_exp.items()):
            if not bucket:
                continue
            apow = rf_pow(({((a, 1),): Fraction(1)}, _pone()), e - 1)
            acc = rf_add(acc, rf_mul((bucket, _pone()), apow))
        total = rf_add(total, rf_mul(acc, da))
    return total


def _norm_diff(rf, s):
    n, d = rf
    dn = _poly_diff(n, s)
    if is_const(d) and const_value(d) == 1:
        return dn
    dd = _poly_diff(d, s)
    a = rf_mul(dn, rf_pow((d, _pone()), -1))
    b = rf_mul(rf_mul((n, _pone()), dd), rf_pow((d, _pone()), -2))
    return rf_add(a, rf_mul(b, ({ONE_MONO: Fraction(-1)}, _pone())))


def diff(e, s):
    """Partial derivative; all symbols mutually independent."""
    if not isinstance(s, Symbol):
        raise TypeError("diff() wants a Symbol")
    if s not in e.free_symbols:
        return ZERO
    return rebuild(_norm_diff(_norm(e), s))


# ----------------------------------------------------------------------
# substitution and evaluation
# ----------------------------------------------------------------------

class Assignment:
    """Map from symbols to expressions or exact numbers."""

    def __init__(self, mapping):
        self.mapping = {}
        for k, v in mapping.items():
            if not isinstance(k, Symbol):
                raise TypeError("assignment keys must be Symbols")
            self.mapping[k] = v

    def __contains__(self, s):
        return s in self.mapping

    def __getitem__(self, s):
        return self.mapping[s]

    def items(self):
        return self.mapping.items()

    def missing_for(self, e):
        return sorted((s for s in e.free_symbols if s not in self.mapping),
                      key=lambda s: s.name)


def _as_mapping(a):
    if isinstance(a, Assignment):
        return a.mapping
    return a


def _subst_raw(e, mapping):
    if e.kind == NUM:
        return e
    if e.kind == SYM:
        v = mapping.get(e.data)
        if v is None:
            return e
        return _coerce(v)
    args = tuple(_subst_raw(a, mapping) for a in e.args)
    if args == e.args:
        return e
    return Expr(e.kind, args, e.data)


def subst(e, assignment, strict=False):
    """Simultaneous substitution of symbols, then normalization."""
    mapping = _as_mapping(assignment)
    if strict:
        missing = [s for s in e.free_symbols if s not in mapping]
        if missing:
            raise MissingSymbolsError(
                sorted(missing, key=lambda s: s.name))
    return normalize(_subst_raw(e, mapping))


def eval_numeric(e, assignment):
    """IEEE double evaluation; domain trouble raises, never NaN."""
    mapping = _as_mapping(assignment)

    def done(v):
        if not _math.isfinite(v):
            raise EvalDomainError("overflow or undefined value")
        return v

    def ev(x):
        k = x.kind
        if k == NUM:
            return float(x.data)
        if k == SYM:
            if x.data not in mapping:
                raise MissingSymbolsError([x.data])
            return float(mapping[x.data])
        if k == ADD:
            return done(_math.fsum(ev(a) for a in x.args))
        if k == MUL:
            out = 1.0
            for a in x.args:
                out *= ev(a)
            return done(out)
        if k == POW:
            b = ev(x.args[0])
            q = x.data
            try:
                if q.denominator == 1:
                    if b == 0 and q < 0:
                        raise EvalDomainError("division by zero")
                    return done(float(b) ** q.numerator)
                return done(_math.pow(b, float(q)))
            except (ValueError, ZeroDivisionError) as err:
                raise EvalDomainError(str(err) or "power domain error")
            except OverflowError:
                raise EvalDomainError("overflow")
        v = ev(x.args[0])
        try:
            if k == EXP:
                return done(_math.exp(v))
            if k == LN:
                if v <= 0:
                    raise EvalDomainError("ln of a non-positive value")
                return done(_math.log(v))
            if k == SIN:
                return _math.sin(v)
            if k == COS:
                return _math.cos(v)
        except OverflowError:
            raise EvalDomainError("overflow")
        raise ExprError(f"cannot evaluate node kind {k}")

    return ev(e)


# ----------------------------------------------------------------------
# zero testing
# ----------------------------------------------------------------------

def _probe_points(symbols, rng, count):
    pts = []
    for _ in range(count):
        pts.append({s: Fraction(rng.randint(-3000, 3000), 1000)
                    for s in symbols})
    return pts


def is_zero(e, rng=None, tol=PROBE_TOL, probes=PROBE_POINTS):
    """Verdict on e == 0: canonical proof, else randomized probing."""
    n, d = _norm(e)
    if not n:
        return PROVEN_ZERO
    if is_const(n) and is_const(d):
        return PROVEN_NONZERO
    if rng is None:
        rng = random.Random(DEFAULT_PROBE_SEED)
    symbols = sorted(e.free_symbols, key=lambda s: s.name)
    target = rebuild((n, d))
    good = 0
    attempts = 0
    while good < probes and attempts < probes * 12:
        attempts += 1
        point = {s: Fraction(rng.randint(-3000, 3000), 1000)
                 for s in symbols}
        try:
            v = eval_numeric(target, point)
        except EvalDomainError:
            continue
        if abs(v) > tol:
            return PROVEN_NONZERO
        good += 1
    if good == 0:
        return UNKNOWN
    return PROBABLY_ZERO


# ----------------------------------------------------------------------
# rendering
# ----------------------------------------------------------------------

def _frac_str(c):
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _atom_str(a):
    if a.kind == SYM:
        return a.data.name
    if a.kind in KERNEL_KINDS:
        return f"{a.kind}({render(a.args[0])})"
    if a.kind == NUM:
        return f"({_frac_str(a.data)})"
    return f"({render(a)})"


def _pow_str(a, e):
    base = _atom_str(a)
    if e == 1:
        return base
    e = Fraction(e)
    if e.denominator == 1 and e >= 0:
        return f"{base}^{e.numerator}"
    return f"{base}^({_frac_str(e)})"


def _term_str(m, c):
    c = Fraction(c)
    parts = [_pow_str(a, e) for a, e in m]
    if not parts:
        return _frac_str(abs(c)), c < 0
    coeff = abs(c)
    if coeff != 1:
        parts = [_frac_str(coeff)] + parts
    return "*".join(parts), c < 0


def _poly_str(p):
    if not p:
        return "0"
    terms = sorted(p.items(), key=lambda mc: _term_key(mc[0]), reverse=True)
    out = []
    for i, (m, c) in enumerate(terms):
        s, negative = _term_str(m, c)
        if i == 0:
            out.append(f"-{s}" if negative else s)
        else:
            out.append(f"- {s}" if negative else f"+ {s}")
    return " ".join(out)


def render(e):
    """Normalized, re-parseable string form."""
    n, d = _norm(e)
    ns = _poly_str(n)
    if is_const(d) and const_value(d) == 1:
        return ns
    return f"({ns})/({_poly_str(d)})"
