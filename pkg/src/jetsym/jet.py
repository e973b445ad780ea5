"""Jet-space bookkeeping: coordinates, total derivatives, sections.

A JetSpace fixes independent variables x^i, dependent variables u^a and
a nominal order n.  Jet coordinates u^a_J (J a multi-index) are interned
symbols named by appending the derivative letters in declared order,
u_xx, v_xy, ...; a positional alias u[2,0] is accepted on input.  Jets
above the nominal order are created on demand, so total derivatives
never fall off the edge of the space.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb

from . import expr as ex
from .expr import DEPENDENT_JET, INDEPENDENT, PARAMETER, Expr, Symbol


@dataclass(frozen=True)
class MultiIndex:
    entries: tuple

    def __post_init__(self):
        if any(e < 0 for e in self.entries):
            raise ValueError("multi-index entries must be non-negative")
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))

    @property
    def order(self):
        return sum(self.entries)

    def increment(self, i):
        e = list(self.entries)
        e[i] += 1
        return MultiIndex(tuple(e))

    def decrement(self, i):
        e = list(self.entries)
        if e[i] == 0:
            raise ValueError("cannot decrement a zero entry")
        e[i] -= 1
        return MultiIndex(tuple(e))

    @staticmethod
    def zero(q):
        return MultiIndex((0,) * q)

    @staticmethod
    def all_of_order(q, k):
        """Every multi-index over q variables with |J| = k."""
        out = []
        for combo in combinations_with_replacement(range(q), k):
            e = [0] * q
            for i in combo:
                e[i] += 1
            out.append(MultiIndex(tuple(e)))
        return sorted(out, key=lambda j: j.entries)

    @staticmethod
    def up_to(q, n):
        out = []
        for k in range(n + 1):
            out.extend(MultiIndex.all_of_order(q, k))
        return out


class JetSpace:
    """Coordinate chart on J^n: x^i, u^a and jets u^a_J, plus parameters."""

    def __init__(self, independent, dependent, order, params=()):
        self.independent = tuple(independent)
        self.dependent = tuple(dependent)
        self.order = int(order)
        self.params = tuple(params)
        if self.order < 0:
            raise ValueError("order must be non-negative")
        names = list(self.independent) + list(self.dependent) + list(self.params)
        if len(set(names)) != len(names):
            raise ValueError("coordinate names must be unique")
        suffixes = set(self.independent)
        for d in self.dependent:
            base, _, tail = d.rpartition("_")
            if base and tail and set(tail) <= suffixes and base in self.dependent:
                raise ValueError(f"dependent name {d!r} collides with a jet of {base!r}")
        self._x = tuple(Symbol(n, INDEPENDENT) for n in self.independent)
        self._p = tuple(Symbol(n, PARAMETER) for n in self.params)
        self._by_name = {s.name: s for s in self._x + self._p}
        self._jets = {}       # (a, MultiIndex) -> Symbol
        self._jet_info = {}   # Symbol -> (a, MultiIndex)
        for a in range(len(self.dependent)):
            self.jet(a, MultiIndex.zero(self.q))

    @property
    def q(self):
        return len(self.independent)

    @property
    def p(self):
        return len(self.dependent)

    def x_symbol(self, i):
        return self._x[i]

    def x_symbols(self):
        return self._x

    def param_symbols(self):
        return self._p

    def jet_name(self, a, J):
        base = self.dependent[a]
        if J.order == 0:
            return base
        letters = "".join(self.independent[i] * J.entries[i]
                          for i in range(self.q))
        return f"{base}_{letters}"

    def jet(self, a, J):
        """Interned jet symbol u^a_J; a may be an index or a name."""
        if isinstance(a, str):
            a = self.dependent.index(a)
        if not isinstance(J, MultiIndex):
            J = MultiIndex(tuple(J))
        key = (a, J)
        s = self._jets.get(key)
        if s is None:
            s = Symbol(self.jet_name(a, J), DEPENDENT_JET)
            if s.name in self._by_name:
                raise ValueError(f"name clash on {s.name!r}")
            self._jets[key] = s
            self._jet_info[s] = key
            self._by_name[s.name] = s
        return s

    def jet_by_entries(self, dep_name, entries):
        if dep_name not in self.dependent:
            raise KeyError(f"unknown dependent variable {dep_name!r}")
        if len(entries) != self.q:
            raise KeyError(
                f"{dep_name}[...] needs {self.q} entries, got {len(entries)}")
        return self.jet(dep_name, MultiIndex(tuple(entries)))

    def resolve(self, name):
        s = self._by_name.get(name)
        if s is not None:
            return s
        base, _, tail = name.partition("_")
        if base in self.dependent and tail:
            entries = [0] * self.q
            pos = {x: i for i, x in enumerate(self.independent)}
            for ch in tail:
                if ch not in pos:
                    raise KeyError(f"unknown symbol {name!r}")
                entries[pos[ch]] += 1
            return self.jet(base, MultiIndex(tuple(entries)))
        raise KeyError(f"unknown symbol {name!r}")

    def decode(self, s):
        """("x", i) | ("jet", a, J) | ("param",) for a symbol of this space."""
        info = self._jet_info.get(s)
        if info is not None:
            return ("jet",) + info
        if s.kind == INDEPENDENT and s in self._x:
            return ("x", self._x.index(s))
        if s.kind == PARAMETER and s in self._p:
            return ("param",)
        raise KeyError(f"{s.name!r} does not belong to this space")

    def coordinates(self, order=None):
        """x's first, then jets sorted by (|J|, a, J)."""
        n = self.order if order is None else order
        coords = list(self._x)
        for J in MultiIndex.up_to(self.q, n):
            for a in range(self.p):
                coords.append(self.jet(a, J))
        return coords

    def n_coordinates(self, order=None):
        n = self.order if order is None else order
        return self.q + self.p * comb(n + self.q, self.q)

    def parse(self, text):
        from .parser import parse
        return parse(text, self)


def total_derivative(e, i, space):
    """D_i = d/dx^i plus the shift u^a_J -> u^a_{J,i} on every jet in e."""
    if not isinstance(e, Expr):
        e = ex._coerce(e)
    out = ex.diff(e, space.x_symbol(i))
    for s in sorted(e.free_symbols, key=lambda t: t.name):
        if s.kind != DEPENDENT_JET:
            continue
        info = space._jet_info.get(s)
        if info is None:
            continue
        a, J = info
        partner = space.jet(a, J.increment(i))
        d = ex.diff(e, s)
        if d.kind == ex.NUM and d.data == 0:
            continue
        out = out + ex.sym(partner) * d
    return ex.normalize(out)


@dataclass(frozen=True)
class ContactForm:
    """omega^a_J = du^a_J - u^a_{J,i} dx^i as a coefficient map."""

    a: int
    J: MultiIndex
    coefficients: dict  # basis label -> Expr

    @staticmethod
    def of(space, a, J):
        coeffs = {("du", a, J): ex.ONE}
        for i in range(space.q):
            coeffs[("dx", i)] = -ex.sym(space.jet(a, J.increment(i)))
        return ContactForm(a, J, coeffs)


def contact_forms(space):
    """The generating forms, one per (a, J) with |J| <= n-1."""
    out = []
    for J in MultiIndex.up_to(space.q, space.order - 1):
        for a in range(space.p):
            out.append(ContactForm.of(space, a, J))
    return out


class Section:
    """u^a = f^a(x): expressions in independent variables and parameters."""

    def __init__(self, space, values):
        self.space = space
        self.values = {}
        allowed = set(space.x_symbols()) | set(space.param_symbols())
        for name in space.dependent:
            if name not in values:
                raise ValueError(f"section misses dependent {name!r}")
            v = ex._coerce(values[name])
            bad = [s for s in v.free_symbols if s not in allowed]
            if bad:
                names = ", ".join(s.name for s in bad)
                raise ValueError(
                    f"section value for {name!r} depends on {names}")
            self.values[name] = ex.normalize(v)

    def value(self, a):
        if isinstance(a, int):
            a = self.space.dependent[a]
        return self.values[a]


def prolong_section(f, space, order=None):
    """Assignment sending every jet u^a_J to the matching derivative of f."""
    n = space.order if order is None else order
    derivs = {}
    for a in range(space.p):
        derivs[(a, MultiIndex.zero(space.q))] = f.value(a)
        for k in range(1, n + 1):
            for J in MultiIndex.all_of_order(space.q, k):
                i = max(idx for idx, e in enumerate(J.entries) if e > 0)
                prev = derivs[(a, J.decrement(i))]
                derivs[(a, J)] = ex.diff(prev, space.x_symbol(i))
    mapping = {space.jet(a, J): v for (a, J), v in derivs.items()}
    return ex.Assignment(mapping)
