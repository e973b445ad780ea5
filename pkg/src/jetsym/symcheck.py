"""Differential systems in solved form and the tangency machinery.

A DiffSystem maps solved jet symbols u^a_K to right-hand sides in
unsolved jets of no higher order.  Restriction to the solution manifold
substitutes the rules plus all their total-derivative consequences,
generated lazily up to the order actually present in the input.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import expr as ex
from .jet import MultiIndex, prolong_section, total_derivative
from .matrix import numeric_rank, symbolic_rank
from .vfield import jet_order


@dataclass
class VerdictReport:
    verdict: str             # proven | disproven | probable | not-applicable | error
    items: list              # (label, residual Expr, is_zero verdict)
    provenance: dict = field(default_factory=dict)

    @staticmethod
    def from_residuals(labeled, rng=None, provenance=None):
        items = []
        for label, e in labeled:
            items.append((label, e, ex.is_zero(e, rng)))
        return VerdictReport(_overall(v for _, _, v in items), items,
                             provenance or {})

    @staticmethod
    def not_applicable(reason, provenance=None):
        prov = dict(provenance or {})
        prov["reason"] = reason
        return VerdictReport("not-applicable", [], prov)


def _overall(verdicts):
    verdicts = list(verdicts)
    if any(v == ex.PROVEN_NONZERO for v in verdicts):
        return "disproven"
    if all(v == ex.PROVEN_ZERO for v in verdicts):
        return "proven"
    if any(v == ex.UNKNOWN for v in verdicts):
        return "error"
    return "probable"


class SolvedFormError(ex.ExprError):
    pass


class DiffSystem:
    """Equations u^a_K = G^a in solved, functionally triangular form."""

    def __init__(self, space, rules):
        self.space = space
        base = {}
        for s, G in rules.items():
            if isinstance(s, str):
                s = space.resolve(s)
            info = space.decode(s)
            if info[0] != "jet":
                raise SolvedFormError(f"{s.name} is not a jet coordinate")
            base[s] = ex.normalize(ex._coerce(G))
        solved = set(base)
        # one closure pass must clear solved symbols from right sides
        reduced = {}
        for s, G in base.items():
            info = space.decode(s)
            order = info[2].order
            if jet_order(G, space) > order:
                raise SolvedFormError(
                    f"rule for {s.name} has a right side of higher order")
            cur = G
            for _ in range(len(base) + 1):
                if not (cur.free_symbols & solved):
                    break
                cur = ex.subst(cur, {t: base[t] for t in solved})
            else:
                raise SolvedFormError(
                    f"rule for {s.name} does not reduce; the system is "
                    "not triangular")
            if cur.free_symbols & solved:
                raise SolvedFormError(
                    f"rule for {s.name} does not reduce; the system is "
                    "not triangular")
            reduced[s] = ex.normalize(cur)
        self.rules = reduced
        self.order = max((space.decode(s)[2].order for s in reduced),
                         default=0)
        self._closure_cache = {}

    def closure(self, order):
        """Rules plus derivative consequences for every solved jet of
        order up to `order`, right sides free of solved symbols."""
        order = max(order, self.order)
        cached = self._closure_cache.get(order)
        if cached is not None:
            return cached
        space = self.space
        ext = {}
        info = {s: space.decode(s) for s in self.rules}
        for k in range(order + 1):
            level = {}
            for s, G in self.rules.items():
                _, a, K = info[s]
                if K.order > k:
                    continue
                if K.order == k:
                    level[s] = G
                    continue
                for L in MultiIndex.all_of_order(space.q, k - K.order):
                    i = max(idx for idx, e in enumerate(L.entries) if e > 0)
                    prevL = L.decrement(i)
                    prev_sym = space.jet(a, MultiIndex(tuple(
                        ke + le for ke, le in zip(K.entries, prevL.entries))))
                    target = space.jet(a, MultiIndex(tuple(
                        ke + le for ke, le in zip(K.entries, L.entries))))
                    if target in ext or target in level:
                        continue
                    prev_val = ext.get(prev_sym, level.get(prev_sym))
                    if prev_val is None:
                        raise SolvedFormError(
                            f"closure lost track of {prev_sym.name}")
                    level[target] = total_derivative(prev_val, i, space)
            combined = dict(ext)
            combined.update(level)
            for s, G in level.items():
                cur = G
                for _ in range(len(combined) + 2):
                    hit = cur.free_symbols & set(combined)
                    if not hit:
                        break
                    cur = ex.subst(cur, {t: combined[t] for t in hit})
                else:
                    raise SolvedFormError("closure substitution did not settle")
                ext[s] = ex.normalize(cur)
                combined[s] = ext[s]
        self._closure_cache[order] = ext
        return ext

    def solved_symbols(self, order):
        return set(self.closure(order))


def restrict(e, system):
    """Substitute the system and its derivative consequences to a fixpoint."""
    e = ex._coerce(e)
    order = jet_order(e, system.space)
    rules = system.closure(order)
    cur = ex.normalize(e)
    for _ in range(len(rules) + 2):
        hit = cur.free_symbols & set(rules)
        if not hit:
            return cur
        cur = ex.subst(cur, {t: rules[t] for t in hit})
    raise SolvedFormError("restriction did not reach a fixpoint")


def is_symmetry(P, system, rng=None):
    """Tangency of a prolonged field to the solution manifold."""
    if P.space is not system.space:
        raise ValueError("field and system live on different spaces")
    if P.order < system.order:
        raise ValueError(
            f"prolongation order {P.order} is below the system order "
            f"{system.order}")
    rng = rng or random.Random(ex.DEFAULT_PROBE_SEED)
    items = []
    for s, G in sorted(system.rules.items(), key=lambda kv: kv[0].name):
        residual = restrict(P.apply(ex.sym(s) - G), system)
        items.append((f"{s.name} = {ex.render(G)}", residual))
    return VerdictReport.from_residuals(
        items, rng, provenance={"check": "symmetry",
                                "provenance": P.provenance})


def is_solution(f, system, rng=None):
    """Does the section solve the system?  Substitutes its prolongation."""
    rng = rng or random.Random(ex.DEFAULT_PROBE_SEED)
    needed = system.order
    asg = prolong_section(f, system.space, needed)
    items = []
    for s, G in sorted(system.rules.items(), key=lambda kv: kv[0].name):
        residual = ex.subst(ex.sym(s) - G, asg)
        items.append((f"{s.name} = {ex.render(G)}", residual))
    return VerdictReport.from_residuals(
        items, rng, provenance={"check": "solution"})


def characteristic_defect(X, f, rng=None):
    """Characteristics of X evaluated on the prolonged section."""
    space = X.space
    Q = X.characteristic()
    needed = max([jet_order(q, space) for q in Q], default=0)
    asg = prolong_section(f, space, max(1, needed))
    return [ex.subst(q, asg) for q in Q]


def is_invariant_section(X, f, rng=None):
    rng = rng or random.Random(ex.DEFAULT_PROBE_SEED)
    defects = characteristic_defect(X, f, rng)
    items = [(f"Q^{X.space.dependent[a]}", d)
             for a, d in enumerate(defects)]
    return VerdictReport.from_residuals(
        items, rng, provenance={"check": "invariant-section"})


def compare_on_invariant_sections(P1, P2, f, rng=None):
    """Coefficientwise comparison after substituting the prolonged section;
    not applicable unless the section is invariant for both base fields."""
    rng = rng or random.Random(ex.DEFAULT_PROBE_SEED)
    space = P1.space
    for tag, P in (("first", P1), ("second", P2)):
        for d in characteristic_defect(P.base_field(), f, rng):
            if ex.is_zero(d, rng) != ex.PROVEN_ZERO:
                return VerdictReport.not_applicable(
                    f"section is not invariant for the {tag} field "
                    f"(characteristic {ex.render(d)})",
                    {"check": "compare-on-sections"})
    needed = 0
    for P in (P1, P2):
        for _, e in P.coefficients_with_labels():
            needed = max(needed, jet_order(e, space))
    asg = prolong_section(f, space, max(1, needed))
    diff = P1.minus(P2)
    items = [(label, ex.subst(e, asg))
             for label, e in diff.coefficients_with_labels()]
    vanish = {}
    for tag, P in (("first", P1), ("second", P2)):
        vanish[tag] = all(
            ex.is_zero(ex.subst(e, asg), rng) == ex.PROVEN_ZERO
            for _, e in P.coefficients_with_labels())
    return VerdictReport.from_residuals(
        items, rng, provenance={"check": "compare-on-sections",
                                "fields_vanish_on_section": vanish})


def same_distribution(P_list, Q_list, rng=None):
    """Do two lists of prolonged fields span the same distribution?

    Generic ranks by symbolic elimination (authoritative when certain)
    with numeric probing as the fallback."""
    rng = rng or random.Random(ex.DEFAULT_PROBE_SEED)
    P_list = list(P_list)
    Q_list = list(Q_list)
    space = P_list[0].space
    order = max(max(P.order for P in P_list), max(Q.order for Q in Q_list))
    coords = space.coordinates(order)
    zero_J = MultiIndex.zero(space.q)

    def row(P):
        comps = {}
        for i in range(space.q):
            comps[space.x_symbol(i)] = P.xi[i]
        for (a, J), v in P.psi.items():
            comps[space.jet(a, J)] = v
        return [comps.get(c, ex.ZERO) for c in coords]

    rows_p = [row(P) for P in P_list]
    rows_q = [row(Q) for Q in Q_list]
    rp, cp = symbolic_rank(rows_p, rng)
    rq, cq = symbolic_rank(rows_q, rng)
    rpq, cpq = symbolic_rank(rows_p + rows_q, rng)
    certain = cp and cq and cpq
    if not certain:
        symbols = sorted({s for r in rows_p + rows_q for e in r
                          for s in e.free_symbols}, key=lambda s: s.name)
        rp = max(rp, numeric_rank(rows_p, symbols, rng))
        rq = max(rq, numeric_rank(rows_q, symbols, rng))
        rpq = max(rpq, numeric_rank(rows_p + rows_q, symbols, rng))
    same = rp == rq == rpq
    if same:
        verdict = "proven" if certain else "probable"
    else:
        verdict = "disproven"
    return VerdictReport(
        verdict, [],
        provenance={"check": "same-distribution",
                    "rank_left": rp, "rank_right": rq, "rank_union": rpq,
                    "certified": "symbolic" if certain else "numeric"})
