"""Vector fields on the base manifold and their prolonged relatives.

VectorField carries coefficients (xi^i, phi^a) along d/dx^i and d/du^a;
coefficients may depend on jets (generalized fields).  ProlongedField
adds one coefficient per jet coordinate up to its order.  Commutators of
prolonged fields are taken raw, with every jet coordinate treated as an
independent direction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import expr as ex
from .expr import DEPENDENT_JET
from .jet import JetSpace, MultiIndex


def jet_order(e, space):
    """Largest |J| among jet symbols of e; 0 when none occur."""
    best = 0
    for s in e.free_symbols:
        if s.kind == DEPENDENT_JET:
            info = space._jet_info.get(s)
            if info is not None:
                best = max(best, info[1].order)
    return best


@dataclass(frozen=True)
class VectorField:
    space: JetSpace
    xi: tuple
    phi: tuple

    def __post_init__(self):
        xi = tuple(ex.normalize(ex._coerce(e)) for e in self.xi)
        phi = tuple(ex.normalize(ex._coerce(e)) for e in self.phi)
        if len(xi) != self.space.q or len(phi) != self.space.p:
            raise ValueError("coefficient count does not match the space")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "phi", phi)

    @property
    def coefficient_order(self):
        return max([jet_order(e, self.space) for e in self.xi + self.phi],
                   default=0)

    def is_lie_point(self):
        return self.coefficient_order == 0

    def is_vertical(self):
        return all(ex.is_zero(e) == ex.PROVEN_ZERO for e in self.xi)

    def characteristic(self):
        """Q^a = phi^a - u^a_i xi^i."""
        out = []
        for a in range(self.space.p):
            q = self.phi[a]
            for i in range(self.space.q):
                J = MultiIndex.zero(self.space.q).increment(i)
                q = q - ex.sym(self.space.jet(a, J)) * self.xi[i]
            out.append(ex.normalize(q))
        return tuple(out)

    def apply(self, e):
        """Act as a derivation along d/dx^i and d/du^a only."""
        out = ex.ZERO
        for i in range(self.space.q):
            out = out + self.xi[i] * ex.diff(e, self.space.x_symbol(i))
        for a in range(self.space.p):
            u0 = self.space.jet(a, MultiIndex.zero(self.space.q))
            out = out + self.phi[a] * ex.diff(e, u0)
        return ex.normalize(out)

    def scaled(self, f):
        f = ex._coerce(f)
        return VectorField(self.space, tuple(f * e for e in self.xi),
                           tuple(f * e for e in self.phi))

    def plus(self, other):
        return VectorField(
            self.space,
            tuple(a + b for a, b in zip(self.xi, other.xi)),
            tuple(a + b for a, b in zip(self.phi, other.phi)))


def evolutionary_rep(X):
    """Vertical generalized field Q^a d/du^a acting on sections like X."""
    return VectorField(X.space, (ex.ZERO,) * X.space.q, X.characteristic())


def is_evolutionary_rep(V, rng=None):
    """Decide whether a vertical first-order field is some X's evolutionary
    representative; returns (True, recovered VectorField) or (False, reason)."""
    space = V.space
    if not V.is_vertical():
        return False, "field is not vertical"
    if V.coefficient_order > 1:
        return False, "coefficients depend on jets of order above 1"
    q = space.q
    p = space.p
    zero_J = MultiIndex.zero(q)
    # dQ^a/du^b_k must be -delta^a_b xi^k
    xi = [None] * q
    for k in range(q):
        Jk = zero_J.increment(k)
        for a in range(p):
            for b in range(p):
                d = ex.diff(V.phi[a], ex.sym(space.jet(b, Jk)).data)
                if a == b:
                    cand = ex.normalize(-d)
                    if xi[k] is None:
                        xi[k] = cand
                    elif not ex.canonically_equal(xi[k], cand):
                        return False, (
                            f"dQ/d{space.jet_name(a, Jk)} differs across "
                            f"components, no common xi^{space.independent[k]}")
                else:
                    if ex.is_zero(d, rng) != ex.PROVEN_ZERO:
                        return False, (
                            f"dQ^{space.dependent[a]}/d"
                            f"{space.jet_name(b, Jk)} = {ex.render(d)} "
                            f"violates the off-diagonal condition")
    for k in range(q):
        if jet_order(xi[k], space) > 0:
            return False, f"recovered xi^{space.independent[k]} depends on jets"
    phi = []
    for a in range(p):
        f = V.phi[a]
        for b in range(p):
            for k in range(q):
                s = space.jet(b, zero_J.increment(k))
                f = f - ex.diff(V.phi[a], s) * ex.sym(s)
        f = ex.normalize(f)
        if jet_order(f, space) > 0:
            return False, f"recovered phi^{space.dependent[a]} depends on jets"
        phi.append(f)
    X = VectorField(space, tuple(xi), tuple(phi))
    rec = evolutionary_rep(X)
    for a in range(p):
        if ex.is_zero(rec.phi[a] - V.phi[a], rng) != ex.PROVEN_ZERO:
            return False, "recovered field does not reproduce the input"
    return True, X


@dataclass(frozen=True)
class ProlongedField:
    space: JetSpace
    xi: tuple
    psi: dict  # (a, MultiIndex) -> Expr
    order: int
    provenance: str = "raw"

    def __post_init__(self):
        object.__setattr__(self, "xi",
                           tuple(ex.normalize(ex._coerce(e)) for e in self.xi))
        psi = {k: ex.normalize(ex._coerce(v)) for k, v in self.psi.items()}
        object.__setattr__(self, "psi", psi)

    def coefficient(self, a, J):
        if isinstance(a, str):
            a = self.space.dependent.index(a)
        if not isinstance(J, MultiIndex):
            J = MultiIndex(tuple(J))
        return self.psi.get((a, J), ex.ZERO)

    def base_field(self):
        zero_J = MultiIndex.zero(self.space.q)
        return VectorField(
            self.space, self.xi,
            tuple(self.coefficient(a, zero_J) for a in range(self.space.p)))

    def characteristic(self):
        return self.base_field().characteristic()

    def is_vertical(self):
        return all(ex.is_zero(e) == ex.PROVEN_ZERO for e in self.xi)

    def apply(self, e):
        """Act as a derivation on an expression over jet coordinates."""
        out = ex.ZERO
        for i in range(self.space.q):
            out = out + self.xi[i] * ex.diff(e, self.space.x_symbol(i))
        for (a, J), coeff in self.psi.items():
            s = self.space.jet(a, J)
            if s in e.free_symbols:
                out = out + coeff * ex.diff(e, s)
        return ex.normalize(out)

    def scaled(self, f):
        f = ex._coerce(f)
        return ProlongedField(
            self.space, tuple(f * e for e in self.xi),
            {k: f * v for k, v in self.psi.items()}, self.order, "raw")

    def plus(self, other):
        keys = set(self.psi) | set(other.psi)
        return ProlongedField(
            self.space,
            tuple(a + b for a, b in zip(self.xi, other.xi)),
            {k: self.coefficient(*k) + other.coefficient(*k) for k in keys},
            max(self.order, other.order), "raw")

    def minus(self, other):
        return self.plus(other.scaled(ex.num(-1)))

    def coefficients_with_labels(self):
        """(label, Expr) pairs in a stable order, xi first."""
        out = []
        for i in range(self.space.q):
            out.append((f"xi^{self.space.independent[i]}", self.xi[i]))
        for (a, J) in sorted(self.psi, key=lambda k: (k[1].order, k[0],
                                                      k[1].entries)):
            out.append((f"psi[{self.space.jet_name(a, J)}]",
                        self.psi[(a, J)]))
        return out


def commutator(X, Y):
    """Lie bracket; VectorFields stay VectorFields, ProlongedFields are
    bracketed raw on the jet space and tagged accordingly."""
    if isinstance(X, VectorField) and isinstance(Y, VectorField):
        if X.space is not Y.space:
            raise ValueError("fields live on different spaces")
        xi = tuple(X.apply(Y.xi[i]) - Y.apply(X.xi[i])
                   for i in range(X.space.q))
        phi = tuple(X.apply(Y.phi[a]) - Y.apply(X.phi[a])
                    for a in range(X.space.p))
        return VectorField(X.space, xi, phi)
    if isinstance(X, ProlongedField) and isinstance(Y, ProlongedField):
        if X.space is not Y.space:
            raise ValueError("fields live on different spaces")
        xi = tuple(X.apply(Y.xi[i]) - Y.apply(X.xi[i])
                   for i in range(X.space.q))
        keys = set(X.psi) | set(Y.psi)
        psi = {k: X.apply(Y.coefficient(*k)) - Y.apply(X.coefficient(*k))
               for k in keys}
        return ProlongedField(X.space, xi, psi,
                              max(X.order, Y.order), "raw")
    raise TypeError("commutator wants two fields of the same kind")


class InvolutionError(ex.ExprError):
    pass


@dataclass
class InvolutionResult:
    coefficients: dict       # (alpha, beta) -> tuple of F^gamma Exprs
    rank_deficient: bool
    pivots: list = field(default_factory=list)

    def antisymmetrized(self, alpha, beta):
        if alpha == beta:
            return None
        if (alpha, beta) in self.coefficients:
            return self.coefficients[(alpha, beta)]
        return tuple(ex.normalize(-f)
                     for f in self.coefficients[(beta, alpha)])


def _field_components(X):
    return list(X.xi) + list(X.phi)


def _solve_linear(columns, rhs, rng):
    """Solve sum_g columns[g]*F^g = rhs over the expression field.

    Returns (solution list, rank_deficient, pivots); free unknowns are
    set to zero.  Raises InvolutionError when inconsistent.
    """
    m = len(rhs)
    r = len(columns)
    aug = [[columns[g][row] for g in range(r)] + [rhs[row]]
           for row in range(m)]
    aug = [[ex.normalize(e) for e in row] for row in aug]
    pivots = []
    pivot_rows = {}
    used_rows = set()
    for col in range(r):
        best = None
        for row in range(m):
            if row in used_rows:
                continue
            entry = aug[row][col]
            verdict = ex.is_zero(entry, rng)
            if verdict in (ex.PROVEN_ZERO, ex.PROBABLY_ZERO):
                continue
            size = ex.complexity(entry)
            if best is None or size < best[0]:
                best = (size, row)
        if best is None:
            continue
        _, prow = best
        used_rows.add(prow)
        pivot_rows[col] = prow
        pivot = aug[prow][col]
        pivots.append(pivot)
        for row in range(m):
            if row == prow:
                continue
            factor = aug[row][col]
            if ex.is_zero(factor, rng) == ex.PROVEN_ZERO:
                continue
            scale = ex.normalize(factor / pivot)
            aug[row] = [ex.normalize(aug[row][k] - scale * aug[prow][k])
                        for k in range(r + 1)]
    # consistency: rows without pivots must have zero rhs
    for row in range(m):
        if row in used_rows:
            continue
        lhs_zero = all(
            ex.is_zero(aug[row][g], rng) == ex.PROVEN_ZERO for g in range(r))
        rhs_v = ex.is_zero(aug[row][r], rng)
        if lhs_zero and rhs_v != ex.PROVEN_ZERO:
            raise InvolutionError(
                f"inconsistent system, residual {ex.render(aug[row][r])}")
    solution = [ex.ZERO] * r
    for col, prow in pivot_rows.items():
        solution[col] = ex.normalize(aug[prow][r] / aug[prow][col])
    rank_deficient = len(pivot_rows) < r
    return solution, rank_deficient, pivots


def involution_coefficients(fields, rng=None):
    """F with [X_a, X_b] = F_ab^g X_g, solved pair by pair.

    Verifies each solution by substituting back; a nonzero residual
    raises InvolutionError (the set is not in involution)."""
    if not fields:
        raise ValueError("need at least one field")
    rng = rng or random.Random(ex.DEFAULT_PROBE_SEED)
    space = fields[0].space
    columns = [_field_components(X) for X in fields]
    result = InvolutionResult(coefficients={}, rank_deficient=False)
    r = len(fields)
    for alpha in range(r):
        for beta in range(alpha + 1, r):
            bracket = commutator(fields[alpha], fields[beta])
            rhs = _field_components(bracket)
            sol, deficient, pivots = _solve_linear(columns, rhs, rng)
            result.rank_deficient |= deficient
            result.pivots.extend(pivots)
            # residual check
            for row in range(len(rhs)):
                acc = rhs[row]
                for g in range(r):
                    acc = acc - sol[g] * columns[g][row]
                verdict = ex.is_zero(acc, rng)
                if verdict == ex.PROVEN_NONZERO:
                    raise InvolutionError(
                        "fields are not in involution: residual "
                        f"{ex.render(acc)}")
            result.coefficients[(alpha, beta)] = tuple(sol)
    return result


def is_lie_algebra(fields, rng=None):
    """(True, structure constants) when every F is constant on the space;
    otherwise (False, witness expression)."""
    rng = rng or random.Random(ex.DEFAULT_PROBE_SEED)
    res = involution_coefficients(fields, rng)
    for key, fs in sorted(res.coefficients.items()):
        for g, f in enumerate(fs):
            for s in f.free_symbols:
                if s.kind == ex.PARAMETER:
                    continue
                d = ex.diff(f, s)
                if ex.is_zero(d, rng) != ex.PROVEN_ZERO:
                    return False, f
    constants = {k: tuple(v) for k, v in res.coefficients.items()}
    return True, constants
