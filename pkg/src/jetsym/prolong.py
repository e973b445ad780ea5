"""Prolongation engines: standard, lambda-, mu- and sigma-twisted.

All four share one recursion shape.  Writing Q^a_J = psi^a_J -
u^a_{J,k} xi^k for the level-J characteristic, the step from J to
J+e_i is

    standard:  psi^a_{J,i} = D_i psi^a_J - u^a_{J,k} D_i xi^k
    mu:        ... + (Lambda_i)^a_b Q^b_J
    sigma:     psi^a_{alpha;J,x} = D_x psi^a_{alpha;J}
               - u^a_{J,x} D_x xi_alpha + sigma_alpha^beta Q^a_{beta;J}

Multi-indices are walked along the lexicographically smallest
derivative word; for mu-twists that walk is unambiguous exactly when
the matrices satisfy the horizontal Maurer-Cartan compatibility, which
is enforced by default.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import expr as ex
from .jet import MultiIndex, total_derivative
from .matrix import MatrixExpr
from .vfield import ProlongedField, VectorField, involution_coefficients, commutator


class MaurerCartanError(ex.ExprError):
    pass


@dataclass
class TwistSpec:
    """A named prolongation twist with its validation rules."""

    kind: str  # standard | lambda | mu | sigma
    lam: object = None
    matrices: tuple = ()
    sigma: object = None
    require_mc: bool = True
    warnings: list = field(default_factory=list)

    def validate(self, space):
        from .vfield import jet_order
        self.warnings = []
        if self.kind == "lambda":
            if self.lam is None:
                raise ValueError("lambda twist needs an expression")
            if jet_order(ex._coerce(self.lam), space) > 1:
                raise ValueError("lambda must have jet order at most 1")
        elif self.kind == "mu":
            if len(self.matrices) != space.q:
                raise ValueError(
                    f"mu twist needs {space.q} matrices, got {len(self.matrices)}")
            for m in self.matrices:
                if m.rows != space.p or m.cols != space.p:
                    raise ValueError("mu matrices must be p x p")
        elif self.kind == "sigma":
            if space.q != 1:
                raise ValueError("sigma twists need one independent variable")
            if self.sigma is None or not self.sigma.is_square():
                raise ValueError("sigma twist needs a square matrix")
            for row in self.sigma.entries:
                for e in row:
                    if jet_order(e, space) > 1:
                        self.warnings.append(
                            "sigma entry has jet order above 1")
                        break
        elif self.kind != "standard":
            raise ValueError(f"unknown twist kind {self.kind!r}")
        return self.warnings


def _level_Q(space, psi, xi, a, J):
    q = psi[(a, J)]
    for k in range(space.q):
        q = q - ex.sym(space.jet(a, J.increment(k))) * xi[k]
    return ex.normalize(q)


def _prolong_core(X, n, twist_term):
    """Shared recursion; twist_term(i, a, J, psi) extends the step."""
    space = X.space
    psi = {}
    zero_J = MultiIndex.zero(space.q)
    dxi = [[total_derivative(X.xi[k], i, space) for k in range(space.q)]
           for i in range(space.q)]
    for a in range(space.p):
        psi[(a, zero_J)] = X.phi[a]
    for order in range(1, n + 1):
        for J in MultiIndex.all_of_order(space.q, order):
            i = max(idx for idx, e in enumerate(J.entries) if e > 0)
            Jp = J.decrement(i)
            for a in range(space.p):
                val = total_derivative(psi[(a, Jp)], i, space)
                for k in range(space.q):
                    val = val - ex.sym(space.jet(a, Jp.increment(k))) * dxi[i][k]
                extra = twist_term(i, a, Jp, psi)
                if extra is not None:
                    val = val + extra
                psi[(a, J)] = ex.normalize(val)
    return psi


def standard_prolong(X, n):
    """Canonical lift of X to the order-n jet space."""
    psi = _prolong_core(X, n, lambda i, a, Jp, psi: None)
    return ProlongedField(X.space, X.xi, psi, n, "standard")


def mu_prolong(X, n, lams, enforce_mc=True, rng=None):
    """Twist by matrices Lambda_i; Lambda = 0 degenerates to standard."""
    space = X.space
    lams = tuple(lams)
    if len(lams) != space.q:
        raise ValueError(f"need {space.q} matrices, got {len(lams)}")
    for m in lams:
        if m.rows != space.p or m.cols != space.p:
            raise ValueError("Lambda matrices must be p x p")
    if enforce_mc and space.q > 1:
        from .twist import mc_defect
        for pair, defect in mc_defect(lams, space):
            if not defect.is_zero_matrix(rng):
                raise MaurerCartanError(
                    f"Maurer-Cartan defect is nonzero for pair {pair}: "
                    f"{defect.render()}")

    def twist(i, a, Jp, psi):
        extra = ex.ZERO
        for b in range(space.p):
            entry = lams[i][a, b]
            if entry.kind == ex.NUM and entry.data == 0:
                continue
            extra = extra + entry * _level_Q(space, psi, X.xi, b, Jp)
        return extra

    psi = _prolong_core(X, n, twist)
    return ProlongedField(space, X.xi, psi, n, "mu")


def lambda_prolong(X, n, lam):
    """Scalar twist: Lambda_i = lam * I (the single-matrix case for ODEs)."""
    space = X.space
    lam = ex._coerce(lam)
    ident = MatrixExpr.identity(space.p)
    lams = tuple(ident.scale(lam) for _ in range(space.q))
    out = mu_prolong(X, n, lams, enforce_mc=False)
    return ProlongedField(space, out.xi, out.psi, n, "lambda")


def sigma_prolong(fields, n, sigma):
    """Twist a set of fields by mixing their characteristics (ODE case)."""
    fields = list(fields)
    if not fields:
        raise ValueError("need at least one field")
    space = fields[0].space
    if space.q != 1:
        raise ValueError("sigma prolongation needs one independent variable")
    r = len(fields)
    if not (sigma.rows == r and sigma.cols == r):
        raise ValueError(f"sigma must be {r} x {r}")
    psis = [dict() for _ in range(r)]
    zero_J = MultiIndex.zero(1)
    dxi = [total_derivative(X.xi[0], 0, space) for X in fields]
    for al, X in enumerate(fields):
        for a in range(space.p):
            psis[al][(a, zero_J)] = X.phi[a]
    for order in range(1, n + 1):
        J = MultiIndex((order,))
        Jp = J.decrement(0)
        level = {}
        for al, X in enumerate(fields):
            for a in range(space.p):
                val = total_derivative(psis[al][(a, Jp)], 0, space)
                val = val - ex.sym(space.jet(a, J)) * dxi[al]
                for be in range(r):
                    entry = sigma[al, be]
                    if entry.kind == ex.NUM and entry.data == 0:
                        continue
                    val = val + entry * _level_Q(
                        space, psis[be], fields[be].xi, a, Jp)
                level[(al, a)] = ex.normalize(val)
        for (al, a), v in level.items():
            psis[al][(a, J)] = v
    return [ProlongedField(space, fields[al].xi, psis[al], n, "sigma")
            for al in range(r)]


def apply_gauge_vertical(A, F):
    """Multiply the vertical coefficient block at each jet level by A."""
    space = F.space
    if A.rows != space.p or A.cols != space.p:
        raise ValueError("gauge matrix must be p x p")
    if isinstance(F, VectorField):
        phi = tuple(
            ex.normalize(sum((A[a, b] * F.phi[b] for b in range(space.p)),
                             ex.ZERO))
            for a in range(space.p))
        return VectorField(space, F.xi, phi)
    if isinstance(F, ProlongedField):
        psi = {}
        levels = sorted({J for (_, J) in F.psi}, key=lambda J: J.entries)
        for J in levels:
            for a in range(space.p):
                acc = ex.ZERO
                for b in range(space.p):
                    acc = acc + A[a, b] * F.coefficient(b, J)
                psi[(a, J)] = ex.normalize(acc)
        return ProlongedField(space, F.xi, psi, F.order, "raw")
    raise TypeError("apply_gauge_vertical wants a field")


def apply_gauge_set(A, fields):
    """Mix a set of fields (whole fields, xi included) by a square matrix."""
    fields = list(fields)
    r = len(fields)
    if A.rows != r or A.cols != r:
        raise ValueError(f"gauge matrix must be {r} x {r}")
    out = []
    for al in range(r):
        acc = fields[0].scaled(A[al, 0])
        for be in range(1, r):
            acc = acc.plus(fields[be].scaled(A[al, be]))
        out.append(acc)
    return out


def prolong_combination(coeffs, fields, n):
    """Prolong Z = f^alpha X_alpha and split off the defect.

    Returns (Z_n, defect, prolongs) where prolongs are the standard
    prolongations of the input fields, Z_n = (f^alpha X_alpha)^(n),
    and the defect obeys W^a_0 = 0 with

        W^a_{J,i} = D_i W^a_J + (D_i f^alpha) Q^a_{alpha;J}.
    """
    coeffs = [ex._coerce(f) for f in coeffs]
    fields = list(fields)
    if len(coeffs) != len(fields):
        raise ValueError("need one coefficient per field")
    space = fields[0].space
    Z = fields[0].scaled(coeffs[0])
    for f, X in zip(coeffs[1:], fields[1:]):
        Z = Z.plus(X.scaled(f))
    Zn = standard_prolong(Z, n)
    prolongs = [standard_prolong(X, n) for X in fields]
    zero_J = MultiIndex.zero(space.q)
    W = {(a, zero_J): ex.ZERO for a in range(space.p)}
    dcoeffs = [[total_derivative(f, i, space) for i in range(space.q)]
               for f in coeffs]
    for order in range(1, n + 1):
        for J in MultiIndex.all_of_order(space.q, order):
            i = max(idx for idx, e in enumerate(J.entries) if e > 0)
            Jp = J.decrement(i)
            for a in range(space.p):
                val = total_derivative(W[(a, Jp)], i, space)
                for al, X in enumerate(fields):
                    Q = _level_Q(space, prolongs[al].psi, X.xi, a, Jp)
                    val = val + dcoeffs[al][i] * Q
                W[(a, J)] = ex.normalize(val)
    defect = ProlongedField(space, (ex.ZERO,) * space.q, W, n, "raw")
    return Zn, defect, prolongs


@dataclass
class BracketDefect:
    F: tuple                 # involution coefficients for the pair
    gamma_direct: ProlongedField
    gamma_recursion: ProlongedField


def bracket_defect(fields, n, rng=None):
    """Per pair: [X_a^(n), X_b^(n)] = F_ab^g X_g^(n) + Gamma, with Gamma
    computed both as the direct difference and by the defect recursion."""
    fields = list(fields)
    rng = rng or random.Random(ex.DEFAULT_PROBE_SEED)
    space = fields[0].space
    inv = involution_coefficients(fields, rng)
    prolongs = [standard_prolong(X, n) for X in fields]
    out = {}
    zero_J = MultiIndex.zero(space.q)
    for (al, be), Fvec in sorted(inv.coefficients.items()):
        direct = commutator(prolongs[al], prolongs[be])
        mix = prolongs[0].scaled(Fvec[0])
        for g in range(1, len(fields)):
            mix = mix.plus(prolongs[g].scaled(Fvec[g]))
        gamma_direct = direct.minus(mix)
        dF = [[total_derivative(Fvec[g], i, space) for i in range(space.q)]
              for g in range(len(fields))]
        W = {(a, zero_J): ex.ZERO for a in range(space.p)}
        for order in range(1, n + 1):
            for J in MultiIndex.all_of_order(space.q, order):
                i = max(idx for idx, e in enumerate(J.entries) if e > 0)
                Jp = J.decrement(i)
                for a in range(space.p):
                    val = total_derivative(W[(a, Jp)], i, space)
                    for g, X in enumerate(fields):
                        Q = _level_Q(space, prolongs[g].psi, X.xi, a, Jp)
                        val = val + dF[g][i] * Q
                    W[(a, J)] = ex.normalize(val)
        gamma_rec = ProlongedField(space, (ex.ZERO,) * space.q, W, n, "raw")
        out[(al, be)] = BracketDefect(Fvec, gamma_direct, gamma_rec)
    return out
