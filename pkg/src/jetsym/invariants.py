"""Differential invariants: verification and differentiation chains.

Invariant generation (solving the characteristic system) is out of
scope; chains come from the user or from extending known invariants by
the quotient-of-total-derivatives step, and only invariance is checked.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import expr as ex
from .jet import total_derivative
from .symcheck import VerdictReport
from .vfield import jet_order


def is_invariant(e, P, rng=None):
    """Apply P as a derivation and test the result for zero."""
    e = ex._coerce(e)
    if jet_order(e, P.space) > P.order:
        raise ValueError("expression order exceeds the prolongation order")
    return ex.is_zero(P.apply(e), rng)


def ibdp_next(zeta, eta, space, rng=None):
    """Next-order candidate D_x zeta / D_x eta (one independent variable)."""
    if space.q != 1:
        raise ValueError("invariant chains need one independent variable")
    zeta = ex._coerce(zeta)
    eta = ex._coerce(eta)
    d_eta = total_derivative(eta, 0, space)
    if ex.is_zero(d_eta, rng) == ex.PROVEN_ZERO:
        raise ex.ExprError("base invariant has zero total derivative")
    return ex.normalize(total_derivative(zeta, 0, space) / d_eta)


@dataclass
class InvariantChain:
    """Invariants grouped by jet order: levels[k] lists the order-k entries."""

    space: object
    levels: list                      # list of lists of Expr
    provenance: str = "user-supplied"

    def __post_init__(self):
        norm = []
        for k, entries in enumerate(self.levels):
            row = []
            for e in entries:
                e = ex.normalize(ex._coerce(e))
                got = jet_order(e, self.space)
                if got != k:
                    raise ValueError(
                        f"chain entry {ex.render(e)} has jet order {got}, "
                        f"expected {k}")
                row.append(e)
            norm.append(row)
        self.levels = norm

    @property
    def max_order(self):
        return len(self.levels) - 1


def extend_chain(chain, rng=None):
    """One differentiation step on every top-level entry, first base."""
    space = chain.space
    etas = [e for e in chain.levels[0]]
    base = None
    for eta in etas:
        if ex.is_zero(total_derivative(eta, 0, space), rng) != ex.PROVEN_ZERO:
            base = eta
            break
    if base is None:
        raise ex.ExprError("no usable order-0 invariant to differentiate by")
    new = [ibdp_next(z, base, space, rng) for z in chain.levels[-1]]
    return InvariantChain(space, chain.levels + [new], "ibdp-generated")


def verify_chain(chain, P, rng=None):
    """Invariance of every entry, plus the differentiation diagnostic.

    The diagnostic takes every order-0 entry with a nonzero total
    derivative as a base and differentiates every entry one order below
    the chain top; it holds when every quotient is again invariant.  A
    twisted prolongation that is not a plain rescaling of a standard one
    is expected to fail it.
    """
    rng = rng or random.Random(ex.DEFAULT_PROBE_SEED)
    if chain.max_order > P.order:
        raise ValueError("chain order exceeds the prolongation order")
    items = []
    for k, entries in enumerate(chain.levels):
        for e in entries:
            verdict = is_invariant(e, P, rng)
            items.append((f"order{k}: {ex.render(e)}", P.apply(e)))
    report = VerdictReport.from_residuals(
        items, rng, provenance={"check": "invariant-chain"})
    diagnostic = []
    holds = True
    if chain.space.q == 1:
        bases = []
        for eta in chain.levels[0]:
            if ex.is_zero(total_derivative(eta, 0, chain.space),
                          rng) != ex.PROVEN_ZERO:
                bases.append(eta)
        for eta in bases:
            for k in range(chain.max_order):
                if k + 1 > P.order:
                    continue
                for z in chain.levels[k]:
                    if ex.canonically_equal(z, eta):
                        continue
                    out = ibdp_next(z, eta, chain.space, rng)
                    verdict = is_invariant(out, P, rng)
                    ok = verdict == ex.PROVEN_ZERO
                    holds = holds and ok
                    diagnostic.append({
                        "eta": ex.render(eta),
                        "zeta": ex.render(z),
                        "output": ex.render(out),
                        "invariant": verdict,
                    })
    report.provenance["ibdp_diagnostic"] = diagnostic
    report.provenance["ibdp_holds"] = holds
    return report
