"""Gauge matrices: compatibility checks and the twisted/standard bridges.

gauge_to_mu sends an invertible matrix A to Lambda_i = A^{-1} D_i A,
gauge_to_sigma to sigma = A^{-1} D_x A.  The diagram verifiers check
that gauging a twisted prolongation reproduces the standard
prolongation of the gauged field, coefficient by coefficient.  The
inverse direction (solving for A given Lambda) is out of scope; a
residual diagnostic reports how far a candidate pair is from
D_i A = A Lambda_i.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import expr as ex
from .jet import total_derivative
from .prolong import (apply_gauge_set, apply_gauge_vertical, mu_prolong,
                      sigma_prolong, standard_prolong)
from .symcheck import VerdictReport


def _dmat(A, i, space):
    return A.map(lambda e: total_derivative(e, i, space))


def mc_defect(lams, space):
    """Horizontal Maurer-Cartan defects D_i L_j - D_j L_i + [L_i, L_j],
    one matrix per unordered pair i < j (empty for one variable).

    Any square size is accepted: the compatibility condition makes sense
    for matrix functions of any dimension, not only the fiber one."""
    lams = list(lams)
    if len(lams) != space.q:
        raise ValueError(f"need {space.q} matrices, got {len(lams)}")
    m0 = lams[0].rows
    for m in lams:
        if not m.is_square() or m.rows != m0:
            raise ValueError("Lambda matrices must be square, one size")
    out = []
    for i in range(space.q):
        for j in range(i + 1, space.q):
            defect = _dmat(lams[j], i, space) \
                .sub(_dmat(lams[i], j, space)) \
                .add(lams[i].mul(lams[j])) \
                .sub(lams[j].mul(lams[i]))
            out.append(((i, j), defect.map(ex.normalize)))
    return out


def gauge_to_mu(A, space, rng=None):
    """Lambda_i = A^{-1} (D_i A); satisfies Maurer-Cartan by construction."""
    Ainv = A.inverse(rng)
    return [Ainv.mul(_dmat(A, i, space)).map(ex.normalize)
            for i in range(space.q)]


def gauge_to_sigma(A, space, rng=None):
    """sigma = A^{-1} (D_x A); one independent variable only."""
    if space.q != 1:
        raise ValueError("gauge_to_sigma needs one independent variable")
    Ainv = A.inverse(rng)
    return Ainv.mul(_dmat(A, 0, space)).map(ex.normalize)


def lai_residual(A, lams, space):
    """Residual matrices D_i A - A Lambda_i for a candidate (A, Lambda)."""
    return [_dmat(A, i, space).sub(A.mul(lams[i])).map(ex.normalize)
            for i in range(space.q)]


@dataclass
class DiagramReport:
    report: VerdictReport
    twisted: object          # the twisted prolongation of the input
    gauged: object           # A applied to it
    gauged_field: object     # A applied to the base field
    standard: object         # standard prolongation of the gauged field
    difference: object       # gauged minus standard
    note: str = ""

    @property
    def commutes(self):
        return self.report.verdict == "proven"


def verify_mu_diagram(X, A, n, rng=None):
    """Check A(mu-prolong of X) = standard prolong of A(X) with
    Lambda = gauge_to_mu(A); exact for vertical (evolutionary) fields."""
    rng = rng or random.Random(ex.DEFAULT_PROBE_SEED)
    space = X.space
    lams = gauge_to_mu(A, space, rng)
    twisted = mu_prolong(X, n, lams, enforce_mc=False)
    gauged = apply_gauge_vertical(A, twisted)
    gauged_field = apply_gauge_vertical(A, X)
    std = standard_prolong(gauged_field, n)
    diff = gauged.minus(std)
    items = [(label, e) for label, e in diff.coefficients_with_labels()]
    note = ""
    if not X.is_vertical():
        note = ("input field is not vertical: the gauged twisted "
                "prolongation is expected not to match the standard one")
    report = VerdictReport.from_residuals(
        items, rng, provenance={"check": "mu-diagram", "order": n})
    return DiagramReport(report, twisted, gauged, gauged_field, std, diff,
                         note)


@dataclass
class SetDiagramReport:
    report: VerdictReport
    twisted: list
    gauged: list
    gauged_fields: list
    standard: list
    differences: list

    @property
    def commutes(self):
        return self.report.verdict == "proven"


def verify_sigma_diagram(fields, A, n, rng=None):
    """Check A(sigma-prolongs) = standard prolongs of A(fields) with
    sigma = gauge_to_sigma(A)."""
    rng = rng or random.Random(ex.DEFAULT_PROBE_SEED)
    fields = list(fields)
    space = fields[0].space
    sigma = gauge_to_sigma(A, space, rng)
    twisted = sigma_prolong(fields, n, sigma)
    gauged = apply_gauge_set(A, twisted)
    gauged_fields = apply_gauge_set(A, fields)
    std = [standard_prolong(W, n) for W in gauged_fields]
    diffs = [z.minus(s) for z, s in zip(gauged, std)]
    items = []
    for idx, d in enumerate(diffs):
        for label, e in d.coefficients_with_labels():
            items.append((f"field{idx + 1}.{label}", e))
    report = VerdictReport.from_residuals(
        items, rng, provenance={"check": "sigma-diagram", "order": n})
    return SetDiagramReport(report, twisted, gauged, gauged_fields, std,
                            diffs)
