"""jetsym: exact twisted-prolongation toolkit for jet-space symmetry analysis."""

from .expr import (Assignment, EvalDomainError, Expr, ExprError,
                   MissingSymbolsError, Symbol, canonically_equal, diff,
                   eval_numeric, is_zero, normalize, render, subst)
from .jet import (ContactForm, JetSpace, MultiIndex, Section, contact_forms,
                  prolong_section, total_derivative)
from .matrix import MatrixExpr, SingularMatrixError
from .parser import ParseError, parse
from .prolong import (TwistSpec, apply_gauge_set, apply_gauge_vertical,
                      bracket_defect, lambda_prolong, mu_prolong,
                      prolong_combination, sigma_prolong, standard_prolong)
from .symcheck import (DiffSystem, SolvedFormError, VerdictReport,
                       characteristic_defect, compare_on_invariant_sections,
                       is_invariant_section, is_solution, is_symmetry,
                       restrict, same_distribution)
from .invariants import InvariantChain, ibdp_next, is_invariant, verify_chain
from .twist import (gauge_to_mu, gauge_to_sigma, lai_residual, mc_defect,
                    verify_mu_diagram, verify_sigma_diagram)
from .vfield import (InvolutionError, ProlongedField, VectorField,
                     commutator, evolutionary_rep, involution_coefficients,
                     is_evolutionary_rep, is_lie_algebra)

__version__ = "0.1.0"
