"""Discrete coercivity constants of variationally posed differential equations.

Typical use::

    from coercify import builtin, unit_mesh, assemble, smallest_eigenpairs

    problem = builtin("ivp-ls")
    system = assemble(problem, unit_mesh(1, 64), degree=1)
    alpha_h = smallest_eigenpairs(system.A_hat, system.B, k=1).alpha_h
"""
from .assembly import SymmetricSystem, apply_form, assemble, export_matrix_market, quadratic_forms
from .eigensolve import EigResult, rayleigh_quotient, smallest_eigenpairs
from .errors import (
    CoercifyError,
    ConvergenceError,
    InvalidArgumentError,
    NotSPDError,
    QuadratureError,
)
from .mesh import refine, uniform_interval_mesh, uniform_triangle_mesh, unit_mesh
from .oracle import alpha_from_branches, exact_alpha, exact_eigenfunction
from .problems import ProblemSpec, builtin, load_problem, validate
from .space import interpolate, lagrange_space, raviart_thomas_space
from .study import StudyResult, eigenfunction_error, observed_rates, run_study

__version__ = "0.1.0"

__all__ = [
    "CoercifyError", "ConvergenceError", "EigResult", "InvalidArgumentError", "NotSPDError",
    "ProblemSpec", "QuadratureError", "StudyResult", "SymmetricSystem", "alpha_from_branches",
    "apply_form", "assemble", "builtin", "eigenfunction_error", "exact_alpha",
    "exact_eigenfunction", "export_matrix_market", "interpolate", "lagrange_space",
    "load_problem", "observed_rates", "quadratic_forms", "raviart_thomas_space",
    "rayleigh_quotient", "refine", "run_study", "smallest_eigenpairs", "uniform_interval_mesh",
    "uniform_triangle_mesh", "unit_mesh", "validate",
]
