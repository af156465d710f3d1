"""Global assembly of the symmetrized form matrix and the V Gram matrix.

For a problem ``a(u, v) = (L u, M v)_Y`` the discrete pencil is

    A_hat[i, j] = 1/2 (L phi_j, M phi_i)_Y + 1/2 (M phi_j, L phi_i)_Y
    B[i, j]     = (phi_j, phi_i)_V

Element matrices are symmetrized before they leave the kernel, and the global
reduction sums duplicates in a fixed order, so both matrices are exactly
symmetric and repeated assembly is bit-identical. Dirichlet DOFs never enter
the numbering.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import InvalidArgumentError, QuadratureError
from .mesh import Mesh1D, Mesh2D
from .problems import ProblemSpec, validate
from .quadrature import QuadratureRule, gauss_interval, interval_rule, triangle_rule
from .space import ProductSpace, lagrange_space, raviart_thomas_space, tabulate

DENSE_LIMIT = 3000


@dataclass(frozen=True, eq=False)
class SymmetricSystem:
    A_hat: np.ndarray | sp.csr_matrix
    B: np.ndarray | sp.csr_matrix
    ndof: int
    problem: str
    h: float
    space: ProductSpace
    degree: int
    spec: ProblemSpec
    # (L values, M values, norm values, local dofs, weights) at quadrature points
    quad: tuple | None = None

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.A_hat)

    def dense(self):
        """``(A_hat, B)`` as dense arrays."""
        if self.is_sparse:
            return self.A_hat.toarray(), self.B.toarray()
        return self.A_hat, self.B


def supported_degrees(problem: ProblemSpec) -> tuple:
    if any(b.family == "rt0" for b in problem.blocks):
        return (1,)
    return (1, 2)


def trial_space(problem: ProblemSpec, mesh, degree: int) -> ProductSpace:
    spaces = []
    for b in problem.blocks:
        if b.family == "rt0":
            spaces.append(raviart_thomas_space(mesh))
        else:
            spaces.append(lagrange_space(mesh, degree, b.bc))
    return ProductSpace.of(*spaces)


def _term_degree(term, block, space, advection) -> int:
    """Polynomial degree of a term applied to one basis function."""
    if block.family == "rt0":
        return 1 if term.kind == "identity" else 0
    p = space.degree
    if term.kind == "identity":
        return p
    if term.kind == "advective":
        return p - 1 + (0 if advection.is_constant else 1)
    return p - 1


def _operator_degree(comp, problem, space) -> int:
    return max(
        _term_degree(t, problem.blocks[t.block], space.components[t.block], problem.advection)
        for t in comp.terms
    )


def required_degree(problem: ProblemSpec, space: ProductSpace) -> int:
    """Highest polynomial degree among the integrands of both forms."""
    deg = 0
    for left, right in ((problem.L, problem.M), (problem.norm, problem.norm)):
        for cl, cr in zip(left, right):
            deg = max(deg, _operator_degree(cl, problem, space) + _operator_degree(cr, problem, space))
    return deg


def default_rule(mesh, degree: int) -> QuadratureRule:
    if mesh.dim == 1:
        return interval_rule(degree)
    return triangle_rule(4)


def _component_width(comp, dim) -> int:
    return 1 if comp.value == "scalar" else dim


def _term_values(term, block, tab, advection, dim):
    """(nc, nloc, nq, width) values of a term on every local basis function."""
    if term.kind == "identity":
        out = tab.values
    elif term.kind in ("ddx", "div"):
        out = tab.derivs[..., :1]
    elif term.kind == "grad":
        out = tab.derivs
    else:  # advective
        b = advection(tab.points)  # (nc, nq, dim)
        out = np.einsum("clqd,cqd->clq", tab.derivs, b)[..., None]
    return out if term.multiplier == 1.0 else term.multiplier * out


def _operator_values(op, problem, space, tabs, offsets, nloc_total):
    dim = problem.dim
    nc, nq = tabs[0].values.shape[0], tabs[0].values.shape[2]
    widths = [_component_width(c, dim) for c in op]
    out = np.zeros((nc, nloc_total, nq, sum(widths)))
    col = 0
    for comp, w in zip(op, widths):
        for t in comp.terms:
            blk = problem.blocks[t.block]
            vals = _term_values(t, blk, tabs[t.block], problem.advection, dim)
            lo = offsets[t.block]
            out[:, lo:lo + vals.shape[1], :, col:col + w] += vals
        col += w
    return out


def _reduce(rows, cols, vals, ndof, dense):
    keys = rows * ndof + cols
    uniq, inverse = np.unique(keys, return_inverse=True)
    data = np.bincount(inverse, weights=vals, minlength=uniq.size)
    r = uniq // ndof
    c = uniq % ndof
    if dense:
        mat = np.zeros((ndof, ndof))
        mat[r, c] = data
        return mat
    indptr = np.zeros(ndof + 1, dtype=np.int64)
    np.cumsum(np.bincount(r, minlength=ndof), out=indptr[1:])
    return sp.csr_matrix((data, c, indptr), shape=(ndof, ndof))


def _is_exactly_symmetric(mat) -> bool:
    if sp.issparse(mat):
        return (mat != mat.T).nnz == 0
    return bool(np.array_equal(mat, mat.T))


def _pair_matrix(lv, mv, dofs, wdet, ndof, dense):
    rows, cols, vals = kernels.form_triplets(lv, mv, wdet, dofs)
    return _reduce(rows, cols, vals, ndof, dense)


def assemble_unchecked(problem: ProblemSpec, mesh, degree: int = 1,
                       rule: QuadratureRule | None = None,
                       storage: str = "auto") -> SymmetricSystem:
    """Assemble without running :func:`validate` (used by validate itself)."""
    if mesh.dim != problem.dim:
        raise InvalidArgumentError(
            f"problem {problem.name!r} is {problem.dim}D but the mesh is {mesh.dim}D")
    if degree not in supported_degrees(problem):
        raise InvalidArgumentError(
            f"degree {degree} is not supported for {problem.name!r}; "
            f"choose from {supported_degrees(problem)}")
    if storage not in ("auto", "dense", "sparse"):
        raise InvalidArgumentError(f"unknown storage {storage!r}")
    space = trial_space(problem, mesh, degree)
    if rule is None:
        rule = default_rule(mesh, degree)
    need = required_degree(problem, space)
    if need > rule.degree:
        raise QuadratureError(
            f"integrands of degree {need} exceed the quadrature exactness {rule.degree}")

    tabs = [tabulate(s, rule.points) for s in space.components]
    offsets, dof_cols, lo = [], [], 0
    for s, off in zip(space.components, space.offsets):
        offsets.append(lo)
        lo += s.nloc
        cd = s.cell_dofs
        dof_cols.append(np.where(cd >= 0, cd + off, -1))
    dofs = np.ascontiguousarray(np.hstack(dof_cols), dtype=np.int64)
    wdet = np.ascontiguousarray(tabs[0].detj[:, None] * rule.weights[None, :])

    ndof = space.ndof
    dense = storage == "dense" or (storage == "auto" and ndof < DENSE_LIMIT)
    nloc = dofs.shape[1]
    lv = _operator_values(problem.L, problem, space, tabs, offsets, nloc)
    mv = lv if problem.M == problem.L else _operator_values(problem.M, problem, space, tabs, offsets, nloc)
    nv = _operator_values(problem.norm, problem, space, tabs, offsets, nloc)
    a_hat = _pair_matrix(lv, mv, dofs, wdet, ndof, dense)
    b = _pair_matrix(nv, nv, dofs, wdet, ndof, dense)
    for name, mat in (("A_hat", a_hat), ("B", b)):
        if not _is_exactly_symmetric(mat):  # pragma: no cover - guaranteed by the kernel
            raise AssertionError(f"assembled {name} is not exactly symmetric")
    return SymmetricSystem(a_hat, b, ndof, problem.name, mesh.h, space, degree, problem,
                           quad=(lv, mv, nv, dofs, wdet))


def assemble(problem: ProblemSpec, mesh: Mesh1D | Mesh2D, degree: int = 1,
             rule: QuadratureRule | None = None, storage: str = "auto") -> SymmetricSystem:
    """Assemble ``(A_hat, B)`` for ``problem`` on ``mesh`` with degree-``degree`` elements.

    Raises :class:`InvalidArgumentError` if the problem does not validate or
    does not match the mesh, and :class:`QuadratureError` if ``rule`` is not
    exact for the integrands.
    """
    issues = validate(problem)
    if issues:
        raise InvalidArgumentError(f"problem {problem.name!r} is invalid: " + "; ".join(issues))
    return assemble_unchecked(problem, mesh, degree, rule, storage)


def refined_rule(mesh, degree: int) -> QuadratureRule:
    """A rule of roughly double the default exactness, for consistency checks."""
    if mesh.dim == 1:
        return gauss_interval(2 * (degree + 2))
    return triangle_rule(8)


def quadratic_forms(system: SymmetricSystem, X):
    """``(a(u, u), |u|_V^2)`` for each column of ``X``, summed cell by cell.

    Evaluating the operators at quadrature points avoids the cancellation in
    ``x^T A x`` with assembled entries, which otherwise limits the attainable
    accuracy of a Rayleigh quotient to roughly ``eps * |x|^T |A| |x|``.
    """
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[:, None]
    if X.shape[0] != system.ndof:
        raise InvalidArgumentError(f"vectors must have length {system.ndof}, got {X.shape[0]}")
    lv, mv, nv, dofs, wdet = system.quad
    local = np.where(dofs[:, :, None] >= 0, X[np.maximum(dofs, 0)], 0.0)  # (nc, nloc, m)
    lu = np.einsum("clqy,clm->mcqy", lv, local)
    mu = lu if mv is lv else np.einsum("clqy,clm->mcqy", mv, local)
    nu = np.einsum("clqy,clm->mcqy", nv, local)
    a = np.einsum("cq,mcqy,mcqy->m", wdet, lu, mu)
    b = np.einsum("cq,mcqy,mcqy->m", wdet, nu, nu)
    if single:
        return float(a[0]), float(b[0])
    return a, b


def rayleigh_quotient(system: SymmetricSystem, x) -> float:
    """``a(u, u) / |u|_V^2`` for the discrete function with coefficients ``x``."""
    a, b = quadratic_forms(system, x)
    if b == 0.0:
        raise InvalidArgumentError("Rayleigh quotient of the zero function")
    return a / b


def apply_form(system: SymmetricSystem, x, y) -> float:
    """``x^T A_hat y``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != (system.ndof,) or y.shape != (system.ndof,):
        raise InvalidArgumentError(
            f"vectors must have length {system.ndof}, got {x.shape} and {y.shape}")
    return float(x @ (system.A_hat @ y))


def export_matrix_market(system: SymmetricSystem, prefix) -> tuple:
    """Write ``<prefix>_A.mtx`` and ``<prefix>_B.mtx``; return the two paths."""
    from scipy.io import mmwrite

    paths = []
    for tag, mat in (("A", system.A_hat), ("B", system.B)):
        path = f"{prefix}_{tag}.mtx"
        mmwrite(path, sp.coo_matrix(mat), field="real", symmetry="symmetric",
                comment=f"{system.problem} {tag} ndof={system.ndof} h={system.h!r}")
        paths.append(path)
    return tuple(paths)

