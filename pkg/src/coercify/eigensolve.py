"""Smallest eigenpairs of a symmetric-definite pencil ``A x = mu B x``.

Two paths:

* dense (default below :data:`~coercify.assembly.DENSE_LIMIT`): Cholesky
  ``B = G G^T``, reduction to ``C = G^-1 A G^-T``, Householder
  tridiagonalization, implicit-shift QL for the eigenvalues and inverse
  iteration for the wanted eigenvectors, then back-transformation.
* sparse: ARPACK shift-invert Lanczos about zero (``scipy.sparse.linalg.eigsh``),
  valid because ``A`` is positive definite for coercive forms.

Both return B-orthonormal eigenvectors with Rayleigh-quotient eigenvalues and
relative residuals ``|A x - mu B x| / ((|A|_F + |mu| |B|_F) |x|)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_triangular

from . import kernels
from .errors import ConvergenceError, InvalidArgumentError, NotSPDError

MAX_ITER = 500
DENSE_LIMIT = 3000


@dataclass(frozen=True, eq=False)
class EigResult:
    eigenvalues: np.ndarray  # ascending, (k,)
    eigenvectors: np.ndarray  # (n, k), B-orthonormal columns
    residuals: np.ndarray  # (k,)
    diagnostics: dict = field(default_factory=dict)

    @property
    def alpha_h(self) -> float:
        return float(self.eigenvalues[0])


def _fro(m) -> float:
    if sp.issparse(m):
        return float(sp.linalg.norm(m))
    return float(np.linalg.norm(m))


def rayleigh_quotient(A, B, x) -> float:
    """``x^T A x / x^T B x``."""
    x = np.asarray(x, dtype=np.float64)
    if not np.any(x):
        raise InvalidArgumentError("Rayleigh quotient of the zero vector")
    return float(x @ (A @ x)) / float(x @ (B @ x))


def residuals(A, B, mu, X) -> np.ndarray:
    na, nb = _fro(A), _fro(B)
    R = A @ X - (B @ X) * mu[None, :]
    num = np.linalg.norm(R, axis=0)
    den = (na + np.abs(mu) * nb) * np.linalg.norm(X, axis=0)
    return num / np.where(den > 0.0, den, 1.0)


def _b_orthonormalize(B, X):
    """Modified Gram-Schmidt in the B inner product, two passes."""
    X = X.copy()
    for j in range(X.shape[1]):
        for _ in range(2):
            for i in range(j):
                X[:, j] -= (X[:, i] @ (B @ X[:, j])) * X[:, i]
        nrm = math.sqrt(max(float(X[:, j] @ (B @ X[:, j])), 0.0))
        if nrm == 0.0:
            raise ConvergenceError("eigenvector collapsed during B-orthonormalization")
        X[:, j] /= nrm
    return X


def _polish(A, B, X):
    X = _b_orthonormalize(B, X)
    mu = np.array([rayleigh_quotient(A, B, X[:, j]) for j in range(X.shape[1])])
    order = np.argsort(mu, kind="stable")
    return mu[order], X[:, order]


def _check_inputs(A, B, k):
    if A.ndim != 2 or A.shape[0] != A.shape[1] or B.shape != A.shape:
        raise InvalidArgumentError(f"A and B must be square and of equal shape, got {A.shape}, {B.shape}")
    n = A.shape[0]
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"k must lie in [1, {n}], got {k}")
    for name, m in (("A", A), ("B", B)):
        d = m - m.T
        if sp.issparse(m):
            asym = abs(d).max() if d.nnz else 0.0
            scale = abs(m).max() if m.nnz else 0.0
        else:
            asym, scale = np.abs(d).max(), np.abs(m).max()
        if not np.isfinite(scale):
            raise InvalidArgumentError(f"{name} has non-finite entries")
        if asym > 1e-12 * max(scale, 1e-300):
            raise InvalidArgumentError(f"{name} is not symmetric (max asymmetry {asym:.3e})")


def _dense(A, B, k, seed, max_iter):
    A = np.asarray(A.toarray() if sp.issparse(A) else A, dtype=np.float64)
    B = np.asarray(B.toarray() if sp.issparse(B) else B, dtype=np.float64)
    n = A.shape[0]
    try:
        G = np.linalg.cholesky(B)
    except np.linalg.LinAlgError:
        raise NotSPDError("Cholesky factorization of B failed; B is not positive definite") from None
    W = solve_triangular(G, A, lower=True, check_finite=False)
    C = solve_triangular(G, W.T, lower=True, check_finite=False)
    C = np.ascontiguousarray(0.5 * (C + C.T))

    d, e, vstore = kernels.tridiagonalize(C)
    lam, status = kernels.ql_eigenvalues(d, e, 30)
    if status < 0:
        raise ConvergenceError("implicit QL did not converge", {"n": n})
    lam = np.sort(lam)[:k]
    tnorm = float(np.max(np.abs(d)) + 2.0 * np.max(np.abs(e))) if n else 0.0
    rng = np.random.default_rng(seed)
    starts = np.ascontiguousarray(rng.uniform(-1.0, 1.0, size=(n, k)))
    y = kernels.inverse_iteration(d, e, np.ascontiguousarray(lam), starts, tnorm, max_iter)
    z = kernels.apply_householder(vstore, y)
    X = solve_triangular(G.T, z, lower=False, check_finite=False)
    mu, X = _polish(A, B, X)
    return mu, X, {"ql_sweeps": int(status), "tridiagonal_eigenvalues": lam}


def _sparse(A, B, k, seed, max_iter):
    from scipy.sparse.linalg import ArpackNoConvergence, eigsh

    A = sp.csc_matrix(A)
    B = sp.csc_matrix(B)
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    v0 = rng.uniform(0.5, 1.5, size=n)
    try:
        mu, X = eigsh(A, k=k, M=B, sigma=0.0, which="LM", v0=v0, maxiter=max_iter * k, tol=0.0)
    except ArpackNoConvergence as exc:
        raise ConvergenceError("shift-invert Lanczos did not converge",
                               {"converged": len(exc.eigenvalues)}) from None
    except RuntimeError as exc:
        # splu of a singular A, or ARPACK internal failure
        raise ConvergenceError(f"shift-invert Lanczos failed: {exc}") from None
    mu, X = _polish(A, B, X)
    return mu, X, {}


def smallest_eigenpairs(A, B, k: int = 3, tol: float = 1e-10, method: str = "auto",
                        seed: int = 0, max_iter: int = MAX_ITER) -> EigResult:
    """The ``k`` algebraically smallest eigenpairs of ``(A, B)``.

    ``method`` is ``"dense"``, ``"sparse"`` or ``"auto"`` (dense below 3000
    unknowns or for dense inputs). Every returned pair meets the relative
    residual bound ``tol``; otherwise the solve is restarted once from a
    perturbed start and then fails with :class:`ConvergenceError`.
    """
    if method not in ("auto", "dense", "sparse"):
        raise InvalidArgumentError(f"unknown method {method!r}")
    if not sp.issparse(A):
        A = np.asarray(A, dtype=np.float64)
    if not sp.issparse(B):
        B = np.asarray(B, dtype=np.float64)
    _check_inputs(A, B, k)
    n = A.shape[0]
    if method == "auto":
        method = "sparse" if (sp.issparse(A) and n >= DENSE_LIMIT) else "dense"
    if method == "sparse" and k >= n - 1:
        method = "dense"  # ARPACK needs k < n - 1

    solve = _dense if method == "dense" else _sparse
    diag = {"method": method, "backend": kernels.BACKEND, "n": n, "restarts": 0}
    last = None
    for attempt in range(2):
        try:
            mu, X, extra = solve(A, B, k, seed + 7919 * attempt, max_iter)
        except ConvergenceError as exc:
            last = exc
            diag["restarts"] = attempt + 1
            continue
        res = residuals(A, B, mu, X)
        diag.update(extra)
        if np.all(res <= tol):
            return EigResult(mu, X, res, diag)
        last = ConvergenceError(
            f"residual {res.max():.3e} exceeds tol {tol:.1e}", {**diag, "residuals": res})
        diag["restarts"] = attempt + 1
    diag["error"] = str(last)
    raise ConvergenceError(f"{method} eigensolve failed after one restart: {last}", diag)
