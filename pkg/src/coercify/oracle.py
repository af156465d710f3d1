"""Closed-form coercivity constants, spectral branches and eigenfunctions.

Every built-in problem has a solution operator ``K`` whose inverse has a
computable spectrum; the coercivity constant is its infimum. These values are
ground truth for the convergence studies.

Laplacian modes on the unit square are ``beta_mn = (m**2 + n**2) * pi**2``
with eigenfunctions ``sin(m pi x) sin(n pi y)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError

PI2 = math.pi ** 2
ANALYTIC_PROBLEMS = ("ivp-ls", "adv-diff-1d", "adv-diff-2d", "poisson-ls", "poisson-ls-rescaled")
KNOWN_PROBLEMS = ANALYTIC_PROBLEMS + ("unit",)


@dataclass(frozen=True)
class SpectralBranch:
    """One root of a per-mode quadratic ``a*lam**2 + b*lam + c = 0``.

    ``eigenvalue`` is the root itself: an eigenvalue of ``C`` for the standard
    Poisson pair (``K = I + C``), an eigenvalue of ``K`` for the rescaled one.
    ``kinv_eigenvalue`` is the matching eigenvalue of ``K^-1``; the
    eigenfunction is ``(flux_multiplier * grad u_mn, u_mn)``.
    """

    modes: tuple
    sign: int
    beta: float
    eigenvalue: float
    kinv_eigenvalue: float
    flux_multiplier: float
    coefficients: tuple

    @property
    def residual(self) -> float:
        a, b, c = self.coefficients
        lam = self.eigenvalue
        return abs((a * lam + b) * lam + c) / abs(a)


@dataclass(frozen=True)
class ExactConstant:
    problem: str
    alpha: float
    eigenfunction: str
    provenance: str


def laplace_eigenvalue(m: int, n: int) -> float:
    return (m * m + n * n) * PI2


def _stable_roots(a, b, c):
    """Both real roots, larger first, without cancellation."""
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise ArithmeticError("complex roots")
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    r1, r2 = q / a, c / q
    return (r1, r2) if r1 >= r2 else (r2, r1)


def _check_modes(m, n):
    if m < 1 or n < 1:
        raise InvalidArgumentError("mode indices start at 1")


def standard_branches(m: int, n: int):
    """``(plus, minus)`` branches of ``beta^2 lam^2 - (1 + 3 beta) lam - beta = 0``."""
    _check_modes(m, n)
    beta = laplace_eigenvalue(m, n)
    coeffs = (beta * beta, -(1.0 + 3.0 * beta), -beta)
    s = math.sqrt(1.0 + 4.0 * beta)
    out = []
    for sign, lam in zip((1, -1), _stable_roots(*coeffs)):
        out.append(SpectralBranch(
            modes=(m, n), sign=sign, beta=beta, eigenvalue=lam,
            kinv_eigenvalue=1.0 / (1.0 + lam),
            flux_multiplier=-2.0 / (1.0 + sign * s),
            coefficients=coeffs,
        ))
    return tuple(out)


def rescaled_branches(m: int, n: int):
    """``(plus, minus)`` branches of ``4 beta^2 lam^2 - (1+beta)(1+5 beta) lam + (1+beta)^2 = 0``."""
    _check_modes(m, n)
    beta = laplace_eigenvalue(m, n)
    coeffs = (4.0 * beta * beta, -(1.0 + beta) * (1.0 + 5.0 * beta), (1.0 + beta) ** 2)
    out = []
    for sign, lam in zip((1, -1), _stable_roots(*coeffs)):
        out.append(SpectralBranch(
            modes=(m, n), sign=sign, beta=beta, eigenvalue=lam,
            kinv_eigenvalue=1.0 / lam,
            flux_multiplier=2.0 * lam / ((1.0 + beta) * (1.0 - lam)),
            coefficients=coeffs,
        ))
    return tuple(out)


def branch_table(problem: str, max_mode: int):
    """All branches with ``1 <= m, n <= max_mode`` for the Poisson pair."""
    if problem == "poisson-ls":
        fn = standard_branches
    elif problem == "poisson-ls-rescaled":
        fn = rescaled_branches
    else:
        raise InvalidArgumentError(f"{problem!r} has no branch table")
    rows = []
    for m in range(1, max_mode + 1):
        for n in range(1, max_mode + 1):
            rows.extend(fn(m, n))
    return rows


def kinv_spectrum(problem: str, max_mode: int) -> np.ndarray:
    """Enumerated eigenvalues of ``K^-1`` (unsorted, without repeats of 1)."""
    if max_mode < 1:
        raise InvalidArgumentError("max_mode must be >= 1")
    if problem in ("poisson-ls", "poisson-ls-rescaled"):
        vals = [b.kinv_eigenvalue for b in branch_table(problem, max_mode)]
        return np.array(vals + [1.0])
    if problem == "adv-diff-2d":
        # C = (1/2)(-Laplace + 1/2)^-1 has eigenvalues 1/(1 + 2 beta)
        vals = []
        for m in range(1, max_mode + 1):
            for n in range(1, max_mode + 1):
                lam = 1.0 / (1.0 + 2.0 * laplace_eigenvalue(m, n))
                vals.append(1.0 / (1.0 + lam))
        return np.array(vals)
    if problem == "adv-diff-1d":
        # C = (-d^2/dx^2)^-1 on H^1_0 has eigenvalues 1/(k pi)^2
        k = np.arange(1, max_mode + 1, dtype=np.float64)
        return 1.0 / (1.0 + 1.0 / (k * k * PI2))
    if problem == "ivp-ls":
        # C u = e u(1) sinh(x): rank one, nonzero eigenvalue e sinh(1)
        return np.array([1.0, 1.0 / (1.0 + math.e * math.sinh(1.0))])
    if problem == "unit":
        return np.array([1.0])
    raise InvalidArgumentError(f"unknown problem {problem!r}")


def alpha_from_branches(problem: str, max_mode: int = 10) -> float:
    """Coercivity constant as the minimum of the enumerated ``K^-1`` spectrum."""
    return float(min(1.0, kinv_spectrum(problem, max_mode).min()))


def exact_alpha(problem: str) -> ExactConstant:
    if problem == "ivp-ls":
        return ExactConstant(problem, 1.0 - math.tanh(1.0), "span{sinh(x)}",
                             "1/(1 + e sinh 1) = 1 - tanh 1")
    if problem == "adv-diff-1d":
        return ExactConstant(problem, PI2 / (1.0 + PI2), "span{sin(pi x)}",
                             "derived: C = (-d2/dx2)^-1, alpha = 1/(1 + 1/pi^2)")
    if problem == "adv-diff-2d":
        return ExactConstant(problem, (1.0 + 4.0 * PI2) / (2.0 + 4.0 * PI2),
                             "span{sin(pi x) sin(pi y)}", "(1 + 4 pi^2)/(2 + 4 pi^2)")
    if problem == "poisson-ls":
        beta = 2.0 * PI2
        alpha = (1.0 + 2.0 * beta - math.sqrt(1.0 + 4.0 * beta)) / (2.0 * (1.0 + beta))
        return ExactConstant(problem, alpha,
                             "span{(c grad u, u)}, u = sin(pi x) sin(pi y), c = -2/(1 + sqrt(1 + 4 beta))",
                             "(1 + 2 beta - sqrt(1 + 4 beta))/(2(1 + beta)), beta = 2 pi^2")
    if problem == "poisson-ls-rescaled":
        beta = 2.0 * PI2
        alpha = (1.0 + 5.0 * beta - math.sqrt((1.0 + beta) * (1.0 + 9.0 * beta))) / (2.0 * (1.0 + beta))
        return ExactConstant(problem, alpha,
                             "span{(c grad u, u)}, u = sin(pi x) sin(pi y), c = 2 lam/((1 + beta)(1 - lam)), lam = 1/alpha",
                             "(1 + 5 beta - sqrt((1 + beta)(1 + 9 beta)))/(2(1 + beta)), beta = 2 pi^2")
    if problem == "unit":
        return ExactConstant(problem, 1.0, "all of V", "a(u, u) = |u|_V^2")
    raise InvalidArgumentError(f"unknown problem {problem!r}")


# ---------------------------------------------------------------- eigenfunctions

@dataclass(frozen=True)
class ExactEigenfunction:
    """V-normalized eigenfunction of the coercivity eigenvalue.

    ``scalar``/``scalar_grad`` describe the H^1 part; ``flux``/``flux_div``
    the H(div) part when the problem has one. Callables take coordinate arrays
    and return arrays (vector fields as a pair of arrays).
    """

    problem: str
    dim: int
    scale: float
    scalar: Callable
    scalar_grad: Callable
    flux: Callable | None = None
    flux_div: Callable | None = None
    flux_multiplier: float | None = None

    def components(self):
        """Functions in trial-space block order."""
        if self.flux is None:
            return (self.scalar,)
        return (self.flux, self.scalar)


def _gauss01(npts):
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


def _v_norm(dim, u, du, q=None, divq=None):
    x, w = _gauss01(40)
    if dim == 1:
        total = w @ (u(x) ** 2 + du(x) ** 2)
    else:
        xx, yy = np.meshgrid(x, x, indexing="ij")
        ww = np.outer(w, w)
        gx, gy = du(xx, yy)
        dens = u(xx, yy) ** 2 + gx ** 2 + gy ** 2
        if q is not None:
            qx, qy = q(xx, yy)
            dens = dens + qx ** 2 + qy ** 2 + divq(xx, yy) ** 2
        total = np.sum(ww * dens)
    return math.sqrt(total)


def exact_eigenfunction(problem: str) -> ExactEigenfunction | None:
    """Eigenfunction for ``alpha``, normalized by quadrature; ``None`` for ``unit``."""
    if problem == "unit":
        return None
    if problem in ("ivp-ls", "adv-diff-1d"):
        if problem == "ivp-ls":
            f, df = np.sinh, np.cosh
        else:
            f = lambda x: np.sin(math.pi * x)  # noqa: E731
            df = lambda x: math.pi * np.cos(math.pi * x)  # noqa: E731
        s = 1.0 / _v_norm(1, f, df)
        return ExactEigenfunction(problem, 1, s, lambda x: s * f(x), lambda x: s * df(x))

    def u(x, y):
        return np.sin(math.pi * x) * np.sin(math.pi * y)

    def du(x, y):
        return (math.pi * np.cos(math.pi * x) * np.sin(math.pi * y),
                math.pi * np.sin(math.pi * x) * np.cos(math.pi * y))

    if problem == "adv-diff-2d":
        s = 1.0 / _v_norm(2, u, du)
        return ExactEigenfunction(problem, 2, s, lambda x, y: s * u(x, y),
                                  lambda x, y: tuple(s * g for g in du(x, y)))
    if problem in ("poisson-ls", "poisson-ls-rescaled"):
        fn = standard_branches if problem == "poisson-ls" else rescaled_branches
        c = fn(1, 1)[0].flux_multiplier

        def q(x, y):
            gx, gy = du(x, y)
            return c * gx, c * gy

        def divq(x, y):
            return -2.0 * PI2 * c * u(x, y)

        s = 1.0 / _v_norm(2, u, du, q, divq)
        return ExactEigenfunction(
            problem, 2, s,
            scalar=lambda x, y: s * u(x, y),
            scalar_grad=lambda x, y: tuple(s * g for g in du(x, y)),
            flux=lambda x, y: tuple(s * g for g in q(x, y)),
            flux_div=lambda x, y: s * divq(x, y),
            flux_multiplier=c,
        )
    raise InvalidArgumentError(f"unknown problem {problem!r}")
