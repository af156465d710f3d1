import math

import numpy as np
import pytest

from coercify import oracle
from coercify.assembly import assemble, rayleigh_quotient
from coercify.errors import InvalidArgumentError
from coercify.mesh import unit_mesh
from coercify.problems import builtin
from coercify.space import interpolate

from oracles import gauss01

PI2 = math.pi ** 2


@pytest.mark.parametrize("problem", ["poisson-ls", "poisson-ls-rescaled"])
def test_branch_residuals(problem):
    rows = oracle.branch_table(problem, 10)
    assert len(rows) == 200
    assert max(b.residual for b in rows) <= 1e-12


@pytest.mark.parametrize("problem", oracle.ANALYTIC_PROBLEMS)
def test_alpha_from_branches_matches_closed_form(problem):
    assert abs(oracle.alpha_from_branches(problem) - oracle.exact_alpha(problem).alpha) <= 1e-12


def test_reference_values():
    assert f"{oracle.exact_alpha('poisson-ls').alpha:.4g}" == "0.7603"
    assert round(oracle.exact_alpha("poisson-ls-rescaled").alpha, 3) == 0.936
    assert oracle.exact_alpha("adv-diff-2d").alpha == pytest.approx(0.97589, abs=5e-6)
    a = oracle.exact_alpha("ivp-ls").alpha
    assert a == pytest.approx(1 / (1 + math.e * math.sinh(1)), abs=1e-15)
    assert a == pytest.approx(0.2384058, abs=5e-8)
    assert oracle.exact_alpha("adv-diff-1d").alpha == pytest.approx(1 / (1 + 1 / PI2), abs=1e-15)
    assert oracle.exact_alpha("unit").alpha == 1.0


def test_standard_branch_by_substitution():
    # (q, u) = (c grad u_mn, u_mn) in K w = lam w reduces, per mode, to
    # c = (1 + beta) / (beta (1 - lam beta)) with lam the C-eigenvalue
    for m, n in [(1, 1), (1, 2), (3, 2), (5, 7)]:
        for b in oracle.standard_branches(m, n):
            beta, lam = b.beta, b.eigenvalue
            assert b.flux_multiplier == pytest.approx((1 + beta) / (beta * (1 - lam * beta)), rel=1e-10)
    plus = oracle.standard_branches(1, 1)[0]
    assert plus.flux_multiplier == pytest.approx(-0.2012, abs=5e-5)
    assert 1 / (1 + plus.eigenvalue) == pytest.approx(oracle.exact_alpha("poisson-ls").alpha, abs=1e-14)


def test_rescaled_branch_by_substitution():
    for m, n in [(1, 1), (2, 1), (4, 4)]:
        for b in oracle.rescaled_branches(m, n):
            beta, lam = b.beta, b.eigenvalue
            assert b.flux_multiplier == pytest.approx(
                (1 + beta) / (2 * beta * ((1 + beta) - lam * beta)), rel=1e-10)
    plus = oracle.rescaled_branches(1, 1)[0]
    assert plus.flux_multiplier == pytest.approx(-1.5083, abs=5e-5)
    assert 1 / plus.eigenvalue == pytest.approx(oracle.exact_alpha("poisson-ls-rescaled").alpha, abs=1e-14)


def test_stable_roots_for_large_modes():
    b = oracle.standard_branches(10, 10)[1]
    assert b.residual <= 1e-12
    assert b.eigenvalue < 0  # the minus branch of the standard quadratic is negative


def test_kinv_spectrum_and_errors():
    s = oracle.kinv_spectrum("adv-diff-2d", 3)
    assert s.min() == pytest.approx(oracle.exact_alpha("adv-diff-2d").alpha, abs=1e-15)
    assert np.all(s <= 1.0)
    with pytest.raises(InvalidArgumentError):
        oracle.kinv_spectrum("heat", 3)
    with pytest.raises(InvalidArgumentError):
        oracle.kinv_spectrum("unit", 0)
    with pytest.raises(InvalidArgumentError):
        oracle.branch_table("ivp-ls", 2)
    with pytest.raises(InvalidArgumentError):
        oracle.standard_branches(0, 1)
    with pytest.raises(InvalidArgumentError):
        oracle.exact_alpha("heat")
    with pytest.raises(InvalidArgumentError):
        oracle.exact_eigenfunction("heat")


def _v_norm_sq(ef):
    x, w = gauss01(30)
    if ef.dim == 1:
        return float(w @ (ef.scalar(x) ** 2 + ef.scalar_grad(x) ** 2))
    X, Y = np.meshgrid(x, x)
    W = np.outer(w, w)
    gx, gy = ef.scalar_grad(X, Y)
    total = ef.scalar(X, Y) ** 2 + gx ** 2 + gy ** 2
    if ef.flux is not None:
        qx, qy = ef.flux(X, Y)
        total = total + qx ** 2 + qy ** 2 + ef.flux_div(X, Y) ** 2
    return float(np.sum(W * total))


@pytest.mark.parametrize("problem", oracle.ANALYTIC_PROBLEMS)
def test_eigenfunctions_unit_norm(problem):
    ef = oracle.exact_eigenfunction(problem)
    assert _v_norm_sq(ef) == pytest.approx(1.0, abs=1e-13)
    assert len(ef.components()) == (2 if problem.startswith("poisson") else 1)
    assert oracle.exact_eigenfunction("unit") is None


def test_flux_divergence_consistent():
    ef = oracle.exact_eigenfunction("poisson-ls")
    x, y, h = 0.31, 0.62, 1e-5
    dq = (ef.flux(x + h, y)[0] - ef.flux(x - h, y)[0] + ef.flux(x, y + h)[1] - ef.flux(x, y - h)[1]) / (2 * h)
    assert dq == pytest.approx(ef.flux_div(x, y), rel=1e-7)


@pytest.mark.parametrize("problem,n", [
    ("ivp-ls", 64), ("adv-diff-1d", 64), ("adv-diff-2d", 16), ("poisson-ls", 16), ("poisson-ls-rescaled", 16),
])
def test_interpolated_eigenfunction_attains_alpha(problem, n):
    # the Rayleigh quotient of the interpolant approaches alpha from above
    p = builtin(problem)
    s = assemble(p, unit_mesh(p.dim, n), 1)
    x = interpolate(s.space, oracle.exact_eigenfunction(problem).components())
    rq = rayleigh_quotient(s, x)
    assert p.exact_alpha <= rq <= p.exact_alpha + 0.02
