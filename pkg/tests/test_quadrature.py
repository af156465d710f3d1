import math

import numpy as np
import pytest

from coercify.errors import InvalidArgumentError
from coercify.quadrature import (
    gauss_interval,
    interval_rule,
    triangle_collapsed,
    triangle_degree4,
    triangle_rule,
)


def _tri_monomial(a, b):
    # integral of x^a y^b over the reference triangle
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


@pytest.mark.parametrize("npts", [1, 2, 3, 4, 6])
def test_gauss_interval_exactness(npts):
    rule = gauss_interval(npts)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-14)
    x = rule.points[:, 0]
    for k in range(2 * npts):
        assert rule.weights @ x ** k == pytest.approx(1.0 / (k + 1), abs=1e-14)


def test_interval_rule_covers_element_products():
    for p in (1, 2):
        assert interval_rule(p).degree >= 2 * p + 2


def test_triangle_degree4_weights_and_exactness():
    rule = triangle_degree4()
    assert np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(0.5, abs=1e-15)
    x, y = rule.points.T
    for a in range(5):
        for b in range(5 - a):
            assert rule.weights @ (x ** a * y ** b) == pytest.approx(_tri_monomial(a, b), abs=1e-15)
    # degree 5 is not integrated exactly
    assert abs(rule.weights @ x ** 5 - _tri_monomial(5, 0)) > 1e-8


def test_symmetric_rule_points_inside():
    x, y = triangle_degree4().points.T
    assert np.all(x > 0) and np.all(y > 0) and np.all(x + y < 1)


@pytest.mark.parametrize("npts", [2, 4, 5])
def test_collapsed_rule_exactness(npts):
    rule = triangle_collapsed(npts)
    x, y = rule.points.T
    for a in range(2 * npts + 1):
        for b in range(2 * npts + 1 - a):
            assert rule.weights @ (x ** a * y ** b) == pytest.approx(_tri_monomial(a, b), abs=1e-15)


def test_symmetric_matches_collapsed_reference():
    f = lambda x, y: (1 + x - 2 * y) ** 2 * (x + 3 * y) ** 2  # noqa: E731
    r4, rc = triangle_degree4(), triangle_collapsed(4)
    assert r4.weights @ f(*r4.points.T) == pytest.approx(rc.weights @ f(*rc.points.T), abs=1e-15)


def test_triangle_rule_selection():
    assert triangle_rule(4).degree == 4
    assert triangle_rule(7).degree >= 7


def test_bad_point_count():
    with pytest.raises(InvalidArgumentError):
        gauss_interval(0)
