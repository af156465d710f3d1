import json
import math

import numpy as np
import pytest

from coercify.assembly import assemble
from coercify.eigensolve import smallest_eigenpairs
from coercify.errors import InvalidArgumentError
from coercify.mesh import unit_mesh
from coercify.problems import builtin
from coercify.study import (
    CSV_COLUMNS,
    default_ladder,
    eigenfunction_error,
    observed_rates,
    plot_study,
    read_csv,
    run_study,
)


def test_observed_rates_power_laws():
    assert observed_rates([0.5, 0.25], [4e-3, 1e-3]) == [None, pytest.approx(2.0, abs=1e-14)]
    assert observed_rates([0.5, 0.25], [1e-2, 6.25e-4]) == [None, pytest.approx(4.0, abs=1e-14)]
    assert observed_rates([0.5, 0.25, 0.125], [1e-3, 1e-3, 1e-3]) == [None, 0.0, 0.0]


def test_observed_rates_undefined_for_nonpositive_errors():
    assert observed_rates([0.5, 0.25, 0.125], [1e-3, 0.0, -1e-12]) == [None, None, None]
    with pytest.raises(InvalidArgumentError):
        observed_rates([0.5], [1.0, 2.0])


def test_default_ladders():
    assert default_ladder(builtin("ivp-ls"), 2) == (8, 5)
    assert default_ladder(builtin("adv-diff-2d"), 1) == (4, 5)
    assert default_ladder(builtin("adv-diff-2d"), 2) == (4, 4)
    assert default_ladder(builtin("poisson-ls"), 1) == (4, 4)


@pytest.fixture(scope="module")
def ivp_p1():
    return run_study("ivp-ls", 1)


def test_ivp_p1_rates_and_monotonicity(ivp_p1):
    r = ivp_p1
    assert [lv.n for lv in r.levels] == [8, 16, 32, 64, 128]
    assert 1.8 <= r.final_rate <= 2.2
    assert r.monotone_from_above(1e-9) and r.nonincreasing(1e-10)
    assert all(lv.error > 0 for lv in r.levels)


def test_ivp_p1_eigenfunction_error_rate_about_one(ivp_p1):
    e = [lv.eigfn_error for lv in ivp_p1.levels]
    rates = observed_rates([lv.h for lv in ivp_p1.levels], e)
    # B-norm error of the eigenvector against the interpolant decays at least linearly
    assert all(q >= 0.9 for q in rates[1:])
    assert all(a > b for a, b in zip(e, e[1:]))


def test_unit_study_exact():
    r = run_study("unit", 2, n0=2, levels=3)
    for lv in r.levels:
        assert abs(lv.alpha_h - 1.0) <= 1e-10
        assert lv.eigfn_error is None
    assert r.rates[1:] == [None, None]


def test_adv_diff_2d_eigenfunction_error_decreases():
    p = builtin("adv-diff-2d")
    errs = []
    for n in (16, 32):
        s = assemble(p, unit_mesh(2, n), 1)
        errs.append(eigenfunction_error(s, smallest_eigenpairs(s.A_hat, s.B, k=1), p))
    assert errs[1] < errs[0]


def test_bad_study_arguments():
    with pytest.raises(InvalidArgumentError):
        run_study("ivp-ls", 1, levels=1)
    with pytest.raises(InvalidArgumentError):
        run_study("ivp-ls", 1, n0=0)
    with pytest.raises(InvalidArgumentError):
        run_study("heat", 1)


def test_level_errors_are_annotated():
    with pytest.raises(InvalidArgumentError, match="level 0"):
        run_study("poisson-ls", 2, n0=2, levels=2)


def test_csv_and_json_round_trip():
    r = run_study("adv-diff-1d", 1, n0=4, levels=3)
    text = r.to_csv()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    rows = read_csv(text)
    assert len(rows) == 3
    for row, lv in zip(rows, r.levels):
        assert row["alpha_h"] == lv.alpha_h
        assert row["ndof"] == lv.ndof
        assert row["seconds"] is None
    assert rows[0]["rate"] is None
    data = json.loads(r.to_json())
    assert data["problem"] == "adv-diff-1d" and len(data["levels"]) == 3
    assert data["levels"][2]["alpha_h"] == r.levels[2].alpha_h
    timed = read_csv(r.to_csv(timings=True))
    assert all(row["seconds"] > 0 for row in timed)


def test_threaded_study_matches_serial(monkeypatch):
    serial = run_study("adv-diff-2d", 1, n0=2, levels=3)
    monkeypatch.setenv("COERCIFY_THREADS", "3")
    threaded = run_study("adv-diff-2d", 1, n0=2, levels=3)
    assert serial.to_csv() == threaded.to_csv()
    monkeypatch.setenv("COERCIFY_THREADS", "lots")
    with pytest.raises(InvalidArgumentError):
        run_study("adv-diff-2d", 1, n0=2, levels=2)


def test_plot_is_deterministic_svg(tmp_path, ivp_p1):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    plot_study(ivp_p1, a)
    plot_study([ivp_p1], b)
    text = a.read_text()
    assert text.startswith("<?xml") and "<svg" in text
    assert "xlink:href=\"http" not in text
    assert a.read_bytes() == b.read_bytes()


def test_adv_diff_1d_constant_confirmed_on_fine_mesh():
    # the closed form is checked against a quartic-rate run, independent of the oracle module
    r = run_study("adv-diff-1d", 2, n0=16, levels=4)
    target = math.pi ** 2 / (1 + math.pi ** 2)
    assert abs(r.levels[-1].alpha_h - target) < 1e-10
    assert np.all(np.array(r.errors) > -1e-12)
