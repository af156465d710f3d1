"""Convergence studies of the discrete coercivity constant over nested meshes."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import oracle
from .assembly import SymmetricSystem, assemble, rayleigh_quotient
from .eigensolve import EigResult, smallest_eigenpairs
from .errors import CoercifyError, ConvergenceError, InvalidArgumentError
from .mesh import unit_mesh
from .problems import ProblemSpec, load_problem
from .space import interpolate

CSV_COLUMNS = ("level", "h", "ndof", "alpha_h", "error", "rate", "eigfn_error", "seconds")


@dataclass
class LevelRecord:
    level: int
    n: int
    h: float
    ndof: int
    alpha_h: float
    error: float | None
    rate: float | None
    eigfn_error: float | None
    seconds: float
    eigenvalues: list = field(default_factory=list)


@dataclass
class StudyResult:
    problem: str
    degree: int
    alpha: float | None
    levels: list

    @property
    def errors(self):
        return [r.error for r in self.levels]

    @property
    def rates(self):
        return [r.rate for r in self.levels]

    @property
    def final_rate(self):
        return self.levels[-1].rate

    def monotone_from_above(self, tol: float = 1e-9) -> bool:
        return all(r.error is None or r.error >= -tol for r in self.levels)

    def nonincreasing(self, tol: float = 1e-10) -> bool:
        a = [r.alpha_h for r in self.levels]
        return all(a[i + 1] <= a[i] + tol for i in range(len(a) - 1))

    def to_dict(self, timings: bool = False) -> dict:
        rows = []
        for r in self.levels:
            d = asdict(r)
            if not timings:
                d["seconds"] = None
            rows.append(d)
        return {"problem": self.problem, "degree": self.degree, "alpha": self.alpha, "levels": rows}

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2) + "\n"

    def to_csv(self, timings: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.levels:
            w.writerow([
                r.level, _fmt(r.h), r.ndof, _fmt(r.alpha_h), _fmt(r.error), _fmt(r.rate),
                _fmt(r.eigfn_error), _fmt(r.seconds) if timings else "",
            ])
        return buf.getvalue()


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def read_csv(text: str) -> list:
    """Parse study CSV back into dicts of floats/ints (blank cells become None)."""
    rows = list(csv.DictReader(io.StringIO(text)))
    if rows and tuple(rows[0].keys()) != CSV_COLUMNS:
        raise InvalidArgumentError("unexpected CSV header")
    out = []
    for row in rows:
        rec = {}
        for k, v in row.items():
            if v == "":
                rec[k] = None
            elif k in ("level", "ndof"):
                rec[k] = int(v)
            else:
                rec[k] = float(v)
        out.append(rec)
    return out


def observed_rates(h, errors) -> list:
    """``ln(e_i/e_{i+1}) / ln(h_i/h_{i+1})``; ``None`` first and wherever an error is not positive."""
    if len(h) != len(errors):
        raise InvalidArgumentError("h and errors must have the same length")
    rates = [None]
    for i in range(len(h) - 1):
        e0, e1 = errors[i], errors[i + 1]
        if e0 is None or e1 is None or e0 <= 0.0 or e1 <= 0.0:
            rates.append(None)
        else:
            rates.append(math.log(e0 / e1) / math.log(h[i] / h[i + 1]))
    return rates


def default_ladder(problem: ProblemSpec, degree: int) -> tuple:
    """``(n0, levels)`` used when the caller does not choose."""
    if problem.dim == 1:
        return 8, 5
    if any(b.family == "rt0" for b in problem.blocks):
        return 4, 4
    return (4, 5) if degree == 1 else (4, 4)


def eigenfunction_error(system: SymmetricSystem, eig: EigResult, problem) -> float | None:
    """B-norm distance between the lowest eigenvector and the interpolated exact eigenfunction.

    Both are B-normalized and the sign is chosen to minimize the distance.
    ``None`` when no isolated exact eigenfunction is known.
    """
    name = problem if isinstance(problem, str) else problem.name
    if name not in oracle.ANALYTIC_PROBLEMS:
        return None
    exact = oracle.exact_eigenfunction(name)
    if exact is None:
        return None
    p = interpolate(system.space, exact.components())
    B = system.B
    p = p / math.sqrt(float(p @ (B @ p)))
    x = eig.eigenvectors[:, 0]
    x = x / math.sqrt(float(x @ (B @ x)))
    best = math.inf
    for s in (1.0, -1.0):
        d = x - s * p
        best = min(best, math.sqrt(max(float(d @ (B @ d)), 0.0)))
    return best


def _workers(levels: int) -> int:
    raw = os.environ.get("COERCIFY_THREADS")
    if raw is None:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidArgumentError(f"COERCIFY_THREADS must be an integer, got {raw!r}") from None
    if cap < 0:
        raise InvalidArgumentError("COERCIFY_THREADS must be >= 0")
    return max(1, min(cap, levels))


def _solve_level(spec, degree, level, n, k, tol):
    try:
        t0 = time.perf_counter()
        system = assemble(spec, unit_mesh(spec.dim, n), degree)
        eig = smallest_eigenpairs(system.A_hat, system.B, k=min(k, system.ndof), tol=tol)
        seconds = time.perf_counter() - t0
    except ConvergenceError as exc:
        raise ConvergenceError(f"level {level} (n={n}): {exc}", exc.diagnostics) from exc
    except CoercifyError as exc:
        raise type(exc)(f"level {level} (n={n}): {exc}") from exc
    return system, eig, seconds


def run_study(problem, degree: int = 1, n0: int | None = None, levels: int | None = None,
              k: int = 3, tol: float = 1e-10) -> StudyResult:
    """Solve on meshes ``n0, 2 n0, 4 n0, ...`` and compare with the exact constant."""
    spec = problem if isinstance(problem, ProblemSpec) else load_problem(problem)
    d_n0, d_levels = default_ladder(spec, degree)
    n0 = d_n0 if n0 is None else n0
    levels = d_levels if levels is None else levels
    if not isinstance(levels, (int, np.integer)) or levels < 2:
        raise InvalidArgumentError(f"a study needs at least 2 levels, got {levels!r}")
    if not isinstance(n0, (int, np.integer)) or n0 < 1:
        raise InvalidArgumentError(f"n0 must be a positive integer, got {n0!r}")
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    ns = [int(n0) * 2 ** i for i in range(levels)]

    jobs = list(enumerate(ns))
    workers = _workers(levels)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(lambda j: _solve_level(spec, degree, j[0], j[1], k, tol), jobs))
    else:
        outs = [_solve_level(spec, degree, i, n, k, tol) for i, n in jobs]

    alpha = spec.exact_alpha
    records = []
    for (i, n), (system, eig, seconds) in zip(jobs, outs):
        # cell-wise Rayleigh quotient of the computed eigenvector, see quadratic_forms
        a_h = rayleigh_quotient(system, eig.eigenvectors[:, 0])
        records.append(LevelRecord(
            level=i, n=n, h=system.h, ndof=system.ndof, alpha_h=a_h,
            error=None if alpha is None else a_h - alpha,
            rate=None,
            eigfn_error=eigenfunction_error(system, eig, spec),
            seconds=seconds,
            eigenvalues=[float(v) for v in eig.eigenvalues],
        ))
    rates = observed_rates([r.h for r in records], [r.error for r in records])
    for r, q in zip(records, rates):
        r.rate = q
    return StudyResult(spec.name, degree, alpha, records)


def plot_study(results, path) -> None:
    """Log-log SVG of error against h with slope-2 and slope-4 guide lines.

    ``results`` is one :class:`StudyResult` or a list of them.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if isinstance(results, StudyResult):
        results = [results]
    matplotlib.rcParams["svg.hashsalt"] = "coercify"
    matplotlib.rcParams["svg.fonttype"] = "path"
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    hs_all, es_all = [], []
    for res in results:
        pts = [(r.h, r.error) for r in res.levels if r.error is not None and r.error > 0.0]
        if not pts:
            continue
        hs, es = zip(*pts)
        hs_all.extend(hs)
        es_all.extend(es)
        ax.loglog(hs, es, "o-", label=f"{res.problem} P{res.degree}")
    if hs_all:
        h = np.array(sorted(set(hs_all)))
        anchor = max(es_all)
        for slope, style in ((2, "--"), (4, ":")):
            ax.loglog(h, anchor * (h / h.max()) ** slope, "k" + style, lw=0.8, label=f"slope {slope}")
    ax.set_xlabel("h")
    ax.set_ylabel(r"$\alpha_h - \alpha$")
    ax.grid(True, which="both", lw=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
