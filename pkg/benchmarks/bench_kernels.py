"""Compare the numba and pure-numpy kernels on representative inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--n 400]

Each kernel is run once to warm up (this triggers JIT compilation) and then
timed; the best of ``--repeat`` runs is reported. Outputs are checked for
agreement before timing.
"""
import argparse
import time

import numpy as np

from coercify.assembly import _operator_values, default_rule, trial_space
from coercify.kernels import implementations
from coercify.mesh import unit_mesh
from coercify.problems import builtin
from coercify.space import tabulate


def assembly_inputs(n):
    p = builtin("poisson-ls")
    mesh = unit_mesh(2, n)
    space = trial_space(p, mesh, 1)
    rule = default_rule(mesh, 1)
    tabs = [tabulate(s, rule.points) for s in space.components]
    offsets, cols, lo = [], [], 0
    for s, off in zip(space.components, space.offsets):
        offsets.append(lo)
        lo += s.nloc
        cd = s.cell_dofs
        cols.append(np.where(cd >= 0, cd + off, -1))
    dofs = np.ascontiguousarray(np.hstack(cols), dtype=np.int64)
    wdet = np.ascontiguousarray(tabs[0].detj[:, None] * rule.weights[None, :])
    lv = _operator_values(p.L, p, space, tabs, offsets, dofs.shape[1])
    return lv, lv, wdet, dofs


def spd_matrix(n, seed=0):
    rng = np.random.default_rng(seed)
    r = rng.standard_normal((n, n))
    return r.T @ r / n + np.eye(n)


def best_of(fn, repeat):
    fn()
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=300, help="dense matrix size")
    ap.add_argument("--mesh", type=int, default=32, help="triangle mesh subdivisions")
    args = ap.parse_args()

    impls = implementations()
    if "numba" not in impls:
        print("numba is not importable; only the numpy path can be timed")
    asm = assembly_inputs(args.mesh)
    c = spd_matrix(args.n)
    d, e, v = impls["numpy"].tridiagonalize(c)
    lam = np.sort(np.linalg.eigvalsh(c))[:3]
    starts = np.random.default_rng(1).uniform(-1, 1, (args.n, 3))
    tnorm = float(np.abs(d).max() + 2 * np.abs(e).max())
    y = impls["numpy"].inverse_iteration(d, e, lam, starts, tnorm, 50)

    cases = {
        "form_triplets": lambda m: m.form_triplets(*asm),
        "tridiagonalize": lambda m: m.tridiagonalize(c),
        "ql_eigenvalues": lambda m: m.ql_eigenvalues(d, e, 30),
        "inverse_iteration": lambda m: m.inverse_iteration(d, e, lam, starts, tnorm, 50),
        "apply_householder": lambda m: m.apply_householder(v, y),
    }

    ref = {name: fn(impls["numpy"]) for name, fn in cases.items()}
    if "numba" in impls:
        got = {name: fn(impls["numba"]) for name, fn in cases.items()}
        for name in cases:
            a, b = ref[name], got[name]
            a = a if isinstance(a, tuple) else (a,)
            b = b if isinstance(b, tuple) else (b,)
            for x, z in zip(a, b):
                if isinstance(x, np.ndarray) and x.shape != np.shape(z):
                    raise SystemExit(f"{name}: shape mismatch")
                diff = np.max(np.abs(np.sort(np.ravel(x)) - np.sort(np.ravel(z)))) if np.size(x) else 0.0
                scale = max(1.0, float(np.max(np.abs(x)))) if np.size(x) else 1.0
                if name != "inverse_iteration" and diff > 1e-10 * scale:
                    raise SystemExit(f"{name}: backends disagree by {diff:.3e}")

    print(f"{'kernel':<20}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, fn in cases.items():
        t_np = best_of(lambda: fn(impls["numpy"]), args.repeat)
        if "numba" in impls:
            t_nb = best_of(lambda: fn(impls["numba"]), args.repeat)
            print(f"{name:<20}{t_np:>12.4g}{t_nb:>12.4g}{t_np / t_nb:>10.1f}")
        else:
            print(f"{name:<20}{t_np:>12.4g}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
