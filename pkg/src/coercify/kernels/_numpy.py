"""Pure-numpy fallbacks for the kernels in :mod:`._numba`.

Assembly, tridiagonalization and the back-transform are vectorized. The QL
sweep and the tridiagonal solves are inherently sequential and run as plain
Python loops here, so this path is only fast for small problems.
"""
import math

import numpy as np

_EPS = np.finfo(np.float64).eps


def form_triplets(lvals, mvals, wdet, dofs):
    s = np.einsum("cjqy,ciqy,cq->cij", lvals, mvals, wdet)
    local = 0.5 * s + 0.5 * np.swapaxes(s, 1, 2)
    nloc = dofs.shape[1]
    rows = np.repeat(dofs[:, :, None], nloc, axis=2)
    cols = np.repeat(dofs[:, None, :], nloc, axis=1)
    keep = (rows >= 0) & (cols >= 0)
    return rows[keep].astype(np.int64), cols[keep].astype(np.int64), local[keep]


def tridiagonalize(c):
    a = np.array(c, dtype=np.float64, copy=True)
    n = a.shape[0]
    v_store = np.zeros((n, n))
    for k in range(n - 2):
        x = a[k + 1:, k]
        tail = float(x[1:] @ x[1:])
        if tail == 0.0:
            continue
        x0 = x[0]
        xnorm = math.sqrt(x0 * x0 + tail)
        alpha = -xnorm if x0 >= 0.0 else xnorm
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        block = a[k + 1:, k + 1:]
        p = block @ v
        p -= (v @ p) * v
        block -= 2.0 * (np.outer(v, p) + np.outer(p, v))
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = alpha
        a[k, k + 1] = alpha
        v_store[k + 1:, k] = v
    d = np.diag(a).copy()
    e = np.zeros(n)
    e[: n - 1] = np.diag(a, -1)
    return d, e, v_store


def ql_eigenvalues(d, e, max_iter):
    d = [float(t) for t in d]
    e = [float(t) for t in e]
    n = len(d)
    status = 0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                return np.array(d), -1
            status = max(status, it)
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.array(d), status


def _solve_shifted(d, e, sigma, rhs, tiny):
    n = len(d)
    dg = [float(t) - sigma for t in d]
    dl = [float(t) for t in e[: n - 1]]
    du = list(dl)
    du2 = [0.0] * max(n - 2, 1)
    b = [float(t) for t in rhs]
    for i in range(n - 1):
        if abs(dg[i]) >= abs(dl[i]):
            if dg[i] == 0.0:
                dg[i] = tiny
            fact = dl[i] / dg[i]
            dg[i + 1] -= fact * du[i]
            b[i + 1] -= fact * b[i]
        else:
            fact = dg[i] / dl[i]
            dg[i] = dl[i]
            temp = dg[i + 1]
            dg[i + 1] = du[i] - fact * temp
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
            du[i] = temp
            b[i], b[i + 1] = b[i + 1], b[i] - fact * b[i + 1]
    if dg[n - 1] == 0.0:
        dg[n - 1] = tiny
    x = [0.0] * n
    x[n - 1] = b[n - 1] / dg[n - 1]
    if n > 1:
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / dg[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dg[i]
    return np.array(x)


def inverse_iteration(d, e, lambdas, starts, tnorm, max_iter):
    n = d.shape[0]
    k = lambdas.shape[0]
    y = np.zeros((n, k))
    tiny = _EPS * tnorm if tnorm > 0.0 else _EPS
    ortol = 1e-3 * tnorm
    target = 4.0 * n * _EPS * max(tnorm, 1e-300)
    sigma_prev = 0.0
    for j in range(k):
        sigma = lambdas[j]
        if j > 0 and sigma - sigma_prev < 10.0 * tiny:
            sigma = sigma_prev + 10.0 * tiny
        sigma_prev = sigma
        z = starts[:, j].copy()
        for it in range(max_iter):
            z = _solve_shifted(d, e, sigma, z, tiny)
            near = [i for i in range(j) if abs(lambdas[j] - lambdas[i]) <= ortol]
            for i in near:
                z -= (y[:, i] @ z) * y[:, i]
            nz = np.linalg.norm(z)
            if nz == 0.0:
                z = starts[:, (j + it + 1) % k] + 1.0
                continue
            z /= nz
            tz = d * z - lambdas[j] * z
            tz[1:] += e[: n - 1] * z[:-1]
            tz[:-1] += e[: n - 1] * z[1:]
            if it > 0 and np.linalg.norm(tz) <= target:
                break
        y[:, j] = z
    return y


def apply_householder(v_store, y):
    out = np.array(y, dtype=np.float64, copy=True)
    n = out.shape[0]
    for col in range(n - 3, -1, -1):
        v = v_store[col + 1:, col]
        dots = v @ out[col + 1:]
        out[col + 1:] -= 2.0 * np.outer(v, dots)
    return out
