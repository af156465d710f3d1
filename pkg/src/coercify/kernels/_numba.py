"""Compiled loop kernels (numba). Signatures mirror :mod:`._numpy`."""
import math

import numpy as np
from numba import njit

_EPS = np.finfo(np.float64).eps


@njit(cache=True, nogil=True)
def form_triplets(lvals, mvals, wdet, dofs):
    ncells, nloc, nq, ny = lvals.shape
    nnz = 0
    for c in range(ncells):
        nfree = 0
        for i in range(nloc):
            if dofs[c, i] >= 0:
                nfree += 1
        nnz += nfree * nfree
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.float64)
    s = np.empty((nloc, nloc))
    pos = 0
    for c in range(ncells):
        # s[i, j] = (L phi_j, M phi_i) on this cell
        for i in range(nloc):
            for j in range(nloc):
                acc = 0.0
                for q in range(nq):
                    t = 0.0
                    for y in range(ny):
                        t += lvals[c, j, q, y] * mvals[c, i, q, y]
                    acc += wdet[c, q] * t
                s[i, j] = acc
        for i in range(nloc):
            gi = dofs[c, i]
            if gi < 0:
                continue
            for j in range(nloc):
                gj = dofs[c, j]
                if gj < 0:
                    continue
                rows[pos] = gi
                cols[pos] = gj
                vals[pos] = 0.5 * s[i, j] + 0.5 * s[j, i]
                pos += 1
    return rows, cols, vals


@njit(cache=True, nogil=True)
def tridiagonalize(c):
    n = c.shape[0]
    a = c.copy()
    v_store = np.zeros((n, n))
    p = np.empty(n)
    for k in range(n - 2):
        tail = 0.0
        for i in range(k + 2, n):
            tail += a[i, k] * a[i, k]
        if tail == 0.0:
            continue
        x0 = a[k + 1, k]
        xnorm = math.sqrt(x0 * x0 + tail)
        alpha = -xnorm if x0 >= 0.0 else xnorm
        v0 = x0 - alpha
        vnorm = math.sqrt(v0 * v0 + tail)
        v_store[k + 1, k] = v0 / vnorm
        for i in range(k + 2, n):
            v_store[i, k] = a[i, k] / vnorm
        # p = S v on the trailing block
        for i in range(k + 1, n):
            acc = 0.0
            for j in range(k + 1, n):
                acc += a[i, j] * v_store[j, k]
            p[i] = acc
        vp = 0.0
        for i in range(k + 1, n):
            vp += v_store[i, k] * p[i]
        for i in range(k + 1, n):
            p[i] -= vp * v_store[i, k]
        for i in range(k + 1, n):
            vi = v_store[i, k]
            pi = p[i]
            for j in range(k + 1, n):
                a[i, j] -= 2.0 * (vi * p[j] + pi * v_store[j, k])
        a[k + 1, k] = alpha
        a[k, k + 1] = alpha
        for i in range(k + 2, n):
            a[i, k] = 0.0
            a[k, i] = 0.0
    d = np.empty(n)
    e = np.zeros(n)
    for i in range(n):
        d[i] = a[i, i]
    for i in range(n - 1):
        e[i] = a[i + 1, i]
    return d, e, v_store


@njit(cache=True, nogil=True)
def ql_eigenvalues(d, e, max_iter):
    n = d.shape[0]
    d = d.copy()
    e = e.copy()
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
                return d, -1
            status = max(status, it)
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
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
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, status


@njit(cache=True, nogil=True)
def _solve_shifted(d, e, sigma, rhs, tiny):
    # (T - sigma I) x = rhs by Gaussian elimination with partial pivoting
    n = d.shape[0]
    dg = d - sigma
    dl = e[: n - 1].copy()
    du = e[: n - 1].copy()
    du2 = np.zeros(max(n - 2, 1))
    b = rhs.copy()
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
            bi = b[i]
            b[i] = b[i + 1]
            b[i + 1] = bi - fact * b[i + 1]
    if dg[n - 1] == 0.0:
        dg[n - 1] = tiny
    x = np.empty(n)
    x[n - 1] = b[n - 1] / dg[n - 1]
    if n > 1:
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / dg[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dg[i]
    return x


@njit(cache=True, nogil=True)
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
            for i in range(j):
                if abs(lambdas[j] - lambdas[i]) <= ortol:
                    dot = 0.0
                    for r in range(n):
                        dot += y[r, i] * z[r]
                    for r in range(n):
                        z[r] -= dot * y[r, i]
            nz = 0.0
            for r in range(n):
                nz += z[r] * z[r]
            nz = math.sqrt(nz)
            if nz == 0.0:
                z = starts[:, (j + it + 1) % k].copy() + 1.0
                continue
            for r in range(n):
                z[r] /= nz
            res = 0.0
            for r in range(n):
                tz = d[r] * z[r] - lambdas[j] * z[r]
                if r > 0:
                    tz += e[r - 1] * z[r - 1]
                if r < n - 1:
                    tz += e[r] * z[r + 1]
                res += tz * tz
            if it > 0 and math.sqrt(res) <= target:
                break
        for r in range(n):
            y[r, j] = z[r]
    return y


@njit(cache=True, nogil=True)
def apply_householder(v_store, y):
    n, k = y.shape
    out = y.copy()
    for col in range(n - 3, -1, -1):
        for j in range(k):
            dot = 0.0
            for i in range(col + 1, n):
                dot += v_store[i, col] * out[i, j]
            if dot == 0.0:
                continue
            for i in range(col + 1, n):
                out[i, j] -= 2.0 * dot * v_store[i, col]
    return out
