"""Compiled simplex hot kernels.

Loop-style twins of ``_kernels_numpy`` with identical signatures and, where it
matters for pivot selection, identical tie-break semantics (two-pass min/argmax
scans rather than running argmins, so float comparisons match the vectorized
path exactly).  fastmath stays off: pivot decisions must be reproducible.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

_JIT = dict(cache=True, nogil=True, fastmath=False)


@njit(**_JIT)
def btran(binv, idx, coef):
    m = binv.shape[0]
    y = np.zeros(m)
    for k in range(idx.shape[0]):
        ci = coef[k]
        row = idx[k]
        for j in range(m):
            y[j] += ci * binv[row, j]
    return y


@njit(**_JIT)
def ftran(binv, col):
    return np.dot(binv, col)


@njit(**_JIT)
def gather_col(colptr, rowidx, vals, j, m):
    out = np.zeros(m)
    for k in range(colptr[j], colptr[j + 1]):
        out[rowidx[k]] = vals[k]
    return out


@njit(**_JIT)
def reduced_costs(colptr, rowidx, vals, y, c):
    n = colptr.shape[0] - 1
    z = np.empty(n)
    for j in range(n):
        acc = 0.0
        for k in range(colptr[j], colptr[j + 1]):
            acc += vals[k] * y[rowidx[k]]
        z[j] = c[j] - acc
    return z


@njit(**_JIT)
def entering_violations(z, vstat, allow, tol):
    n = z.shape[0]
    v = np.zeros(n)
    for j in range(n):
        if not allow[j]:
            continue
        s = vstat[j]
        if s == 0:
            val = -z[j]
        elif s == 1:
            val = z[j]
        elif s == 3:
            val = abs(z[j])
        else:
            continue
        if val > tol:
            v[j] = val
    return v


@njit(**_JIT)
def pick_dantzig(z, vstat, allow, tol):
    v = entering_violations(z, vstat, allow, tol)
    best = 0.0
    j_best = -1
    for j in range(v.shape[0]):
        if v[j] > best:
            best = v[j]
            j_best = j
    return j_best


@njit(**_JIT)
def pick_bland(z, vstat, allow, tol):
    v = entering_violations(z, vstat, allow, tol)
    for j in range(v.shape[0]):
        if v[j] > 0.0:
            return j
    return -1


@njit(**_JIT)
def ratio_test(d, xb, lob, upb, sigma, room, tol_piv, bland, basis):
    m = d.shape[0]
    t_best = np.inf
    for i in range(m):
        den = sigma * d[i]
        if den > tol_piv:
            if lob[i] > -np.inf:
                ti = (xb[i] - lob[i]) / den
                if ti < 0.0:
                    ti = 0.0
                if ti < t_best:
                    t_best = ti
        elif den < -tol_piv:
            if upb[i] < np.inf:
                ti = (xb[i] - upb[i]) / den
                if ti < 0.0:
                    ti = 0.0
                if ti < t_best:
                    t_best = ti
    if room < t_best:
        return room, -1, True
    if not np.isfinite(t_best):
        return np.inf, -1, False
    r = -1
    if bland:
        key = np.int64(2**62)
        for i in range(m):
            den = sigma * d[i]
            ti = np.inf
            if den > tol_piv and lob[i] > -np.inf:
                ti = max((xb[i] - lob[i]) / den, 0.0)
            elif den < -tol_piv and upb[i] < np.inf:
                ti = max((xb[i] - upb[i]) / den, 0.0)
            if ti == t_best and basis[i] < key:
                key = basis[i]
                r = i
    else:
        mag = -1.0
        for i in range(m):
            den = sigma * d[i]
            ti = np.inf
            if den > tol_piv and lob[i] > -np.inf:
                ti = max((xb[i] - lob[i]) / den, 0.0)
            elif den < -tol_piv and upb[i] < np.inf:
                ti = max((xb[i] - upb[i]) / den, 0.0)
            if ti == t_best and abs(d[i]) > mag:
                mag = abs(d[i])
                r = i
    return t_best, r, False


@njit(**_JIT)
def update_binv(binv, d, r):
    m = binv.shape[0]
    piv = d[r]
    for j in range(m):
        binv[r, j] /= piv
    for i in range(m):
        if i == r:
            continue
        di = d[i]
        if abs(di) > 1e-14:
            for j in range(m):
                binv[i, j] -= di * binv[r, j]


@njit(**_JIT)
def assemble_basis(colptr, rowidx, vals, basis, m):
    B = np.zeros((m, m))
    for k in range(m):
        j = basis[k]
        for p in range(colptr[j], colptr[j + 1]):
            B[rowidx[p], k] = vals[p]
    return B


@njit(**_JIT)
def nonbasic_rhs(colptr, rowidx, vals, xval, basic, rhs):
    out = rhs.copy()
    for j in range(colptr.shape[0] - 1):
        if basic[j] or xval[j] == 0.0:
            continue
        xv = xval[j]
        for k in range(colptr[j], colptr[j + 1]):
            out[rowidx[k]] -= vals[k] * xv
    return out


@njit(**_JIT)
def row_activity(colptr, rowidx, vals, xval, m):
    out = np.zeros(m)
    for j in range(colptr.shape[0] - 1):
        xv = xval[j]
        if xv == 0.0:
            continue
        for k in range(colptr[j], colptr[j + 1]):
            out[rowidx[k]] += vals[k] * xv
    return out
