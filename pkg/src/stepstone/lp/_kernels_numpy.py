"""Vectorized numpy implementations of the simplex hot kernels.

Signature-identical twins of the compiled kernels in ``_kernels_numba``;
which set gets used is decided once per process by ``stepstone.lp.backend``.
Every function here is pure array math so the interpreted path stays usable
for real work, just slower.

Column convention shared by both backends: the constraint matrix W holds the
structural columns first, then one slack column per inequality row, then one
artificial column per row (sign chosen at crash time).  All kernels receive W
in CSC form as (colptr, rowidx, vals).
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def btran(binv: np.ndarray, idx: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """y = coef @ binv[idx, :], i.e. c_B^T B^-1 with c_B given sparse."""
    if idx.size == 0:
        return np.zeros(binv.shape[0])
    return coef @ binv[idx]


def ftran(binv: np.ndarray, col: np.ndarray) -> np.ndarray:
    """d = B^-1 a for a dense column a."""
    return binv @ col


def gather_col(
    colptr: np.ndarray, rowidx: np.ndarray, vals: np.ndarray, j: int, m: int
) -> np.ndarray:
    """Scatter CSC column j into a dense length-m vector."""
    out = np.zeros(m)
    lo, hi = colptr[j], colptr[j + 1]
    out[rowidx[lo:hi]] = vals[lo:hi]
    return out


def reduced_costs(
    colptr: np.ndarray,
    rowidx: np.ndarray,
    vals: np.ndarray,
    y: np.ndarray,
    c: np.ndarray,
) -> np.ndarray:
    """z_j = c_j - y . a_j for every column of W."""
    n = colptr.shape[0] - 1
    prod = vals * y[rowidx]
    # reduceat misbehaves on empty columns (repeats the next segment), so
    # compute segment sums and zero the empties explicitly.
    starts = colptr[:-1]
    widths = np.diff(colptr)
    z = c.copy()
    nonempty = widths > 0
    if prod.size:
        sums = np.add.reduceat(prod, starts[nonempty]) if nonempty.any() else 0.0
        z[nonempty] -= sums
    return z


def entering_violations(
    z: np.ndarray, vstat: np.ndarray, allow: np.ndarray, tol: float
) -> np.ndarray:
    """Per-column improvement magnitude; 0 where the column may not enter."""
    v = np.zeros(z.shape[0])
    at_lo = (vstat == 0) & allow
    at_up = (vstat == 1) & allow
    free = (vstat == 3) & allow
    v[at_lo] = np.maximum(0.0, -z[at_lo])
    v[at_up] = np.maximum(0.0, z[at_up])
    v[free] = np.abs(z[free])
    v[v <= tol] = 0.0
    return v


def pick_dantzig(
    z: np.ndarray, vstat: np.ndarray, allow: np.ndarray, tol: float
) -> int:
    v = entering_violations(z, vstat, allow, tol)
    j = int(np.argmax(v))
    return j if v[j] > 0.0 else -1


def pick_bland(z: np.ndarray, vstat: np.ndarray, allow: np.ndarray, tol: float) -> int:
    v = entering_violations(z, vstat, allow, tol)
    nz = v > 0.0
    if not nz.any():
        return -1
    return int(np.argmax(nz))


def ratio_test(
    d: np.ndarray,
    xb: np.ndarray,
    lob: np.ndarray,
    upb: np.ndarray,
    sigma: float,
    room: float,
    tol_piv: float,
    bland: bool,
    basis: np.ndarray,
) -> tuple[float, int, bool]:
    """Bounded-variable ratio test.

    Returns (step, leaving_row, bound_flip).  leaving_row == -1 with
    bound_flip False means the direction is unbounded.  Tie-break: under
    Bland's rule the smallest leaving variable index wins; otherwise the
    largest |d| (then smallest row) for numerical safety.  Both backends
    implement the exact same two-pass rule so pivots agree bit-for-bit.
    """
    den = sigma * d
    t = np.full(d.shape[0], np.inf)
    dec = den > tol_piv
    if dec.any():
        fin = dec & np.isfinite(lob)
        t[fin] = (xb[fin] - lob[fin]) / den[fin]
    inc = den < -tol_piv
    if inc.any():
        fin = inc & np.isfinite(upb)
        t[fin] = (xb[fin] - upb[fin]) / den[fin]
    np.maximum(t, 0.0, out=t)
    t_best = t.min() if t.shape[0] else np.inf
    if room < t_best:
        return room, -1, True
    if not np.isfinite(t_best):
        return np.inf, -1, False
    cand = t == t_best
    if bland:
        sub = np.where(cand, basis, np.iinfo(np.int64).max)
        r = int(np.argmin(sub))
    else:
        mag = np.where(cand, np.abs(d), -1.0)
        r = int(np.argmax(mag))
    return float(t_best), r, False


def update_binv(binv: np.ndarray, d: np.ndarray, r: int) -> None:
    """Product-form update B^-1 <- E B^-1 after basis[r] is replaced."""
    piv = d[r]
    binv[r, :] /= piv
    d2 = d.copy()
    d2[r] = 0.0
    nz = np.flatnonzero(np.abs(d2) > 1e-14)
    if nz.size:
        binv[nz, :] -= np.outer(d2[nz], binv[r, :])


def assemble_basis(
    colptr: np.ndarray,
    rowidx: np.ndarray,
    vals: np.ndarray,
    basis: np.ndarray,
    m: int,
) -> np.ndarray:
    """Dense basis matrix gathered column-by-column from CSC storage."""
    B = np.zeros((m, m))
    for k in range(m):
        j = basis[k]
        lo, hi = colptr[j], colptr[j + 1]
        B[rowidx[lo:hi], k] = vals[lo:hi]
    return B


def nonbasic_rhs(
    colptr: np.ndarray,
    rowidx: np.ndarray,
    vals: np.ndarray,
    xval: np.ndarray,
    basic: np.ndarray,
    rhs: np.ndarray,
) -> np.ndarray:
    """rhs - W_N x_N over nonbasic columns with nonzero value."""
    out = rhs.copy()
    cols = np.flatnonzero((~basic) & (xval != 0.0))
    for j in cols:
        lo, hi = colptr[j], colptr[j + 1]
        out[rowidx[lo:hi]] -= vals[lo:hi] * xval[j]
    return out


def row_activity(
    colptr: np.ndarray,
    rowidx: np.ndarray,
    vals: np.ndarray,
    xval: np.ndarray,
    m: int,
) -> np.ndarray:
    """W x over all columns (slacks and artificials included)."""
    out = np.zeros(m)
    cols = np.flatnonzero(xval != 0.0)
    for j in cols:
        lo, hi = colptr[j], colptr[j + 1]
        out[rowidx[lo:hi]] += vals[lo:hi] * xval[j]
    return out
