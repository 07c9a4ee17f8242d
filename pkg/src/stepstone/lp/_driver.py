"""Two-phase revised simplex over bounded variables.

Solves  min c.x  s.t.  G x <= h,  A x = b,  lb <= x <= ub  (entries of lb/ub
may be -inf/+inf).  Internally the system is rewritten as W u = rhs with one
slack column per inequality row and one artificial column per row; phase 1
minimizes the artificial sum from a slack-crash basis, phase 2 the real cost.

Design points:
* dense basis inverse maintained by product-form updates, rebuilt from scratch
  (LAPACK inverse) on a pivot-count schedule and at every claimed optimum;
* Dantzig pricing with a Bland fallback after 3*(m+p) consecutive degenerate
  pivots, reverting on the first real step;
* all tie-breaks are index-deterministic, so identical inputs give identical
  pivot sequences, statuses and solutions;
* inequality rows are max-norm equilibrated before solving, which also makes
  the reported status invariant to positive row rescaling of the input.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from types import ModuleType

import numpy as np

from . import backend

TOL_PIVOT = 1e-9
TOL_DJ = 1e-9
TOL_DEGEN = 1e-12
RES_ROW = 1e-7
RES_BOUND = 1e-9


class MalformedProblem(ValueError):
    """Inconsistent shapes, non-finite data, or crossed bounds."""


class LpNumericalError(RuntimeError):
    """Basis went numerically bad beyond what refactorization can repair."""


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class LpProblem:
    """min c.x  s.t.  G x <= h,  A x = b,  lb <= x <= ub."""

    c: np.ndarray
    G: np.ndarray | None = None
    h: np.ndarray | None = None
    A: np.ndarray | None = None
    b: np.ndarray | None = None
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.c = np.asarray(self.c, dtype=np.float64).ravel()
        n = self.c.shape[0]
        if self.G is None:
            self.G = np.zeros((0, n))
            self.h = np.zeros(0)
        else:
            self.G = np.asarray(self.G, dtype=np.float64).reshape(-1, n)
            self.h = np.asarray(self.h, dtype=np.float64).ravel()
        if self.A is None:
            self.A = np.zeros((0, n))
            self.b = np.zeros(0)
        else:
            self.A = np.asarray(self.A, dtype=np.float64).reshape(-1, n)
            self.b = np.asarray(self.b, dtype=np.float64).ravel()
        self.lb = (
            np.full(n, -np.inf)
            if self.lb is None
            else np.asarray(self.lb, dtype=np.float64).ravel()
        )
        self.ub = (
            np.full(n, np.inf)
            if self.ub is None
            else np.asarray(self.ub, dtype=np.float64).ravel()
        )

    @property
    def n_vars(self) -> int:
        return self.c.shape[0]

    @property
    def n_ineq(self) -> int:
        return self.G.shape[0]

    @property
    def n_eq(self) -> int:
        return self.A.shape[0]

    def validate(self) -> None:
        n = self.n_vars
        if n == 0:
            raise MalformedProblem("problem has no variables")
        if self.G.shape != (self.h.shape[0], n):
            raise MalformedProblem("G/h shapes disagree")
        if self.A.shape != (self.b.shape[0], n):
            raise MalformedProblem("A/b shapes disagree")
        if self.lb.shape != (n,) or self.ub.shape != (n,):
            raise MalformedProblem("bound shapes disagree")
        for name, arr in (("c", self.c), ("G", self.G), ("h", self.h),
                          ("A", self.A), ("b", self.b)):
            if arr.size and not np.isfinite(arr).all():
                raise MalformedProblem(f"non-finite entries in {name}")
        if np.isnan(self.lb).any() or np.isnan(self.ub).any():
            raise MalformedProblem("NaN in bounds")
        if (self.lb > self.ub).any():
            raise MalformedProblem("lb > ub for some variable")


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray
    objective: float
    iterations: int
    solve_time: float
    phase1_objective: float = 0.0
    reduced_costs: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass
class SolveOptions:
    max_iters: int | None = None
    feas_tol: float = 1e-8
    refactor_every: int | None = None


def _initial_point(lb: np.ndarray, ub: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nonbasic start values and statuses (0 at-lo, 1 at-up, 3 free-at-zero)."""
    n = lb.shape[0]
    xval = np.zeros(n)
    vstat = np.full(n, 3, dtype=np.int64)
    lo_fin = np.isfinite(lb)
    up_fin = np.isfinite(ub)
    at_lo = lo_fin & (~up_fin | (np.abs(lb) <= np.abs(ub)))
    at_up = up_fin & ~at_lo
    vstat[at_lo] = 0
    xval[at_lo] = lb[at_lo]
    vstat[at_up] = 1
    xval[at_up] = ub[at_up]
    return xval, vstat


class _Simplex:
    """One solve; holds the working arrays for both phases."""

    def __init__(self, prob: LpProblem, opts: SolveOptions, kernels: ModuleType):
        self.prob = prob
        self.opts = opts
        self.K = kernels
        self.iterations = 0
        self.early_infeasible = False
        self._setup()

    # -- construction ---------------------------------------------------

    def _setup(self) -> None:
        prob = self.prob
        n = prob.n_vars
        G, h = prob.G, prob.h
        A, b = prob.A, prob.b

        # Exact-duplicate equality rows add nothing but basis degeneracy.
        if A.shape[0] > 1:
            stacked = np.hstack([A, b[:, None]])
            _, keep = np.unique(stacked, axis=0, return_index=True)
            if keep.shape[0] < A.shape[0]:
                keep = np.sort(keep)
                A, b = A[keep], b[keep]

        # Row equilibration; all-zero rows are resolved here.
        gscale = np.abs(G).max(axis=1) if G.size else np.zeros(G.shape[0])
        zero_g = gscale == 0.0
        if zero_g.any():
            if (h[zero_g] < -1e-9).any():
                self.early_infeasible = True
            G, h, gscale = G[~zero_g], h[~zero_g], gscale[~zero_g]
        ascale = np.abs(A).max(axis=1) if A.size else np.zeros(A.shape[0])
        zero_a = ascale == 0.0
        if zero_a.any():
            if (np.abs(b[zero_a]) > 1e-9).any():
                self.early_infeasible = True
            A, b, ascale = A[~zero_a], b[~zero_a], ascale[~zero_a]
        Gs = G / gscale[:, None] if G.size else G
        hs = h / gscale if h.size else h
        As = A / ascale[:, None] if A.size else A
        bs = b / ascale if b.size else b

        m = Gs.shape[0]
        p = As.shape[0]
        M = m + p
        self.n, self.m, self.p, self.M = n, m, p, M
        self.rhs = np.concatenate([hs, bs])

        W = np.vstack([Gs, As]) if M else np.zeros((0, n))

        # CSC over structural + slack + artificial columns.
        WT = W.T
        cols, rows = np.nonzero(WT)
        svals = WT[cols, rows]
        counts = np.bincount(cols, minlength=n)
        colptr = np.zeros(n + m + M + 1, dtype=np.int64)
        colptr[1 : n + 1] = np.cumsum(counts)
        nnz_struct = svals.shape[0]
        colptr[n + 1 : n + m + 1] = colptr[n] + np.arange(1, m + 1)
        colptr[n + m + 1 :] = colptr[n + m] + np.arange(1, M + 1)
        rowidx = np.empty(nnz_struct + m + M, dtype=np.int64)
        vals = np.empty(nnz_struct + m + M)
        rowidx[:nnz_struct] = rows
        vals[:nnz_struct] = svals
        rowidx[nnz_struct : nnz_struct + m] = np.arange(m)
        vals[nnz_struct : nnz_struct + m] = 1.0
        rowidx[nnz_struct + m :] = np.arange(M)

        # Crash: structural vars at their nearest bound, slacks basic where
        # the residual allows, artificials (signed) elsewhere.
        x0, vstat0 = _initial_point(prob.lb, prob.ub)
        act = W @ x0 if M else np.zeros(0)
        resid = self.rhs - act
        art_sign = np.where(resid >= 0.0, 1.0, -1.0)
        vals[nnz_struct + m :] = art_sign

        N = n + m + M
        self.n_real = n + m
        self.colptr, self.rowidx, self.vals = colptr, rowidx, vals
        self.lo = np.concatenate([prob.lb, np.zeros(m), np.zeros(M)])
        self.up = np.concatenate([prob.ub, np.full(m, np.inf), np.full(M, np.inf)])
        self.xval = np.concatenate([x0, np.zeros(m), np.zeros(M)])
        self.vstat = np.concatenate(
            [vstat0, np.zeros(m, dtype=np.int64), np.zeros(M, dtype=np.int64)]
        )
        self.allow = np.ones(N, dtype=np.bool_)
        self.allow[self.n_real :] = False
        fixed = self.lo == self.up
        self.allow[fixed] = False
        self.vstat[fixed & (self.vstat != 2)] = 0
        self.xval[fixed] = self.lo[fixed]

        self.basis = np.empty(M, dtype=np.int64)
        self.xb = np.empty(M)
        self.binv = np.zeros((M, M))
        for r in range(M):
            if r < m and resid[r] >= 0.0:
                col = n + r
                self.basis[r] = col
                self.xb[r] = resid[r]
                self.binv[r, r] = 1.0
            else:
                col = self.n_real + r
                self.basis[r] = col
                self.xb[r] = abs(resid[r])
                self.binv[r, r] = art_sign[r]
            self.vstat[col] = 2
            self.xval[col] = self.xb[r]
        self.lob = self.lo[self.basis]
        self.upb = self.up[self.basis]

        self.c_phase1 = np.zeros(N)
        self.c_phase1[self.n_real :] = 1.0
        self.c_phase2 = np.zeros(N)
        self.c_phase2[:n] = prob.c

        if self.opts.refactor_every is not None:
            self.refactor_every = self.opts.refactor_every
        else:
            self.refactor_every = 64 if M <= 1500 else 256
        limit = self.opts.max_iters
        self.max_iters = limit if limit is not None else max(20_000, 25 * (M + n))
        self.pivots_since_refactor = 0
        self._binv_fresh = False

    # -- basis maintenance ----------------------------------------------

    def _refactor(self) -> None:
        M = self.M
        if M == 0:
            self.pivots_since_refactor = 0
            return
        if self._binv_fresh:
            # basis and bounds untouched since the last factorization; a
            # recompute would reproduce binv and xb bit-for-bit
            self.pivots_since_refactor = 0
            return
        B = self.K.assemble_basis(self.colptr, self.rowidx, self.vals, self.basis, M)
        try:
            self.binv = np.ascontiguousarray(np.linalg.inv(B))
        except Exception as exc:  # numba and numpy both raise LinAlgError
            raise LpNumericalError("singular basis at refactorization") from exc
        basic = np.zeros(self.xval.shape[0], dtype=np.bool_)
        basic[self.basis] = True
        rhs_eff = self.K.nonbasic_rhs(
            self.colptr, self.rowidx, self.vals, self.xval, basic, self.rhs
        )
        self.xb = self.K.ftran(self.binv, rhs_eff)
        self.xval[self.basis] = self.xb
        self.pivots_since_refactor = 0
        self._binv_fresh = True

    def _artificial_sum(self) -> float:
        sel = self.basis >= self.n_real
        return float(np.abs(self.xb[sel]).sum()) if sel.any() else 0.0

    # -- the pivot loop ---------------------------------------------------

    def _run_phase(self, c_ext: np.ndarray, phase: int) -> str:
        K = self.K
        M = self.M
        bland = False
        degen_run = 0
        bland_after = 3 * max(M, 1)
        repriced = False
        while True:
            if self.iterations >= self.max_iters:
                return "iterlimit"
            if self.pivots_since_refactor >= self.refactor_every:
                self._refactor()

            cb = c_ext[self.basis]
            idx = np.flatnonzero(cb != 0.0)
            y = K.btran(self.binv, idx, cb[idx])
            z = K.reduced_costs(self.colptr, self.rowidx, self.vals, y, c_ext)
            if bland:
                j = int(K.pick_bland(z, self.vstat, self.allow, TOL_DJ))
            else:
                j = int(K.pick_dantzig(z, self.vstat, self.allow, TOL_DJ))

            if j < 0:
                if repriced or M == 0:
                    self._last_z = z
                    return "optimal"
                self._refactor()
                repriced = True
                continue
            repriced = False

            if self.vstat[j] == 0:
                sigma = 1.0
            elif self.vstat[j] == 1:
                sigma = -1.0
            else:
                sigma = 1.0 if z[j] < 0.0 else -1.0
            room = self.up[j] - self.lo[j]

            col = K.gather_col(self.colptr, self.rowidx, self.vals, j, M)
            d = K.ftran(self.binv, col)
            t, r, flip = K.ratio_test(
                d, self.xb, self.lob, self.upb, sigma, room, TOL_PIVOT,
                bland, self.basis,
            )
            self.iterations += 1

            if flip:
                self.xb -= (sigma * t) * d
                self.xval[self.basis] = self.xb
                self.xval[j] = self.up[j] if self.vstat[j] == 0 else self.lo[j]
                self.vstat[j] = 1 - self.vstat[j]
                self._binv_fresh = False
                degen_run = 0
                bland = False
                continue
            if r < 0:
                if phase == 1:
                    raise LpNumericalError("phase-1 objective claims unbounded")
                return "unbounded"

            enter_val = self.xval[j] + sigma * t
            leave = int(self.basis[r])
            hits_lower = sigma * d[r] > 0.0
            self.xval[leave] = self.lob[r] if hits_lower else self.upb[r]
            self.vstat[leave] = 0 if hits_lower else 1
            if leave >= self.n_real:
                self.allow[leave] = False
                self.up[leave] = 0.0
                self.xval[leave] = 0.0

            self.xb -= (sigma * t) * d
            K.update_binv(self.binv, d, r)
            self.basis[r] = j
            self.xb[r] = enter_val
            self.lob[r] = self.lo[j]
            self.upb[r] = self.up[j]
            self.vstat[j] = 2
            self.xval[j] = enter_val
            self.pivots_since_refactor += 1
            self._binv_fresh = False

            if t <= TOL_DEGEN:
                degen_run += 1
                if degen_run >= bland_after:
                    bland = True
            else:
                degen_run = 0
                bland = False

            if phase == 1 and self.iterations % 16 == 0:
                if self._artificial_sum() <= 1e-12:
                    self._last_z = None
                    return "optimal"

    # -- public driver ----------------------------------------------------

    def run(self, phase1_only: bool = False) -> LpSolution:
        t0 = time.perf_counter()
        n = self.n
        if self.early_infeasible:
            return LpSolution(
                LpStatus.INFEASIBLE, self.xval[:n].copy(), float("nan"),
                0, time.perf_counter() - t0, float("inf"),
            )

        self._last_z = None
        outcome = self._run_phase(self.c_phase1, phase=1)
        if outcome == "iterlimit":
            return self._finish(LpStatus.ITERATION_LIMIT, t0)
        self._refactor()
        art = self._artificial_sum()
        if art > self.opts.feas_tol:
            sol = self._finish(LpStatus.INFEASIBLE, t0)
            sol.phase1_objective = art
            return sol
        if phase1_only:
            sol = self._finish(LpStatus.OPTIMAL, t0, verify=False)
            sol.phase1_objective = art
            sol.objective = float("nan")
            return sol

        # Phase 2: real cost, artificials pinned at zero.
        self.up[self.n_real :] = 0.0
        pinned = self.basis >= self.n_real
        self.upb[pinned] = 0.0
        outcome = self._run_phase(self.c_phase2, phase=2)
        if outcome == "iterlimit":
            sol = self._finish(LpStatus.ITERATION_LIMIT, t0)
        elif outcome == "unbounded":
            sol = self._finish(LpStatus.UNBOUNDED, t0)
            sol.objective = float("-inf")
        else:
            sol = self._finish(LpStatus.OPTIMAL, t0)
        sol.phase1_objective = art
        return sol

    def _finish(self, status: LpStatus, t0: float, verify: bool = True) -> LpSolution:
        if status is LpStatus.OPTIMAL and self.M:
            self._refactor()
        x = self.xval[: self.n].copy()
        if status in (LpStatus.OPTIMAL, LpStatus.ITERATION_LIMIT):
            obj = float(self.prob.c @ x)
        else:
            obj = float("nan")
        if status is LpStatus.OPTIMAL and verify:
            self._verify(x)
        z = getattr(self, "_last_z", None)
        rc = z[: self.n].copy() if (z is not None and status is LpStatus.OPTIMAL) else None
        return LpSolution(
            status, x, obj, self.iterations, time.perf_counter() - t0,
            reduced_costs=rc,
        )

    def _verify(self, x: np.ndarray) -> None:
        prob = self.prob
        worst_row = 0.0
        if prob.n_ineq:
            worst_row = max(worst_row, float((prob.G @ x - prob.h).max()))
        if prob.n_eq:
            worst_row = max(worst_row, float(np.abs(prob.A @ x - prob.b).max()))
        worst_bound = 0.0
        lo_fin = np.isfinite(prob.lb)
        up_fin = np.isfinite(prob.ub)
        if lo_fin.any():
            worst_bound = max(worst_bound, float((prob.lb - x)[lo_fin].max()))
        if up_fin.any():
            worst_bound = max(worst_bound, float((x - prob.ub)[up_fin].max()))
        if worst_row > RES_ROW or worst_bound > RES_BOUND:
            raise LpNumericalError(
                f"solution fails residual contract: rows {worst_row:.3e}, "
                f"bounds {worst_bound:.3e}"
            )


def solve(
    problem: LpProblem,
    opts: SolveOptions | None = None,
    *,
    kernels: ModuleType | None = None,
) -> LpSolution:
    """Solve to optimality (or a terminal status) deterministically."""
    opts = opts or SolveOptions()
    problem.validate()
    K = kernels if kernels is not None else backend.get_kernels()
    return _Simplex(problem, opts, K).run()


def check_feasible(
    problem: LpProblem,
    opts: SolveOptions | None = None,
    *,
    kernels: ModuleType | None = None,
) -> tuple[bool, np.ndarray | None]:
    """Phase-1 feasibility probe; returns (feasible, witness)."""
    opts = opts or SolveOptions()
    problem.validate()
    K = kernels if kernels is not None else backend.get_kernels()
    sim = _Simplex(problem, opts, K)
    sol = sim.run(phase1_only=True)
    if sol.status is LpStatus.OPTIMAL and sol.phase1_objective <= opts.feas_tol:
        sim._verify(sol.x)
        return True, sol.x
    return False, None
