"""Independent brute-force oracles used to pin expected values in tests.

Deliberately dumb and separate from the package code paths they check.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

FEAS_TOL = 1e-9


def lp_vertex_oracle(
    c: np.ndarray,
    G: np.ndarray,
    h: np.ndarray,
    A: np.ndarray,
    b: np.ndarray,
    lb: np.ndarray,
    ub: np.ndarray,
) -> tuple[str, float | None]:
    """Solve a small *bounded* LP by enumerating all basic points.

    Every vertex of {Gx<=h, Ax=b, lb<=x<=ub} is the intersection of n active
    planes drawn from the rows of G, the rows of A and the bound planes, so
    enumerating all n-subsets and filtering by feasibility finds the optimum
    of any LP whose feasible set is bounded (all lb/ub finite here).
    Returns ("optimal", value) or ("infeasible", None).
    """
    n = c.shape[0]
    assert np.isfinite(lb).all() and np.isfinite(ub).all(), "oracle needs a box"
    planes: list[tuple[np.ndarray, float]] = []
    for i in range(G.shape[0]):
        planes.append((G[i], h[i]))
    for i in range(A.shape[0]):
        planes.append((A[i], b[i]))
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        planes.append((e.copy(), ub[i]))
        planes.append((-e, -lb[i]))

    best: float | None = None
    for combo in combinations(range(len(planes)), n):
        M = np.array([planes[i][0] for i in combo])
        rhs = np.array([planes[i][1] for i in combo])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, rhs)
        if G.shape[0] and (G @ x - h).max() > FEAS_TOL:
            continue
        if A.shape[0] and np.abs(A @ x - b).max() > FEAS_TOL:
            continue
        if (lb - x).max() > FEAS_TOL or (x - ub).max() > FEAS_TOL:
            continue
        val = float(c @ x)
        if best is None or val < best:
            best = val
    if best is None:
        return "infeasible", None
    return "optimal", best


def random_box_lp(
    rng: np.random.Generator, n_max: int = 3
) -> tuple[np.ndarray, ...]:
    """A random bounded LP with a mix of feasible and infeasible outcomes."""
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(0, 7))
    p = int(rng.integers(0, min(n, 2) + 1))
    G = rng.normal(size=(m, n))
    h = rng.normal(size=m) + 0.3
    A = rng.normal(size=(p, n))
    b = rng.normal(size=p) * 0.5
    lb = rng.uniform(-3.0, -0.2, n)
    ub = rng.uniform(0.2, 3.0, n)
    c = rng.normal(size=n)
    return c, G, h, A, b, lb, ub
