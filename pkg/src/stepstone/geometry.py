"""Convex planar surfaces, halfspace polytopes, rotations, quasi-flat test.

All values are immutable after construction and safe to share across threads.
Conventions: z is up, yaw rotates about z, surface normals always point up
(d_z > 0), and foot-shape polytopes carry zero z-coefficients so constraints
built from them act on xy only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COPLANAR_TOL = 1e-6
PLANE_TOL = 1e-9
CONVEX_TOL = 1e-9
MIN_NORMAL_Z = 1e-6


class GeometryError(ValueError):
    pass


class NonPlanar(GeometryError):
    pass


class NonConvex(GeometryError):
    pass


class DegenerateNormal(GeometryError):
    """Vertical or downward-degenerate surface."""


@dataclass(frozen=True)
class Polytope:
    """Halfspace set {x in R^3 : A x <= b}."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "A", np.asarray(self.A, dtype=np.float64).reshape(-1, 3))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=np.float64).ravel())
        if self.A.shape[0] != self.b.shape[0]:
            raise GeometryError("polytope A/b row mismatch")
        self.A.setflags(write=False)
        self.b.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def member(self, x: np.ndarray, tol: float = 0.0) -> bool:
        if self.n_rows == 0:
            return True
        return bool((self.A @ np.asarray(x, dtype=np.float64) <= self.b + tol).all())


@dataclass(frozen=True)
class Surface:
    """Convex planar contact surface.

    Plane: d.x = e with |d| = 1 and d_z > 0.  Boundary: S x <= s, a prism of
    halfspaces orthogonal to d, one per polygon edge.
    """

    vertices: np.ndarray
    normal: np.ndarray
    offset: float
    S: np.ndarray
    s: np.ndarray
    id: int = -1

    def __post_init__(self) -> None:
        for name in ("vertices", "normal", "S", "s"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            object.__setattr__(self, name, arr)
            arr.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return self.S.shape[0]

    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)


def _newell_normal(vertices: np.ndarray) -> np.ndarray:
    """Plane normal via Newell's method over the closed vertex loop."""
    v = vertices
    nxt = np.roll(v, -1, axis=0)
    n = np.array(
        [
            np.sum((v[:, 1] - nxt[:, 1]) * (v[:, 2] + nxt[:, 2])),
            np.sum((v[:, 2] - nxt[:, 2]) * (v[:, 0] + nxt[:, 0])),
            np.sum((v[:, 0] - nxt[:, 0]) * (v[:, 1] + nxt[:, 1])),
        ]
    )
    return n


def surface_from_vertices(vertices, surface_id: int = -1) -> Surface:
    """Build a Surface from an ordered convex planar vertex loop.

    The normal is flipped upward if needed, vertices are projected exactly
    onto the fitted plane (inputs may be coplanar only to 1e-6), and each
    polygon edge contributes one boundary halfspace containing all vertices.
    """
    v = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    if v.shape[0] < 3:
        raise NonPlanar("need at least 3 vertices")
    n = _newell_normal(v)
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        raise DegenerateNormal("vertex loop has no area")
    d = n / norm
    if abs(d[2]) < MIN_NORMAL_Z:
        raise DegenerateNormal("vertical surface")
    if d[2] < 0.0:
        d = -d
    e = float(d @ v.mean(axis=0))
    resid = np.abs(v @ d - e)
    if resid.max() > COPLANAR_TOL:
        raise NonPlanar(f"vertices off plane by {resid.max():.2e}")
    # project onto the fitted plane so stored vertices satisfy d.v = e exactly
    v = v - np.outer(v @ d - e, d)

    # convexity: edge-to-edge cross products must not change sign about d
    nxt = np.roll(v, -1, axis=0)
    edges = nxt - v
    turns = np.cross(edges, np.roll(edges, -1, axis=0)) @ d
    pos = (turns > CONVEX_TOL).any()
    neg = (turns < -CONVEX_TOL).any()
    if pos and neg:
        raise NonConvex("vertex loop is not convex")

    centroid = v.mean(axis=0)
    rows = []
    rhs = []
    for a, bvert in zip(v, nxt):
        edge = bvert - a
        if np.linalg.norm(edge) < 1e-12:
            continue
        m = np.cross(edge, d)
        nm = np.linalg.norm(m)
        if nm < 1e-12:
            continue
        m = m / nm
        off = float(m @ a)
        if m @ centroid > off:
            m, off = -m, -off
        rows.append(m)
        rhs.append(off)
    S = np.array(rows)
    s = np.array(rhs)
    if ((S @ v.T).max(axis=1) > s + PLANE_TOL).any():
        raise NonConvex("boundary rows exclude a vertex")
    return Surface(vertices=v, normal=d, offset=e, S=S, s=s, id=surface_id)


def contains(surface: Surface, x, tol: float) -> bool:
    """Membership of a 3D point in the surface (plane and boundary)."""
    x = np.asarray(x, dtype=np.float64)
    if abs(float(surface.normal @ x) - surface.offset) > tol:
        return False
    return bool((surface.S @ x <= surface.s + tol).all())


def is_quasi_flat(surface: Surface, mu: float) -> bool:
    """True iff the friction cone of the surface contains the vertical.

    Equivalent to the tilt from vertical being at most arctan(mu).
    """
    if mu <= 0.0:
        raise GeometryError("mu must be positive")
    return bool(surface.normal[2] >= 1.0 / np.sqrt(1.0 + mu * mu) - 1e-12)


def rot_z(yaw: float) -> np.ndarray:
    c, s = np.cos(yaw), np.sin(yaw)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_to_normal(d: np.ndarray) -> np.ndarray:
    """Minimal rotation mapping e_z to the unit vector d (Rodrigues)."""
    d = np.asarray(d, dtype=np.float64)
    cz = float(d[2])
    if cz >= 1.0 - 1e-15:
        return np.eye(3)
    if cz <= -1.0 + 1e-15:
        raise DegenerateNormal("cannot align with a downward normal")
    axis = np.cross([0.0, 0.0, 1.0], d)
    s = np.linalg.norm(axis)
    axis = axis / s
    K = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + s * K + (1.0 - cz) * (K @ K)


def rotate_polytope(p: Polytope, yaw: float) -> Polytope:
    """Rotate the set about z: returns {A Rot(yaw)^T, b}."""
    return Polytope(A=p.A @ rot_z(yaw).T, b=p.b.copy())


def orient_polytope(p: Polytope, yaw: float, d: np.ndarray) -> Polytope:
    """Yaw about z, then tilt e_z onto the surface normal d."""
    rot = rotation_to_normal(d) @ rot_z(yaw)
    return Polytope(A=p.A @ rot.T, b=p.b.copy())


def polytope_from_box(lo, hi) -> Polytope:
    """Axis-aligned box [lo, hi] as six halfspace rows."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    A = np.vstack([np.eye(3), -np.eye(3)])
    b = np.concatenate([hi, -lo])
    return Polytope(A=A, b=b)


def foot_polytope_from_polygon(vertices_xy) -> Polytope:
    """Halfspace rows of a convex xy polygon, with zero z coefficients.

    Constraints built from the result act on xy only, which is what the
    balance rows need.
    """
    pts = np.asarray(vertices_xy, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] < 3:
        raise NonPlanar("foot polygon needs at least 3 vertices")
    v3 = np.hstack([pts, np.zeros((pts.shape[0], 1))])
    surf = surface_from_vertices(v3)
    return Polytope(A=surf.S, b=surf.s)


def polytope_nonempty(p: Polytope) -> bool:
    from . import lp

    ok, _ = lp.check_feasible(lp.LpProblem(c=np.zeros(3), G=p.A, h=p.b))
    return ok


def polytope_bounded(p: Polytope, axes=(0, 1, 2)) -> bool:
    """Bounded along the given axes, decided by maximizing +-e_axis.

    Pass axes=(0, 1) for sets that deliberately leave z free, such as
    foot-shape polytopes.
    """
    from . import lp

    for axis in axes:
        for sign in (1.0, -1.0):
            c = np.zeros(3)
            c[axis] = sign
            sol = lp.solve(lp.LpProblem(c=c, G=p.A, h=p.b))
            if sol.status is lp.LpStatus.UNBOUNDED:
                return False
    return True


def polytope_xy_vertices(p: Polytope, tol: float = 1e-9) -> np.ndarray:
    """Vertices of the xy cross-section of an xy-only polytope, CCW order.

    Intersects every pair of constraint lines and keeps the points that
    satisfy all rows. Intended for drawing foot shapes, so it expects the
    small, bounded polygons built by foot_polytope_from_polygon.
    """
    rows = p.A[:, :2]
    rhs = p.b
    pts = []
    for i in range(len(rhs)):
        for j in range(i + 1, len(rhs)):
            M = np.array([rows[i], rows[j]])
            if abs(np.linalg.det(M)) < 1e-12:
                continue
            v = np.linalg.solve(M, np.array([rhs[i], rhs[j]]))
            if (rows @ v <= rhs + tol).all():
                pts.append(v)
    if not pts:
        raise GeometryError("polytope has no xy vertices; is it bounded?")
    unique = []
    for v in pts:
        if not any(np.linalg.norm(v - u) < 1e-9 for u in unique):
            unique.append(v)
    pts = np.array(unique)
    center = pts.mean(axis=0)
    angles = np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0])
    return pts[np.argsort(angles)]
