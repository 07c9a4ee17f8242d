import numpy as np
import pytest

from stepstone.geometry import (
    DegenerateNormal,
    NonConvex,
    NonPlanar,
    Polytope,
    contains,
    foot_polytope_from_polygon,
    is_quasi_flat,
    orient_polytope,
    polytope_bounded,
    polytope_from_box,
    polytope_nonempty,
    rot_z,
    rotate_polytope,
    rotation_to_normal,
    surface_from_vertices,
)

SQUARE = [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 1.0, 0.0), (0.0, 1.0, 0.0)]


def test_unit_square():
    s = surface_from_vertices(SQUARE)
    assert s.normal == pytest.approx([0.0, 0.0, 1.0])
    assert s.offset == pytest.approx(0.0)
    assert s.n_rows == 4
    assert (s.S @ s.vertices.T <= s.s[:, None] + 1e-9).all()


def test_clockwise_square_flips_normal():
    s = surface_from_vertices(SQUARE[::-1])
    assert s.normal == pytest.approx([0.0, 0.0, 1.0])


def test_ramp_plane_fit():
    s = surface_from_vertices([(0, 0, 0.0), (1, 0, 0.0), (0, 1, 0.5)])
    want = np.array([0.0, -0.5, 1.0])
    want /= np.linalg.norm(want)
    assert s.normal == pytest.approx(want, abs=1e-12)
    assert np.abs(s.vertices @ s.normal - s.offset).max() <= 1e-9


def test_cyclic_permutation_invariance():
    a = surface_from_vertices(SQUARE)
    for k in range(1, 4):
        b = surface_from_vertices(SQUARE[k:] + SQUARE[:k])
        assert b.normal == pytest.approx(a.normal)
        assert b.offset == pytest.approx(a.offset)
        # same accepted point set
        rng = np.random.default_rng(k)
        for _ in range(50):
            x = np.append(rng.uniform(-0.3, 1.3, 2), 0.0)
            assert contains(a, x, 1e-9) == contains(b, x, 1e-9)


def test_centroid_contained():
    rng = np.random.default_rng(8)
    for _ in range(20):
        # random convex polygon: sorted angles on an ellipse, random tilt
        k = int(rng.integers(3, 8))
        ang = np.sort(rng.uniform(0, 2 * np.pi, k))
        pts = np.stack([np.cos(ang) * rng.uniform(0.5, 2.0),
                        np.sin(ang) * rng.uniform(0.5, 2.0),
                        np.zeros(k)], axis=1)
        tilt = rotation_to_normal(np.array([0.3 * rng.standard_normal(),
                                            0.3 * rng.standard_normal(), 1.0])
                                  / np.linalg.norm([0.3, 0.3, 1.0]))
        pts = pts @ tilt.T + rng.normal(size=3)
        s = surface_from_vertices(pts)
        assert contains(s, s.centroid(), 1e-9)


def test_nonplanar_rejected():
    with pytest.raises(NonPlanar):
        surface_from_vertices([(0, 0, 0), (1, 0, 0), (1, 1, 0.1), (0, 1, 0)])


def test_nonconvex_rejected():
    with pytest.raises(NonConvex):
        surface_from_vertices(
            [(0, 0, 0), (2, 0, 0), (1, 0.3, 0), (2, 1, 0), (0, 1, 0)]
        )


def test_vertical_rejected():
    with pytest.raises(DegenerateNormal):
        surface_from_vertices([(0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)])


def test_contains_examples():
    s = surface_from_vertices(SQUARE)
    assert contains(s, (0.5, 0.5, 0.0), 1e-9)
    assert not contains(s, (0.5, 0.5, 0.1), 1e-9)
    assert contains(s, (1.0 + 1e-10, 0.5, 0.0), 1e-9)


def test_quasi_flat():
    s = surface_from_vertices(SQUARE)
    assert is_quasi_flat(s, 0.5)
    # 45 degree tilt about x: boundary case at mu=1
    c45 = np.cos(np.pi / 4)
    tilted = surface_from_vertices(
        [(0, 0, 0), (1, 0, 0), (1, c45, c45), (0, c45, c45)]
    )
    assert is_quasi_flat(tilted, 1.0)
    # 30 degree tilt, arctan(0.3) about 16.7 degrees -> not quasi-flat
    c30, s30 = np.cos(np.pi / 6), np.sin(np.pi / 6)
    t30 = surface_from_vertices([(0, 0, 0), (1, 0, 0), (1, c30, s30), (0, c30, s30)])
    assert not is_quasi_flat(t30, 0.3)
    assert is_quasi_flat(t30, 1.0)


def test_quasi_flat_monotone_in_mu():
    rng = np.random.default_rng(3)
    s = surface_from_vertices([(0, 0, 0), (1, 0, 0), (1, 1, 0.4), (0, 1, 0.4)])
    mus = np.sort(rng.uniform(0.05, 3.0, 30))
    flags = [is_quasi_flat(s, float(m)) for m in mus]
    assert flags == sorted(flags)  # False... then True


def test_rotate_polytope_identity_and_quarter_turn():
    box = polytope_from_box([-1, -1, -1], [1, 1, 1])
    same = rotate_polytope(box, 0.0)
    assert np.allclose(same.A, box.A) and np.allclose(same.b, box.b)
    quarter = rotate_polytope(box, np.pi / 2)
    x = np.array([0.9, 0.0, 0.0])
    assert box.member(x, 1e-12)
    assert quarter.member(rot_z(np.pi / 2) @ x, 1e-9)


def test_rotate_membership_equivalence():
    rng = np.random.default_rng(11)
    A = rng.normal(size=(8, 3))
    b = A @ rng.normal(size=3) + rng.uniform(0.2, 1.0, 8)
    p = Polytope(A=A, b=b)
    q = rotate_polytope(p, 0.7)
    R = rot_z(0.7)
    for _ in range(100):
        x = rng.normal(size=3)
        assert p.member(x, 1e-9) == q.member(R @ x, 1e-9)


def test_rotate_round_trip():
    rng = np.random.default_rng(12)
    p = Polytope(A=rng.normal(size=(5, 3)), b=rng.normal(size=5))
    q = rotate_polytope(rotate_polytope(p, 0.4), -0.4)
    assert np.abs(q.A - p.A).max() <= 1e-12
    assert np.allclose(q.b, p.b)


def test_rotation_to_normal():
    rng = np.random.default_rng(13)
    for _ in range(20):
        d = rng.normal(size=3)
        d[2] = abs(d[2]) + 0.5
        d /= np.linalg.norm(d)
        R = rotation_to_normal(d)
        assert R @ np.array([0.0, 0.0, 1.0]) == pytest.approx(d, abs=1e-12)
        assert R @ R.T == pytest.approx(np.eye(3), abs=1e-12)


def test_orient_polytope_flat_is_yaw():
    box = polytope_from_box([-1, -2, -3], [1, 2, 3])
    a = orient_polytope(box, 0.3, np.array([0.0, 0.0, 1.0]))
    c = rotate_polytope(box, 0.3)
    assert np.allclose(a.A, c.A)


def test_foot_polygon_zero_z():
    f = foot_polytope_from_polygon([(-0.1, -0.05), (0.1, -0.05), (0.1, 0.05), (-0.1, 0.05)])
    assert f.n_rows == 4
    assert np.abs(f.A[:, 2]).max() == 0.0
    assert f.member((0.0, 0.0, 123.0), 1e-12)  # z is unconstrained
    assert not f.member((0.2, 0.0, 0.0), 1e-9)


def test_polytope_checks():
    box = polytope_from_box([0, 0, 0], [1, 1, 1])
    assert polytope_nonempty(box)
    assert polytope_bounded(box)
    halfspace = Polytope(A=[[1.0, 0.0, 0.0]], b=[1.0])
    assert polytope_nonempty(halfspace)
    assert not polytope_bounded(halfspace)
    empty = Polytope(A=[[1.0, 0, 0], [-1.0, 0, 0]], b=[-1.0, -1.0])
    assert not polytope_nonempty(empty)
