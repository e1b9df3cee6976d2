import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cineforge.geometry import (
    BehindCamera,
    Box3,
    Intrinsics,
    NonPositiveDepth,
    Pose,
    Rot3,
    box_corners,
    compose,
    invert,
    project,
    unproject,
    vec3,
)
from conftest import random_pose, random_rot3


class TestProject:
    def test_principal_point(self, simple_k):
        u, v, d = project(vec3(0, 0, 2), Pose.identity(), simple_k)
        assert (u, v, d) == (160.0, 120.0, 2.0)

    def test_offset_point(self, simple_k):
        # u = 100 * (1/2) + 160
        u, v, d = project(vec3(1, 0, 2), Pose.identity(), simple_k)
        assert (u, v, d) == (210.0, 120.0, 2.0)

    def test_behind_camera(self, simple_k):
        with pytest.raises(BehindCamera):
            project(vec3(0, 0, -1), Pose.identity(), simple_k)

    def test_on_camera_plane(self, simple_k):
        with pytest.raises(BehindCamera):
            project(vec3(1, 1, 0), Pose.identity(), simple_k)


class TestUnproject:
    def test_principal_point(self, simple_k):
        p = unproject(160, 120, 2.0, Pose.identity(), simple_k)
        np.testing.assert_allclose(p, [0, 0, 2], atol=1e-12)

    def test_offset(self, simple_k):
        p = unproject(210, 120, 2.0, Pose.identity(), simple_k)
        np.testing.assert_allclose(p, [1, 0, 2], atol=1e-12)

    def test_zero_depth(self, simple_k):
        with pytest.raises(NonPositiveDepth):
            unproject(10, 10, 0.0, Pose.identity(), simple_k)

    def test_round_trip_random(self, rng, simple_k):
        for _ in range(200):
            pose = random_pose(rng)
            p_cam = vec3(float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)),
                         float(rng.uniform(0.1, 50)))
            p_world = invert(pose).apply(p_cam)
            u, v, d = project(p_world, pose, simple_k)
            back = unproject(u, v, d, pose, simple_k)
            np.testing.assert_allclose(back, p_world, atol=1e-6)


class TestRot3:
    def test_unit_norm_enforced(self):
        r = Rot3(2.0, 0.0, 0.0, 0.0)
        assert r.w == 1.0

    def test_matrix_round_trip(self, rng):
        for _ in range(100):
            r = random_rot3(rng)
            r2 = Rot3.from_matrix(r.matrix())
            # quaternion double cover: q and -q encode the same rotation
            assert min(np.linalg.norm(r.as_quat() - r2.as_quat()),
                       np.linalg.norm(r.as_quat() + r2.as_quat())) < 1e-9

    def test_matrix_orthonormal(self, rng):
        for _ in range(50):
            m = random_rot3(rng).matrix()
            np.testing.assert_allclose(m @ m.T, np.eye(3), atol=1e-9)
            assert abs(np.linalg.det(m) - 1.0) < 1e-9

    def test_composition_closure(self, rng):
        r = Rot3.identity()
        for _ in range(500):
            r = r * random_rot3(rng)
        assert abs(np.linalg.norm(r.as_quat()) - 1.0) < 1e-9

    def test_z_rotations_compose(self):
        # 30 deg + 60 deg about z == 90 deg about z (quaternion product oracle)
        a = Rot3.from_axis_angle(vec3(0, 0, 1), np.radians(30))
        b = Rot3.from_axis_angle(vec3(0, 0, 1), np.radians(60))
        expect = Rot3.from_axis_angle(vec3(0, 0, 1), np.radians(90))
        np.testing.assert_allclose((b * a).as_quat(), expect.as_quat(), atol=1e-12)

    def test_slerp_midpoint(self):
        a = Rot3.identity()
        b = Rot3.from_axis_angle(vec3(0, 0, 1), np.pi / 2)
        mid = a.slerp(b, 0.5)
        expect = Rot3.from_axis_angle(vec3(0, 0, 1), np.pi / 4)
        np.testing.assert_allclose(mid.as_quat(), expect.as_quat(), atol=1e-12)


class TestPose:
    def test_compose_identity(self, rng):
        p = random_pose(rng)
        q = compose(Pose.identity(), p)
        np.testing.assert_allclose(q.matrix(), p.matrix(), atol=1e-12)

    def test_invert_translation(self):
        p = Pose(Rot3.identity(), vec3(1, 2, 3))
        np.testing.assert_allclose(invert(p).translation, [-1, -2, -3])

    def test_double_invert(self, rng):
        for _ in range(50):
            p = random_pose(rng)
            np.testing.assert_allclose(invert(invert(p)).matrix(), p.matrix(), atol=1e-9)

    def test_compose_with_inverse_is_identity(self, rng):
        p = random_pose(rng)
        np.testing.assert_allclose(compose(p, invert(p)).matrix(), np.eye(4), atol=1e-9)

    def test_associative(self, rng):
        a, b, c = (random_pose(rng) for _ in range(3))
        m1 = compose(compose(a, b), c).matrix()
        m2 = compose(a, compose(b, c)).matrix()
        np.testing.assert_allclose(m1, m2, atol=1e-9)


class TestBox3:
    def test_unit_cube_corners(self):
        b = Box3(center=vec3(0, 0, 0), half_extents=vec3(0.5, 0.5, 0.5),
                 rotation=Rot3.identity())
        corners = box_corners(b)
        expect = {(sx * 0.5, sy * 0.5, sz * 0.5)
                  for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)}
        got = {tuple(np.round(c, 12)) for c in corners}
        assert got == expect

    def test_translation_equivariance(self):
        b0 = Box3(vec3(0, 0, 0), vec3(0.5, 0.5, 0.5), Rot3.identity())
        b1 = Box3(vec3(1, 0, 0), vec3(0.5, 0.5, 0.5), Rot3.identity())
        np.testing.assert_allclose(b1.corners(), b0.corners() + [1, 0, 0], atol=1e-12)

    def test_cube_rotation_symmetry(self):
        b0 = Box3(vec3(0, 0, 0), vec3(0.5, 0.5, 0.5), Rot3.identity())
        b90 = Box3(vec3(0, 0, 0), vec3(0.5, 0.5, 0.5),
                   Rot3.from_axis_angle(vec3(0, 0, 1), np.pi / 2))
        s0 = sorted(tuple(np.round(c, 9)) for c in b0.corners())
        s90 = sorted(tuple(np.round(c, 9)) for c in b90.corners())
        assert s0 == s90

    def test_edge_length_multiset(self, rng):
        # 12 edges: lengths {2hx, 2hy, 2hz} with multiplicity 4, rotation invariant
        h = rng.uniform(0.2, 2.0, 3)
        b = Box3(rng.uniform(-1, 1, 3), h, random_rot3(rng))
        corners = b.corners()
        dists = sorted(
            np.linalg.norm(corners[i] - corners[j])
            for i in range(8) for j in range(i + 1, 8)
        )
        edges = sorted(dists[:12])
        expect = sorted(np.repeat(2 * np.sort(h), 4))
        np.testing.assert_allclose(edges, expect, atol=1e-9)

    def test_volume(self):
        b = Box3(vec3(0, 0, 0), vec3(1, 2, 3), Rot3.identity())
        assert b.volume == 48.0

    def test_rejects_nonpositive_extent(self):
        with pytest.raises(ValueError):
            Box3(vec3(0, 0, 0), vec3(1, 0, 1), Rot3.identity())


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_projection_round_trip_property(seed):
    rng = np.random.default_rng(seed)
    k = Intrinsics(fx=float(rng.uniform(50, 500)), fy=float(rng.uniform(50, 500)),
                   cx=120.0, cy=90.0, width=240, height=180)
    pose = random_pose(rng)
    p_cam = vec3(*rng.uniform(-2, 2, 2), float(rng.uniform(0.05, 100)))
    p_world = invert(pose).apply(p_cam)
    u, v, d = project(p_world, pose, k)
    np.testing.assert_allclose(unproject(u, v, d, pose, k), p_world, atol=1e-6)
