import numpy as np
import pytest
from scipy.spatial.transform import Rotation as ScipyRotation

from cineforge.geometry import Box3, Rot3, vec3
from cineforge.obb import (
    DegenerateInput,
    convex_hull,
    fit_min_volume_obb,
    fit_obb_pca,
)
from conftest import random_rot3

CUBE = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
                dtype=float) * 0.5


class TestConvexHull:
    def test_cube(self):
        hull = convex_hull(CUBE)
        assert len(hull.vertices) == 8
        assert len(hull.facets) == 12

    def test_interior_point_excluded(self):
        pts = np.vstack([CUBE, [0, 0, 0]])
        hull = convex_hull(pts)
        assert len(hull.vertices) == 8

    def test_coplanar_raises(self):
        pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], dtype=float)
        with pytest.raises(DegenerateInput):
            convex_hull(pts)

    def test_too_few_points(self):
        with pytest.raises(DegenerateInput):
            convex_hull(np.zeros((3, 3)))

    def test_all_points_inside(self, rng):
        pts = rng.normal(size=(100, 3))
        hull = convex_hull(pts)
        diag = np.linalg.norm(pts.max(0) - pts.min(0))
        for i, tri in enumerate(hull.facets):
            n = hull.normals[i]
            d = (pts - hull.vertices[tri[0]]) @ n
            assert d.max() <= 1e-9 * diag

    def test_facets_outward(self, rng):
        pts = rng.normal(size=(60, 3))
        hull = convex_hull(pts)
        centroid = hull.vertices.mean(axis=0)
        for i, tri in enumerate(hull.facets):
            a, b, c = hull.vertices[tri]
            n = np.cross(b - a, c - a)
            assert np.dot(n, a - centroid) > 0


class TestMinVolumeObb:
    def test_axis_aligned_cube(self):
        box, report = fit_min_volume_obb(CUBE)
        np.testing.assert_allclose(np.sort(box.half_extents), [0.5, 0.5, 0.5], atol=1e-9)
        assert abs(box.volume - 1.0) < 1e-6
        assert report.method == "hull-facet"

    def test_rotated_cube_volume_recovered(self, rng):
        R = random_rot3(rng).matrix()
        box, _ = fit_min_volume_obb(CUBE @ R.T)
        assert abs(box.volume - 1.0) < 1e-6

    def test_containment_random(self, rng):
        for _ in range(10):
            pts = rng.normal(size=(int(rng.integers(4, 200)), 3)) * rng.uniform(0.1, 3, 3)
            box, _ = fit_min_volume_obb(pts)
            assert box.contains(pts).all()

    def test_volume_not_above_aabb(self, rng):
        for _ in range(10):
            pts = rng.normal(size=(80, 3)) * [3, 1, 0.5]
            box, _ = fit_min_volume_obb(pts)
            aabb_vol = np.prod(pts.max(0) - pts.min(0))
            assert box.volume <= aabb_vol + 1e-9

    def test_dominates_pca(self, rng):
        for _ in range(10):
            pts = rng.normal(size=(120, 3)) @ random_rot3(rng).matrix()
            mv, _ = fit_min_volume_obb(pts)
            pca, _ = fit_obb_pca(pts)
            assert mv.volume <= pca.volume + 1e-9

    def test_rigid_equivariance(self, rng):
        pts = rng.normal(size=(150, 3)) * [2, 1, 0.4]
        base, _ = fit_min_volume_obb(pts)
        R = random_rot3(rng).matrix()
        t = rng.uniform(-5, 5, 3)
        moved, _ = fit_min_volume_obb(pts @ R.T + t)
        assert abs(moved.volume - base.volume) / base.volume < 1e-6

    def test_degenerate_single_point(self):
        box, report = fit_min_volume_obb(np.array([[1.0, 2.0, 3.0]]))
        assert report.method == "degenerate"
        np.testing.assert_allclose(box.center, [1, 2, 3], atol=1e-9)
        np.testing.assert_allclose(box.half_extents, 1e-4)

    def test_degenerate_planar(self, rng):
        pts = np.column_stack([rng.normal(size=(50, 2)), np.zeros(50)])
        box, report = fit_min_volume_obb(pts)
        assert report.method == "degenerate"
        assert box.contains(pts).all()
        assert np.min(box.half_extents) == pytest.approx(1e-4)

    def test_up_axis_locked(self, rng):
        pts = rng.uniform(-1, 1, (100, 3)) * [2, 0.5, 1]
        box, _ = fit_min_volume_obb(pts, up_axis=np.array([0.0, 1.0, 0.0]))
        # one box axis must be the requested up direction
        axes = box.rotation.matrix().T
        align = np.abs(axes @ [0, 1, 0]).max()
        assert align > 1 - 1e-9
        assert box.contains(pts).all()


class TestPcaFit:
    def test_single_point(self):
        box, report = fit_obb_pca(np.array([[0.5, -1.0, 2.0]]))
        np.testing.assert_allclose(box.center, [0.5, -1, 2], atol=1e-12)
        np.testing.assert_allclose(box.half_extents, 1e-4)

    def test_line_segment(self):
        t = np.linspace(0, 1, 20)
        pts = np.column_stack([t * 3, t * 0, t * 0])
        box, _ = fit_obb_pca(pts)
        axes = box.rotation.matrix().T
        primary = axes[np.argmax(box.half_extents)]
        assert abs(abs(primary @ [1, 0, 0]) - 1) < 1e-9
        assert sorted(box.half_extents)[:2] == [1e-4, 1e-4]

    def test_anisotropic_gaussian_axis(self, rng):
        # primary axis within 5 degrees of the true dominant direction
        R = ScipyRotation.from_euler("zyx", [0.3, -0.5, 0.8]).as_matrix()
        pts = (rng.normal(size=(4000, 3)) * [3, 1, 0.2]) @ R.T
        box, _ = fit_obb_pca(pts)
        axes = box.rotation.matrix().T
        primary = axes[np.argmax(box.half_extents)]
        truth = R @ np.array([1.0, 0, 0])
        angle = np.degrees(np.arccos(min(abs(primary @ truth), 1.0)))
        assert angle < 5.0

    def test_containment(self, rng):
        pts = rng.normal(size=(200, 3))
        box, _ = fit_obb_pca(pts)
        assert box.contains(pts).all()
