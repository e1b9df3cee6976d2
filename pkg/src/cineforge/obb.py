"""Minimum-volume oriented bounding box fitting for 3D point clouds.

Strategy: for every convex-hull facet, align one box axis with the facet
normal and solve the in-plane minimum-area rectangle by rotating calipers;
the best candidates are then polished by a local rotation search. A PCA
fit is available as a fast fallback and its frame is always included in
the candidate set, so the minimum-volume fit never loses to it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.transform import Rotation as ScipyRotation

from .geometry import Box3, Rot3

# Floor applied to half-extents of degenerate (point/line/plane) clouds.
HALF_EXTENT_FLOOR = 1e-4


class DegenerateInput(ValueError):
    """Points are coincident, collinear, or coplanar; no 3D hull exists."""


@dataclass(frozen=True)
class ObbFitReport:
    volume: float
    method: str  # "hull-facet" | "pca" | "degenerate"
    candidate_count: int


@dataclass(frozen=True)
class Hull3:
    vertices: np.ndarray  # (n, 3) hull vertex coordinates
    facets: np.ndarray    # (m, 3) triangle indices into vertices
    normals: np.ndarray   # (m, 3) outward unit normals


def _validate_points(points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 1:
        raise ValueError(f"expected (n, 3) point array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point cloud contains non-finite values")
    return pts


def convex_hull(points) -> Hull3:
    """3D convex hull with consistently outward-oriented triangular facets."""
    pts = _validate_points(points)
    if pts.shape[0] < 4:
        raise DegenerateInput(f"need >= 4 points for a 3D hull, got {pts.shape[0]}")
    try:
        hull = ConvexHull(pts)
    except QhullError as e:
        raise DegenerateInput(f"qhull failed (degenerate input): {e}") from e
    vertices = pts[hull.vertices]
    remap = np.full(pts.shape[0], -1, dtype=np.int64)
    remap[hull.vertices] = np.arange(len(hull.vertices))
    facets = remap[hull.simplices]
    normals = hull.equations[:, :3].copy()
    # qhull's simplex winding is not guaranteed to match the outward normal;
    # flip triangles where it does not.
    interior = vertices.mean(axis=0)
    for i, tri in enumerate(facets):
        a, b, c = vertices[tri]
        n = np.cross(b - a, c - a)
        if np.dot(n, hull.equations[i, :3]) < 0:
            facets[i] = tri[::-1]
        if np.dot(normals[i], a - interior) < 0:
            normals[i] = -normals[i]
    return Hull3(vertices=vertices, facets=facets, normals=normals)


def _min_area_rect_angle(pts2d: np.ndarray) -> float:
    """Rotating calipers on the 2D convex hull: angle (radians) of the
    minimum-area enclosing rectangle's first axis."""
    if pts2d.shape[0] >= 3:
        try:
            hull2 = ConvexHull(pts2d)
            pts2d = pts2d[hull2.vertices]
        except QhullError:
            pass  # collinear in-plane points: fall through, any edge works
    n = pts2d.shape[0]
    if n < 2:
        return 0.0
    edges = np.roll(pts2d, -1, axis=0) - pts2d
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    keep = lengths > 1e-15
    if not np.any(keep):
        return 0.0
    angles = np.unique(np.mod(np.arctan2(edges[keep, 1], edges[keep, 0]), np.pi / 2))
    best_angle = 0.0
    best_area = np.inf
    for ang in angles:
        c, s = np.cos(ang), np.sin(ang)
        rot = np.array([[c, s], [-s, c]])
        r = pts2d @ rot.T
        ext = r.max(axis=0) - r.min(axis=0)
        area = ext[0] * ext[1]
        if area < best_area - 1e-15:
            best_area = area
            best_angle = ang
    return float(best_angle)


def _frame_volume(verts: np.ndarray, R: np.ndarray) -> float:
    """Volume of the axis-aligned bounding box of verts in frame R (rows = axes)."""
    local = verts @ R.T
    ext = local.max(axis=0) - local.min(axis=0)
    return float(np.prod(ext))


def _box_from_frame(pts: np.ndarray, R: np.ndarray, method: str, count: int):
    local = pts @ R.T
    lo = local.min(axis=0)
    hi = local.max(axis=0)
    center_local = 0.5 * (lo + hi)
    half = np.maximum(0.5 * (hi - lo), HALF_EXTENT_FLOOR)
    if np.linalg.det(R) < 0:
        R = R.copy()
        R[2] = -R[2]
        center_local = center_local.copy()
        center_local[2] = -center_local[2]
    center_world = R.T @ center_local
    box = Box3(center=center_world, half_extents=half, rotation=Rot3.from_matrix(R.T))
    return box, ObbFitReport(volume=box.volume, method=method, candidate_count=count)


def _orthobasis(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(n, helper)
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    return u, v


def _pca_frame(pts: np.ndarray) -> np.ndarray:
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / max(len(pts), 1)
    _, eigvecs = np.linalg.eigh(cov)
    R = eigvecs.T[::-1]  # rows = axes, descending variance
    if np.linalg.det(R) < 0:
        R[2] = -R[2]
    return R


def _degenerate_fit(pts: np.ndarray) -> tuple[Box3, ObbFitReport]:
    R = _pca_frame(pts)
    box, _ = _box_from_frame(pts, R, "degenerate", 1)
    return box, ObbFitReport(volume=box.volume, method="degenerate", candidate_count=1)


def fit_obb_pca(points) -> tuple[Box3, ObbFitReport]:
    """Covariance-eigenvector oriented box; fast, not minimum volume."""
    pts = _validate_points(points)
    return _box_from_frame(pts, _pca_frame(pts), "pca", 1)


def _refine_frame(verts: np.ndarray, R0: np.ndarray) -> np.ndarray:
    """Polish a candidate frame with Nelder-Mead over a rotation-vector
    perturbation applied on top of R0."""

    def objective(rv):
        dR = ScipyRotation.from_rotvec(rv).as_matrix()
        return _frame_volume(verts, dR @ R0)

    res = minimize(
        objective,
        np.zeros(3),
        method="Nelder-Mead",
        options={"xatol": 1e-5, "fatol": 1e-12, "maxiter": 220},
    )
    if res.fun < _frame_volume(verts, R0):
        return ScipyRotation.from_rotvec(res.x).as_matrix() @ R0
    return R0


def fit_min_volume_obb(
    points,
    up_axis: np.ndarray | None = None,
    refine: bool = True,
) -> tuple[Box3, ObbFitReport]:
    """Near-minimal-volume oriented bounding box of a point cloud.

    up_axis: when given, one box axis is locked to this direction and only
    the in-plane rotation (yaw) is searched.

    Degenerate clouds (point/line/plane) never fail: affected half-extents
    are clamped to HALF_EXTENT_FLOOR and the report says method="degenerate".
    """
    pts = _validate_points(points)

    if up_axis is not None:
        n = np.asarray(up_axis, dtype=np.float64)
        n = n / np.linalg.norm(n)
        u, v = _orthobasis(n)
        pts2d = pts @ np.stack([u, v], axis=1)
        ang = _min_area_rect_angle(pts2d)
        c, s = np.cos(ang), np.sin(ang)
        R = np.stack([c * u + s * v, -s * u + c * v, n])
        return _box_from_frame(pts, R, "hull-facet", 1)

    try:
        hull = convex_hull(pts)
    except DegenerateInput:
        return _degenerate_fit(pts)

    verts = hull.vertices
    # coplanar hull triangles share a normal; deduplicate to one candidate
    # per distinct facet plane (sign-canonicalized), keeping first occurrence
    unit = hull.normals / np.linalg.norm(hull.normals, axis=1, keepdims=True)
    canon = np.where(
        (unit[:, [0]] < -1e-12)
        | ((np.abs(unit[:, [0]]) <= 1e-12) & (unit[:, [1]] < -1e-12))
        | ((np.abs(unit[:, [0]]) <= 1e-12) & (np.abs(unit[:, [1]]) <= 1e-12) & (unit[:, [2]] < 0)),
        -unit,
        unit,
    )
    _, first_idx = np.unique(np.round(canon, 9), axis=0, return_index=True)
    normals = unit[np.sort(first_idx)]

    best_R = None
    best_vol = np.inf
    candidates = 0
    for normal in normals:
        n = normal / np.linalg.norm(normal)
        u, v = _orthobasis(n)
        pts2d = verts @ np.stack([u, v], axis=1)
        ang = _min_area_rect_angle(pts2d)
        c, s = np.cos(ang), np.sin(ang)
        R = np.stack([c * u + s * v, -s * u + c * v, n])
        candidates += 1
        vol = _frame_volume(verts, R)
        # strict inequality keeps the earliest facet on ties
        if vol < best_vol - 1e-15:
            best_vol = vol
            best_R = R

    pca_R = _pca_frame(pts)
    candidates += 1
    if _frame_volume(verts, pca_R) < best_vol - 1e-15:
        best_vol = _frame_volume(verts, pca_R)
        best_R = pca_R
    if best_R is None:
        best_R = pca_R

    if refine:
        best_R = _refine_frame(verts, best_R)

    return _box_from_frame(pts, best_R, "hull-facet", candidates)
