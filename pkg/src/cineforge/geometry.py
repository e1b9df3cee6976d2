"""Pinhole camera math, rigid poses, and oriented-box primitives.

Conventions (fixed across the whole package):
  * right-handed coordinates, camera looks down +z, +x right, +y down
  * depth means camera-space z, not ray length
  * poses are stored world-to-camera: x_cam = R @ x_world + t
  * rotation export is row-major 3x3
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class BehindCamera(ValueError):
    """Point has non-positive camera-space z."""


class NonPositiveDepth(ValueError):
    """Unprojection requires depth > 0."""


def vec3(x: float, y: float, z: float) -> np.ndarray:
    return np.array([x, y, z], dtype=np.float64)


def _as_vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=np.float64)
    if a.shape != (3,):
        raise ValueError(f"expected 3-vector, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class Rot3:
    """Rotation as a unit quaternion (w, x, y, z).

    Renormalized after every composition to bound drift in long
    keyframe chains.
    """

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        n = np.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if not np.isfinite(n) or n < 1e-12:
            raise ValueError("quaternion has near-zero or non-finite norm")
        if abs(n - 1.0) > 1e-9:
            object.__setattr__(self, "w", self.w / n)
            object.__setattr__(self, "x", self.x / n)
            object.__setattr__(self, "y", self.y / n)
            object.__setattr__(self, "z", self.z / n)

    @staticmethod
    def identity() -> "Rot3":
        return Rot3(1.0, 0.0, 0.0, 0.0)

    @staticmethod
    def from_quat(wxyz) -> "Rot3":
        w, x, y, z = (float(c) for c in wxyz)
        return Rot3(w, x, y, z)

    @staticmethod
    def from_axis_angle(axis, angle_rad: float) -> "Rot3":
        a = _as_vec3(axis)
        n = np.linalg.norm(a)
        if n < 1e-12:
            raise ValueError("zero rotation axis")
        a = a / n
        h = 0.5 * angle_rad
        s = np.sin(h)
        return Rot3(float(np.cos(h)), float(a[0] * s), float(a[1] * s), float(a[2] * s))

    @staticmethod
    def from_matrix(m) -> "Rot3":
        """Shepperd's method; m must be orthonormal with det +1."""
        R = np.asarray(m, dtype=np.float64)
        if R.shape != (3, 3):
            raise ValueError("rotation matrix must be 3x3")
        tr = R[0, 0] + R[1, 1] + R[2, 2]
        if tr > 0:
            s = 0.5 / np.sqrt(tr + 1.0)
            w = 0.25 / s
            x = (R[2, 1] - R[1, 2]) * s
            y = (R[0, 2] - R[2, 0]) * s
            z = (R[1, 0] - R[0, 1]) * s
        elif R[0, 0] > R[1, 1] and R[0, 0] > R[2, 2]:
            s = 2.0 * np.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2])
            w = (R[2, 1] - R[1, 2]) / s
            x = 0.25 * s
            y = (R[0, 1] + R[1, 0]) / s
            z = (R[0, 2] + R[2, 0]) / s
        elif R[1, 1] > R[2, 2]:
            s = 2.0 * np.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2])
            w = (R[0, 2] - R[2, 0]) / s
            x = (R[0, 1] + R[1, 0]) / s
            y = 0.25 * s
            z = (R[1, 2] + R[2, 1]) / s
        else:
            s = 2.0 * np.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1])
            w = (R[1, 0] - R[0, 1]) / s
            x = (R[0, 2] + R[2, 0]) / s
            y = (R[1, 2] + R[2, 1]) / s
            z = 0.25 * s
        return Rot3(float(w), float(x), float(y), float(z))

    def as_quat(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=np.float64)

    def matrix(self) -> np.ndarray:
        w, x, y, z = self.w, self.x, self.y, self.z
        return np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
                [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
                [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
            ],
            dtype=np.float64,
        )

    def apply(self, v) -> np.ndarray:
        return self.matrix() @ _as_vec3(v)

    def __mul__(self, other: "Rot3") -> "Rot3":
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return Rot3(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )

    def inverse(self) -> "Rot3":
        return Rot3(self.w, -self.x, -self.y, -self.z)

    def slerp(self, other: "Rot3", t: float) -> "Rot3":
        """Shortest-arc spherical interpolation, t in [0, 1]."""
        q0 = self.as_quat()
        q1 = other.as_quat()
        dot = float(np.dot(q0, q1))
        if dot < 0.0:
            q1 = -q1
            dot = -dot
        if dot > 1.0 - 1e-10:
            q = (1.0 - t) * q0 + t * q1  # nearly parallel: lerp + renormalize
        else:
            theta = np.arccos(min(dot, 1.0))
            s = np.sin(theta)
            q = (np.sin((1.0 - t) * theta) / s) * q0 + (np.sin(t * theta) / s) * q1
        return Rot3.from_quat(q)


@dataclass(frozen=True)
class Pose:
    """World-to-camera rigid transform: x_cam = rotation @ x_world + translation."""

    rotation: Rot3
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "translation", _as_vec3(self.translation))

    @staticmethod
    def identity() -> "Pose":
        return Pose(Rot3.identity(), np.zeros(3))

    def apply(self, p_world) -> np.ndarray:
        return self.rotation.apply(p_world) + self.translation

    def matrix(self) -> np.ndarray:
        """4x4 homogeneous form."""
        m = np.eye(4)
        m[:3, :3] = self.rotation.matrix()
        m[:3, 3] = self.translation
        return m


def compose(a: Pose, b: Pose) -> Pose:
    """Transform applying b first, then a."""
    r = a.rotation * b.rotation
    t = a.rotation.apply(b.translation) + a.translation
    return Pose(r, t)


def invert(p: Pose) -> Pose:
    rinv = p.rotation.inverse()
    return Pose(rinv, -rinv.apply(p.translation))


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole parameters. fx, fy, cx, cy in pixels; width/height in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("raster size must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must be inside the raster")

    @staticmethod
    def from_fov(width: int, height: int, hfov_deg: float = 60.0) -> "Intrinsics":
        """Default intrinsics when none are known: symmetric pinhole from a
        horizontal field of view."""
        f = 0.5 * width / np.tan(np.radians(hfov_deg) / 2)
        return Intrinsics(f, f, width / 2.0, height / 2.0, width, height)


def project(p, pose: Pose, k: Intrinsics) -> tuple[float, float, float]:
    """World point -> (u, v, depth). Raises BehindCamera when camera-space z <= 0."""
    c = pose.apply(p)
    z = float(c[2])
    if z <= 0:
        raise BehindCamera(f"camera-space z = {z} <= 0")
    u = k.fx * float(c[0]) / z + k.cx
    v = k.fy * float(c[1]) / z + k.cy
    return u, v, z


def unproject(u: float, v: float, depth: float, pose: Pose, k: Intrinsics) -> np.ndarray:
    """Pixel + metric depth -> world point. Inverse of project."""
    if depth <= 0:
        raise NonPositiveDepth(f"depth = {depth} <= 0")
    x = (u - k.cx) / k.fx * depth
    y = (v - k.cy) / k.fy * depth
    return invert(pose).apply(vec3(x, y, depth))


# Local-frame corner signs, fixed ordering: bottom face (-z) CCW then top face.
_CORNER_SIGNS = np.array(
    [
        [-1, -1, -1],
        [+1, -1, -1],
        [+1, +1, -1],
        [-1, +1, -1],
        [-1, -1, +1],
        [+1, -1, +1],
        [+1, +1, +1],
        [-1, +1, +1],
    ],
    dtype=np.float64,
)

# 12 triangles (corner indices) covering the 6 faces; outward winding.
BOX_TRIANGLES = np.array(
    [
        [0, 2, 1], [0, 3, 2],  # -z
        [4, 5, 6], [4, 6, 7],  # +z
        [0, 1, 5], [0, 5, 4],  # -y
        [2, 3, 7], [2, 7, 6],  # +y
        [1, 2, 6], [1, 6, 5],  # +x
        [3, 0, 4], [3, 4, 7],  # -x
    ],
    dtype=np.int64,
)


@dataclass(frozen=True)
class Box3:
    """Oriented 3D box: center + half-extents in its local frame + rotation
    (local -> world)."""

    center: np.ndarray
    half_extents: np.ndarray
    rotation: Rot3

    def __post_init__(self):
        object.__setattr__(self, "center", _as_vec3(self.center))
        h = _as_vec3(self.half_extents)
        if np.any(h <= 0):
            raise ValueError("half-extents must be strictly positive")
        object.__setattr__(self, "half_extents", h)

    @property
    def volume(self) -> float:
        return float(8.0 * np.prod(self.half_extents))

    def corners(self) -> np.ndarray:
        """8 world-space corners in the fixed _CORNER_SIGNS ordering."""
        local = _CORNER_SIGNS * self.half_extents
        return local @ self.rotation.matrix().T + self.center

    def contains(self, points, tol: float = 1e-7) -> np.ndarray:
        """Boolean mask: which points fall inside (with tolerance)."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        local = (pts - self.center) @ self.rotation.matrix()
        return np.all(np.abs(local) <= self.half_extents + tol, axis=1)

    def translated(self, offset) -> "Box3":
        return Box3(self.center + _as_vec3(offset), self.half_extents, self.rotation)


def box_corners(b: Box3) -> np.ndarray:
    return b.corners()
