import numpy as np
import pytest
from scipy.spatial.transform import Rotation as ScipyRotation

from cineforge.geometry import Box3, Intrinsics, Pose, Rot3, vec3


def random_rot3(rng: np.random.Generator) -> Rot3:
    q = ScipyRotation.random(random_state=int(rng.integers(2**31))).as_quat()
    return Rot3(float(q[3]), float(q[0]), float(q[1]), float(q[2]))


def random_pose(rng: np.random.Generator, t_scale: float = 2.0) -> Pose:
    return Pose(rotation=random_rot3(rng), translation=rng.uniform(-t_scale, t_scale, 3))


def random_box(rng: np.random.Generator, z_range=(2.0, 6.0)) -> Box3:
    c = vec3(float(rng.uniform(-1.5, 1.5)), float(rng.uniform(-1.5, 1.5)),
             float(rng.uniform(*z_range)))
    return Box3(center=c, half_extents=rng.uniform(0.2, 0.9, 3), rotation=random_rot3(rng))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def simple_k():
    return Intrinsics(fx=100.0, fy=100.0, cx=160.0, cy=120.0, width=320, height=240)
