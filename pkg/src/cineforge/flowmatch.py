"""Rectified-flow numerics over flat real arrays, independent of any network.

The straight path z_t = (1-t) * z0 + t * z1 has constant velocity z1 - z0,
which is exactly the regression target; sampling integrates the velocity
field from t=1 (noise) down to t=0 (data) with explicit Euler steps.
We identify the noise endpoint z1 with the interpolation endpoint eps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class ShapeMismatch(ValueError):
    pass


class TOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class FlatTensor:
    """Flat value vector plus an opaque shape tag checked on binary ops."""

    values: np.ndarray
    shape_tag: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise ValueError("FlatTensor values must be finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "shape_tag", tuple(self.shape_tag))

    @staticmethod
    def of(array_like) -> "FlatTensor":
        a = np.asarray(array_like, dtype=np.float64)
        return FlatTensor(a.reshape(-1), a.shape)


VelocityFn = Callable[[FlatTensor, float], FlatTensor]


def _check_shapes(*tensors: FlatTensor):
    tag = tensors[0].shape_tag
    n = tensors[0].values.size
    for t in tensors[1:]:
        if t.shape_tag != tag or t.values.size != n:
            raise ShapeMismatch(f"shape tags differ: {tag} vs {t.shape_tag}")


def interpolate(z0: FlatTensor, eps: FlatTensor, t: float) -> FlatTensor:
    """Straight path between data z0 (t=0) and noise eps (t=1)."""
    _check_shapes(z0, eps)
    if not (0.0 <= t <= 1.0):
        raise TOutOfRange(f"t = {t} outside [0, 1]")
    if t == 0.0:
        return z0
    if t == 1.0:
        return eps
    return FlatTensor((1.0 - t) * z0.values + t * eps.values, z0.shape_tag)


def cfm_target(z0: FlatTensor, z1: FlatTensor) -> FlatTensor:
    """Constant velocity of the straight path: z1 - z0."""
    _check_shapes(z0, z1)
    return FlatTensor(z1.values - z0.values, z0.shape_tag)


def cfm_loss(pred_v: FlatTensor, z0: FlatTensor, z1: FlatTensor) -> float:
    """Mean squared error between a predicted velocity and the path target."""
    _check_shapes(pred_v, z0, z1)
    diff = cfm_target(z0, z1).values - pred_v.values
    return float(np.mean(diff * diff))


def euler_integrate(
    v: VelocityFn,
    z_start: FlatTensor,
    t_start: float = 1.0,
    t_end: float = 0.0,
    steps: int = 1,
) -> FlatTensor:
    """Explicit Euler integration of dz = v(z, t) dt with uniform steps.

    Default direction is 1 -> 0 (noise to data). Exact for constant fields
    regardless of step count.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not (0.0 <= t_end <= t_start <= 1.0):
        raise TOutOfRange(f"need 0 <= t_end <= t_start <= 1, got {t_start} -> {t_end}")
    dt = (t_end - t_start) / steps
    z = z_start
    t = t_start
    for _ in range(steps):
        vel = v(z, t)
        _check_shapes(z, vel)
        z = FlatTensor(z.values + dt * vel.values, z.shape_tag)
        t += dt
    return z
