"""Camera sequence text files.

Native format: one line per frame, 12 space-separated decimals — row-major
3x3 rotation followed by the translation (world-to-camera). Decimals are
written with up to 17 significant digits so parse(write(x)) == x exactly.

RealEstate10K import: 19 fields per line (timestamp, fx, fy, cx, cy, 0, 0,
then the 3x4 [R|t] row-major); the importer extracts the pose rows and the
per-clip intrinsics from the first line.
"""

from __future__ import annotations

import numpy as np


class FieldCountError(ValueError):
    def __init__(self, line_no: int, expected: int, got: int):
        self.line_no = line_no
        self.expected = expected
        self.got = got
        super().__init__(f"line {line_no}: expected {expected} fields, got {got}")


class NonFiniteValue(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def format_camera_txt(rt: np.ndarray) -> str:
    rt = np.asarray(rt, dtype=np.float64)
    if rt.ndim != 2 or rt.shape[1] != 12:
        raise ValueError(f"expected (F, 12) array, got {rt.shape}")
    return "\n".join(" ".join(_fmt(x) for x in row) for row in rt) + "\n"


def write_camera_txt(path: str, rt: np.ndarray):
    from .scene_json import atomic_write_text

    atomic_write_text(path, format_camera_txt(rt))


def _parse_floats(line: str, line_no: int, expected: int) -> np.ndarray:
    fields = line.split()
    if len(fields) != expected:
        raise FieldCountError(line_no, expected, len(fields))
    try:
        vals = np.array([float(f) for f in fields], dtype=np.float64)
    except ValueError as e:
        raise NonFiniteValue(f"line {line_no}: {e}") from e
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue(f"line {line_no}: non-finite value")
    return vals


def parse_camera_txt(path_or_text: str, from_text: bool = False) -> np.ndarray:
    """Parse the native 12-field format into an (F, 12) array."""
    text = path_or_text if from_text else open(path_or_text).read()
    rows = []
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        rows.append(_parse_floats(line, i, 12))
    if not rows:
        raise ValueError("camera file contains no pose lines")
    return np.stack(rows)


def parse_realestate10k(path_or_text: str, from_text: bool = False):
    """Import a RealEstate10K-style pose file.

    Returns (rt, intrinsics_fields) where rt is the (F, 12) native layout and
    intrinsics_fields = (fx, fy, cx, cy) from the first pose line (values are
    as stored in the file; RealEstate10K normalizes them by image size).
    """
    text = path_or_text if from_text else open(path_or_text).read()
    rows = []
    intr = None
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        # first line of a RealEstate10K clip file is a lone video URL
        if not rows and intr is None and len(line.split()) == 1:
            continue
        vals = _parse_floats(line, i, 19)
        if intr is None:
            intr = tuple(vals[1:5])
        pose34 = vals[7:].reshape(3, 4)
        rows.append(np.concatenate([pose34[:, :3].reshape(-1), pose34[:, 3]]))
    if not rows:
        raise ValueError("RealEstate10K file contains no pose lines")
    return np.stack(rows), intr
