"""Raster carriers: 16-bit quantized depth PNG, indexed entity-ID PNG, and
32-bit float PFM for lossless depth."""

from __future__ import annotations

import io
import re

import numpy as np
from PIL import Image


class DepthOverflow(ValueError):
    pass


def encode_depth_png16(depth: np.ndarray, scale: float = 0.001) -> bytes:
    """Quantize metric depth to 16-bit PNG: stored = round(depth / scale).

    0 is reserved for the no-geometry sentinel; nonzero depths that would
    round to 0 are clamped to 1 (half a quantum of error, same bound as
    everywhere else).
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    d = np.asarray(depth, dtype=np.float64)
    max_code = float(d.max()) / scale
    if max_code > 65535:
        raise DepthOverflow(
            f"max depth {d.max():g} m exceeds PNG16 range at scale {scale:g}; "
            f"use scale >= {d.max() / 65535:.6g}"
        )
    codes = np.round(d / scale).astype(np.uint16)
    codes[(d > 0) & (codes == 0)] = 1
    img = Image.fromarray(codes)  # uint16 -> 16-bit grayscale PNG
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def decode_depth_png16(data: bytes, scale: float = 0.001) -> np.ndarray:
    img = Image.open(io.BytesIO(data))
    codes = np.asarray(img, dtype=np.uint16)
    return codes.astype(np.float64) * scale


def encode_idmap_png(ids: np.ndarray) -> bytes:
    """Entity-ID raster as 8-bit palette PNG; palette index == entity id."""
    a = np.asarray(ids)
    if a.min() < 0 or a.max() > 255:
        raise ValueError(f"entity ids must fit in [0, 255], got max {a.max()}")
    img = Image.fromarray(a.astype(np.uint8), mode="P")
    # grayscale identity palette keeps the file viewable and the ids exact
    img.putpalette([c for i in range(256) for c in (i, i, i)])
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def decode_idmap_png(data: bytes) -> np.ndarray:
    img = Image.open(io.BytesIO(data))
    if img.mode not in ("P", "L"):
        raise ValueError(f"expected indexed PNG, got mode {img.mode}")
    return np.asarray(img, dtype=np.int32)


def write_pfm(depth: np.ndarray) -> bytes:
    """Grayscale little-endian PFM (rows stored bottom-up per the format)."""
    d = np.asarray(depth, dtype=np.float32)
    if d.ndim != 2:
        raise ValueError("PFM writer expects a 2D array")
    header = f"Pf\n{d.shape[1]} {d.shape[0]}\n-1.0\n".encode("ascii")
    return header + np.flipud(d).tobytes()


def read_pfm(data: bytes) -> np.ndarray:
    m = re.match(rb"(P[fF])\s+(\d+)\s+(\d+)\s+([-+0-9.eE]+)\s", data)
    if not m:
        raise ValueError("not a PFM file (bad header)")
    if m.group(1) != b"Pf":
        raise ValueError("only grayscale PFM ('Pf') is supported")
    width, height = int(m.group(2)), int(m.group(3))
    scale = float(m.group(4))
    endian = "<" if scale < 0 else ">"
    payload = data[m.end():]
    if len(payload) < 4 * width * height:
        raise ValueError("PFM payload truncated")
    pixels = np.frombuffer(payload, dtype=endian + "f4", count=width * height)
    return np.flipud(pixels.reshape(height, width)).astype(np.float64)
