"""Controllability metrics: mean box IoU, center-point trajectory deviation
(pixels), and RMSE depth deviation (meters), computed from prediction /
ground-truth pairs ingested from files. No detector is ever run here."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class NoValidPairs(ValueError):
    pass


class EmptyRegion(ValueError):
    pass


@dataclass(frozen=True)
class Box2:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"degenerate 2D box {(self.x0, self.y0, self.x1, self.y1)}")

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))


@dataclass
class TrackEval:
    """Per-frame optional evaluation pairs for one clip."""

    box_pairs: list[tuple[Box2, Box2] | None] = field(default_factory=list)
    depth_pairs: list[tuple[float, float] | None] = field(default_factory=list)


def iou(a: Box2, b: Box2) -> float:
    ix = min(a.x1, b.x1) - max(a.x0, b.x0)
    iy = min(a.y1, b.y1) - max(a.y0, b.y0)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def _valid(pairs):
    return [p for p in pairs if p is not None]


def miou(ev: TrackEval) -> float:
    pairs = _valid(ev.box_pairs)
    if not pairs:
        raise NoValidPairs("no frames with both predicted and ground-truth boxes")
    return float(np.mean([iou(p, g) for p, g in pairs]))


def traj_deviation(ev: TrackEval) -> float:
    """Mean Euclidean distance between predicted and ground-truth box centers."""
    pairs = _valid(ev.box_pairs)
    if not pairs:
        raise NoValidPairs("no frames with both predicted and ground-truth boxes")
    dists = [
        float(np.hypot(p.center[0] - g.center[0], p.center[1] - g.center[1]))
        for p, g in pairs
    ]
    return float(np.mean(dists))


def mean_region_depth(mask: np.ndarray, depth: np.ndarray) -> float:
    """Mean of depth values under the mask; zero depth counts as invalid."""
    if mask.shape != depth.shape:
        raise ValueError(f"mask {mask.shape} and depth {depth.shape} sizes differ")
    sel = (mask != 0) & (depth > 0)
    if not np.any(sel):
        raise EmptyRegion("mask covers no pixel with valid depth")
    return float(depth[sel].mean())


def depth_deviation(ev: TrackEval) -> float:
    """RMSE between predicted region depths and ground-truth box depths."""
    pairs = _valid(ev.depth_pairs)
    if not pairs:
        raise NoValidPairs("no frames with both predicted and ground-truth depth")
    diffs = np.array([p - g for p, g in pairs])
    return float(np.sqrt(np.mean(diffs * diffs)))


def box_coverage(ev: TrackEval) -> float:
    if not ev.box_pairs:
        return 0.0
    return len(_valid(ev.box_pairs)) / len(ev.box_pairs)


def depth_coverage(ev: TrackEval) -> float:
    if not ev.depth_pairs:
        return 0.0
    return len(_valid(ev.depth_pairs)) / len(ev.depth_pairs)


def load_track_eval_jsonl(path_or_text: str, from_text: bool = False) -> TrackEval:
    """Evaluation input: one JSON object per line with fields
    frame, pred_box, gt_box, pred_depth, gt_depth (boxes [x0,y0,x1,y1];
    any field may be null for frames missing a detection)."""
    import json

    text = path_or_text if from_text else open(path_or_text).read()
    records = []
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise ValueError(f"line {i}: invalid JSON: {e.msg}") from e
        records.append((rec.get("frame", i - 1), rec))
    records.sort(key=lambda r: r[0])

    ev = TrackEval()
    for _, rec in records:
        pb, gb = rec.get("pred_box"), rec.get("gt_box")
        if pb is not None and gb is not None:
            ev.box_pairs.append((Box2(*pb), Box2(*gb)))
        else:
            ev.box_pairs.append(None)
        pd, gd = rec.get("pred_depth"), rec.get("gt_depth")
        if pd is not None and gd is not None:
            ev.depth_pairs.append((float(pd), float(gd)))
        else:
            ev.depth_pairs.append(None)
    return ev


def evaluate(ev: TrackEval) -> dict:
    """Full report for one clip: metric values plus coverage fractions.

    Metrics whose inputs are entirely missing are reported as null rather
    than raising, so a clip without depth pairs still yields box metrics.
    """
    report: dict = {
        "coverage": {"boxes": box_coverage(ev), "depth": depth_coverage(ev)},
    }
    try:
        report["miou"] = miou(ev)
        report["traj_deviation_px"] = traj_deviation(ev)
    except NoValidPairs:
        report["miou"] = None
        report["traj_deviation_px"] = None
    try:
        report["depth_deviation_m"] = depth_deviation(ev)
    except NoValidPairs:
        report["depth_deviation_m"] = None
    return report
