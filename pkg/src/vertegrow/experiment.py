"""Experiment harness: slice-distance sweeps, slope-based distance selection,
CSV reports.

The sparse-annotation workflow: rasterize a session, drop annotated slices to
a chosen slice distance, crop to the remaining seeds, grow, paste back. A
sweep runs that pipeline across a range of distances and records annotation
time, runtime and quality per distance; the slope of annotation time over
distance picks the point where extra sparsity stops paying.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import metrics, seeds
from .engine import EngineConfig, SegmentationResult, segment
from .errors import DataError
from .volume import Volume, crop_to_seeds, uncrop_labels

CROP_MARGIN = 2


@dataclass
class SweepPoint:
    slice_distance: int
    annotation_seconds: float
    runtime_seconds: float
    dsc: float
    jac: float
    hd: float = float("nan")


@dataclass
class SlopeSeries:
    points: list[SweepPoint]
    slopes: list[tuple[tuple[int, int], float]] = field(default_factory=list)


@dataclass
class ReportRow:
    id: str
    algorithm: str
    dsc: float
    jac: float
    hd: float
    runtime_s: float
    annotation_s: float


def slope(p1: tuple[float, float], p2: tuple[float, float]) -> float:
    """(y2 - y1) / (x2 - x1), the rate of change between two points."""
    (x1, y1), (x2, y2) = p1, p2
    if x2 == x1:
        raise DataError("slope undefined for equal x values")
    return (y2 - y1) / (x2 - x1)


def segment_session(vol: Volume, session: seeds.AnnotationSession,
                    cfg: EngineConfig | None = None, slice_distance: int = 0,
                    margin: int = CROP_MARGIN
                    ) -> tuple[np.ndarray, SegmentationResult, float]:
    """Run the full annotation-to-labels pipeline on one session.

    Returns (full-size labels, engine result, annotation seconds over the
    kept slices). The CLI and the service both call this, so their outputs
    agree bit for bit.
    """
    labels = seeds.rasterize(session, vol.dims)
    labels = seeds.subsample_slices(labels, slice_distance)
    kept = seeds.annotated_slices(labels)
    ann_seconds = seeds.annotation_time(session, kept)
    sub_vol, sub_labels, region = crop_to_seeds(vol, labels, margin=margin)
    result = segment(sub_vol, sub_labels, cfg)
    full = uncrop_labels(result.labels, region, vol.shape)
    return full, result, ann_seconds


def run_sweep(vol: Volume, session: seeds.AnnotationSession, distances,
              cfg: EngineConfig | None = None,
              gt: np.ndarray | None = None) -> SlopeSeries:
    """Segment at each slice distance and chart time against quality.

    Slopes are computed on (distance, annotation_seconds) pairs of
    consecutive points. Quality columns need gt; they are NaN without it.
    """
    labels = seeds.rasterize(session, vol.dims)
    if len(seeds.annotated_slices(labels)) < 2:
        raise DataError("sweep needs at least 2 annotated slices")
    points = []
    for d in sorted(set(int(d) for d in distances)):
        full, result, ann_seconds = segment_session(
            vol, session, cfg, slice_distance=d)
        if gt is not None:
            m = full == 1
            point = SweepPoint(d, ann_seconds, result.elapsed,
                               metrics.dice(m, gt), metrics.jaccard(m, gt),
                               metrics.hausdorff(m, gt))
        else:
            nan = float("nan")
            point = SweepPoint(d, ann_seconds, result.elapsed, nan, nan)
        points.append(point)
    slopes = [(((a.slice_distance, b.slice_distance)),
               slope((a.slice_distance, a.annotation_seconds),
                     (b.slice_distance, b.annotation_seconds)))
              for a, b in zip(points, points[1:])]
    return SlopeSeries(points, slopes)


def select_distance(series: SlopeSeries, threshold: float = -1.0) -> int:
    """Smallest distance whose next-step annotation-time slope exceeds the
    threshold (the savings have flattened); the largest distance when none
    does."""
    if len(series.points) < 2:
        raise DataError("distance selection needs at least 2 sweep points")
    for (d_from, _), value in series.slopes:
        if value > threshold:
            return d_from
    return series.points[-1].slice_distance


def emit_report(rows: list[ReportRow], path) -> None:
    """Write per-run metric rows as CSV with mean and stddev footer rows."""
    if not rows:
        raise DataError("no report rows")
    rows = sorted(rows, key=lambda r: (r.id, r.algorithm))
    numeric = ["dsc", "jac", "hd", "runtime_s", "annotation_s"]
    table = np.array([[getattr(r, c) for c in numeric] for r in rows],
                     dtype=np.float64)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "algorithm"] + numeric)
        for r in rows:
            writer.writerow([r.id, r.algorithm]
                            + [f"{getattr(r, c):.6f}" for c in numeric])
        writer.writerow(["mean", ""] + [f"{v:.6f}" for v in table.mean(axis=0)])
        writer.writerow(["stddev", ""] + [f"{v:.6f}" for v in table.std(axis=0)])
