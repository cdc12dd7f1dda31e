"""Seed annotations: strokes, label fields, slice subsampling, timing.

A label field is a plain numpy int16 array of shape (Z, M, N) sharing the
volume layout: -1 marks background (exterior) seeds, 0 unlabeled, positive
values foreground classes (1 for the binary case).

Strokes are polylines drawn on one sagittal slice with a round brush; a
session is the ordered stroke list plus per-slice annotation time in seconds.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError


@dataclass
class Stroke:
    """One drawn mark on a slice.

    points are ordered (i, j) pixel coordinates; consecutive points are
    connected. brush_radius 0 paints single pixels. elapsed_ms optionally
    records how long the stroke took to draw (used by the service to
    accumulate per-slice time and to roll it back on undo).
    """

    label: int
    slice_z: int
    points: list[tuple[int, int]]
    brush_radius: int = 0
    elapsed_ms: float | None = None

    def __post_init__(self):
        if self.label == 0:
            raise DataError("stroke label must be nonzero")
        if not self.points:
            raise DataError("stroke has no points")
        if self.brush_radius < 0:
            raise DataError("negative brush radius")
        self.points = [(int(i), int(j)) for i, j in self.points]


@dataclass
class AnnotationSession:
    """Ordered strokes plus per-slice timing for one exam."""

    exam_id: str = ""
    strokes: list[Stroke] = field(default_factory=list)
    per_slice_time: dict[int, float] = field(default_factory=dict)

    def add_stroke(self, stroke: Stroke) -> None:
        """Append a stroke, accumulating its elapsed time on its slice."""
        self.strokes.append(stroke)
        secs = (stroke.elapsed_ms or 0.0) / 1000.0
        self.per_slice_time[stroke.slice_z] = (
            self.per_slice_time.get(stroke.slice_z, 0.0) + secs)

    def pop_stroke(self) -> Stroke:
        """Remove the most recent stroke, rolling back its time."""
        if not self.strokes:
            raise DataError("no strokes to remove")
        stroke = self.strokes.pop()
        if stroke.elapsed_ms is not None:
            z = stroke.slice_z
            self.per_slice_time[z] = max(
                0.0, self.per_slice_time.get(z, 0.0) - stroke.elapsed_ms / 1000.0)
        return stroke

    def validate(self) -> None:
        for stroke in self.strokes:
            if stroke.slice_z not in self.per_slice_time:
                raise DataError(
                    f"stroke on slice {stroke.slice_z} has no timing entry")
        if any(t < 0 for t in self.per_slice_time.values()):
            raise DataError("negative per-slice time")


def _disc_offsets(radius: int) -> np.ndarray:
    r = int(radius)
    span = np.arange(-r, r + 1)
    di, dj = np.meshgrid(span, span, indexing="ij")
    keep = di * di + dj * dj <= r * r
    return np.stack([di[keep], dj[keep]], axis=1)


def _bresenham(p0: tuple[int, int], p1: tuple[int, int]) -> list[tuple[int, int]]:
    """All integer pixels on the segment p0..p1 inclusive."""
    i0, j0 = p0
    i1, j1 = p1
    pixels = []
    di, dj = abs(i1 - i0), abs(j1 - j0)
    si = 1 if i0 < i1 else -1
    sj = 1 if j0 < j1 else -1
    err = di - dj
    i, j = i0, j0
    while True:
        pixels.append((i, j))
        if (i, j) == (i1, j1):
            break
        e2 = 2 * err
        if e2 > -dj:
            err -= dj
            i += si
        if e2 < di:
            err += di
            j += sj
    return pixels


def rasterize(session: AnnotationSession, dims: tuple[int, int, int]
              ) -> np.ndarray:
    """Paint the session's strokes into a fresh (Z, M, N) int16 label field.

    dims is (M, N, Z). Later strokes overwrite earlier ones where they
    overlap. Any stroke point outside its slice is an error.
    """
    m, n, z_dim = dims
    labels = np.zeros((z_dim, m, n), dtype=np.int16)
    for stroke in session.strokes:
        if not (0 <= stroke.slice_z < z_dim):
            raise DataError(f"stroke slice {stroke.slice_z} outside volume")
        for (pi, pj) in stroke.points:
            if not (0 <= pi < m and 0 <= pj < n):
                raise DataError(
                    f"stroke point ({pi}, {pj}) outside {m}x{n} slice")
        offsets = _disc_offsets(stroke.brush_radius)
        sl = labels[stroke.slice_z]
        pts = stroke.points
        segments = zip(pts, pts[1:]) if len(pts) > 1 else [(pts[0], pts[0])]
        for p0, p1 in segments:
            for (ci, cj) in _bresenham(p0, p1):
                ii = ci + offsets[:, 0]
                jj = cj + offsets[:, 1]
                keep = (ii >= 0) & (ii < m) & (jj >= 0) & (jj < n)
                sl[ii[keep], jj[keep]] = stroke.label
    return labels


def annotated_slices(labels: np.ndarray) -> list[int]:
    """Sorted slice indices carrying any nonzero label."""
    flags = np.any(labels != 0, axis=(1, 2))
    return [int(z) for z in np.nonzero(flags)[0]]


def subsample_slices(labels: np.ndarray, slice_distance: int) -> np.ndarray:
    """Drop annotated slices, leaving slice_distance unannotated between kept.

    With annotated slices A sorted ascending, keeps A[0], A[d+1], A[2(d+1)],
    ... and always A[-1], zeroing labels everywhere else. d=0 keeps all. A
    field with no annotated slices is returned unchanged.
    """
    if slice_distance < 0:
        raise DataError("slice distance must be >= 0")
    annotated = annotated_slices(labels)
    if not annotated:
        return labels.copy()
    step = slice_distance + 1
    kept = set(annotated[::step])
    kept.add(annotated[-1])
    out = labels.copy()
    for z in annotated:
        if z not in kept:
            out[z] = 0
    return out


def annotation_time(session: AnnotationSession, kept_slices) -> float:
    """Total seconds spent on the given slices."""
    total = 0.0
    for z in kept_slices:
        if z not in session.per_slice_time:
            raise DataError(f"no timing entry for slice {z}")
        total += session.per_slice_time[z]
    return total


def validate_labels(labels: np.ndarray, n_classes: int = 1) -> None:
    """Check every value is in {-1, 0} or {1..n_classes}."""
    vals = np.unique(labels)
    bad = [int(v) for v in vals if not (-1 <= v <= n_classes)]
    if bad:
        raise DataError(f"label values out of range: {bad}")


# ---------------------------------------------------------------------------
# session JSON, the same file the service persists and the CLI consumes


def session_to_dict(session: AnnotationSession) -> dict:
    strokes = []
    for s in session.strokes:
        entry = {"label": s.label, "slice_z": s.slice_z,
                 "points": [[i, j] for i, j in s.points],
                 "brush_radius": s.brush_radius}
        if s.elapsed_ms is not None:
            entry["elapsed_ms"] = s.elapsed_ms
        strokes.append(entry)
    return {"exam_id": session.exam_id, "strokes": strokes,
            "per_slice_time": {str(z): t for z, t in
                               sorted(session.per_slice_time.items())}}


def session_from_dict(data: dict) -> AnnotationSession:
    try:
        strokes = [Stroke(label=s["label"], slice_z=s["slice_z"],
                          points=[tuple(p) for p in s["points"]],
                          brush_radius=s.get("brush_radius", 0),
                          elapsed_ms=s.get("elapsed_ms"))
                   for s in data.get("strokes", [])]
        times = {int(z): float(t)
                 for z, t in data.get("per_slice_time", {}).items()}
        session = AnnotationSession(exam_id=data.get("exam_id", ""),
                                    strokes=strokes, per_slice_time=times)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed session: {exc}") from None
    session.validate()
    return session


def load_session(path) -> AnnotationSession:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed session {path}: {exc}") from None
    return session_from_dict(data)


def save_session(session: AnnotationSession, path) -> None:
    Path(path).write_text(json.dumps(session_to_dict(session), indent=1) + "\n")
