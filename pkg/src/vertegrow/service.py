"""HTTP backend for the browser annotation tool.

Exams are loaded once at startup from a directory:

- <id>.mhd / <id>.raw(+.json)  the intensity volume
- <id>_gt.mhd / <id>_gt.raw    optional ground-truth labels
- <id>.session.json            the annotation session (created on demand)

Sessions are persisted to their JSON file on every mutation, so a crash
loses nothing and the same file feeds the CLI. Per exam, mutations and
segmentation are mutually exclusive: a busy exam answers 409 instead of
queueing. Masks travel as per-slice run-length encodings of row-major pixel
runs, documented in docs/service-api.md.
"""
from __future__ import annotations

import io
import threading
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from PIL import Image
from pydantic import BaseModel

from . import seeds
from .engine import ALGORITHMS, EngineConfig, SegmentationResult
from .errors import DataError, MissingSeedsError
from .experiment import segment_session
from .metrics import report
from .seeds import AnnotationSession, Stroke
from .volume import Volume, load_labels, load_volume

MUTATION_TIMEOUT_S = 2.0


def rle_encode(mask2d: np.ndarray) -> list[list[int]]:
    """Run-length encode a 2D boolean mask as [start, length] pairs over the
    row-major flattened slice."""
    flat = np.asarray(mask2d, dtype=bool).ravel()
    if flat.size == 0:
        return []
    edges = np.flatnonzero(np.diff(flat.astype(np.int8)))
    run_starts = []
    run_ends = []
    if flat[0]:
        run_starts.append(0)
    for e in edges:
        if flat[e]:          # 1 -> 0 transition after index e
            run_ends.append(int(e) + 1)
        else:                # 0 -> 1 transition after index e
            run_starts.append(int(e) + 1)
    if flat[-1]:
        run_ends.append(int(flat.size))
    return [[s, e - s] for s, e in zip(run_starts, run_ends)]


def rle_decode(runs: list[list[int]], shape: tuple[int, int]) -> np.ndarray:
    """Inverse of rle_encode."""
    flat = np.zeros(shape[0] * shape[1], dtype=bool)
    for start, length in runs:
        if start < 0 or length < 0 or start + length > flat.size:
            raise DataError(f"run [{start}, {length}] outside mask")
        flat[start:start + length] = True
    return flat.reshape(shape)


@dataclass
class ExamHandle:
    exam_id: str
    volume: Volume
    session_path: Path
    gt: np.ndarray | None = None
    session: AnnotationSession = field(default_factory=AnnotationSession)
    last_labels: np.ndarray | None = None
    last_result: SegmentationResult | None = None
    result_counter: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def window(self) -> tuple[float, float]:
        return (float(self.volume.intensities.min()),
                float(self.volume.intensities.max()))


def load_exam_dir(exam_dir) -> dict[str, ExamHandle]:
    exam_dir = Path(exam_dir)
    if not exam_dir.is_dir():
        raise DataError(f"no such exam directory: {exam_dir}")
    exams: dict[str, ExamHandle] = {}
    candidates = sorted(list(exam_dir.glob("*.mhd"))
                        + list(exam_dir.glob("*.raw")))
    for path in candidates:
        stem = path.stem
        if stem.endswith("_gt") or stem in exams:
            continue
        try:
            vol = load_volume(path)
        except DataError as exc:
            # label masks or other non-intensity volumes saved alongside
            # the exams must not take the whole service down
            warnings.warn(f"skipping {path.name}: {exc}")
            continue
        handle = ExamHandle(exam_id=stem, volume=vol,
                            session_path=exam_dir / f"{stem}.session.json")
        for suffix in (".mhd", ".raw"):
            gt_path = exam_dir / f"{stem}_gt{suffix}"
            if gt_path.exists():
                handle.gt = load_labels(gt_path) > 0
                break
        if handle.session_path.exists():
            handle.session = seeds.load_session(handle.session_path)
        handle.session.exam_id = handle.session.exam_id or stem
        exams[stem] = handle
    return exams


class StrokeIn(BaseModel):
    label: int
    slice_z: int
    points: list[list[int]]
    brush_radius: int = 0
    elapsed_ms: float = 0.0


class SegmentIn(BaseModel):
    algorithm: str = "bgrowth3d"
    max_iters: int = 50
    slice_distance: int = 0


def _session_state(handle: ExamHandle) -> dict:
    counts: dict[int, int] = {}
    for stroke in handle.session.strokes:
        counts[stroke.slice_z] = counts.get(stroke.slice_z, 0) + 1
    return {"exam_id": handle.exam_id,
            "total_strokes": len(handle.session.strokes),
            "strokes_per_slice": {str(z): c for z, c in sorted(counts.items())},
            "per_slice_time": {str(z): t for z, t in
                               sorted(handle.session.per_slice_time.items())}}


def create_app(exam_dir) -> FastAPI:
    app = FastAPI(title="vertegrow annotation service")
    exams = load_exam_dir(exam_dir)
    app.state.exams = exams

    def _exam(exam_id: str) -> ExamHandle:
        handle = exams.get(exam_id)
        if handle is None:
            raise HTTPException(404, f"unknown exam {exam_id!r}")
        return handle

    @app.get("/exams")
    def list_exams():
        out = []
        for handle in exams.values():
            m, n, z = handle.volume.dims
            lo, hi = handle.window
            out.append({"exam_id": handle.exam_id, "dims": [m, n, z],
                        "spacing": list(handle.volume.spacing), "slices": z,
                        "has_gt": handle.gt is not None,
                        "window": {"min": lo, "max": hi},
                        "total_strokes": len(handle.session.strokes)})
        return out

    @app.get("/exams/{exam_id}/slice/{z}")
    def get_slice(exam_id: str, z: int):
        handle = _exam(exam_id)
        if not (0 <= z < handle.volume.shape[0]):
            raise HTTPException(404, f"slice {z} out of range")
        lo, hi = handle.window
        sl = handle.volume.intensities[z].astype(np.float64)
        if hi > lo:
            scaled = np.round((sl - lo) / (hi - lo) * 255.0)
        else:
            scaled = np.zeros_like(sl)
        png = io.BytesIO()
        Image.fromarray(scaled.astype(np.uint8), mode="L").save(png, "PNG")
        return Response(png.getvalue(), media_type="image/png",
                        headers={"X-Window-Min": repr(lo),
                                 "X-Window-Max": repr(hi)})

    @app.get("/exams/{exam_id}/strokes")
    def get_strokes(exam_id: str):
        handle = _exam(exam_id)
        state = _session_state(handle)
        state["session"] = seeds.session_to_dict(handle.session)
        return state

    @app.post("/exams/{exam_id}/strokes")
    def post_stroke(exam_id: str, body: StrokeIn):
        handle = _exam(exam_id)
        z_dim, m, n = handle.volume.shape
        if body.label == 0:
            raise HTTPException(422, "stroke label must be nonzero")
        if not (0 <= body.slice_z < z_dim):
            raise HTTPException(422, f"slice {body.slice_z} out of range")
        if not body.points:
            raise HTTPException(422, "stroke has no points")
        for point in body.points:
            if len(point) != 2 or not (0 <= point[0] < m and 0 <= point[1] < n):
                raise HTTPException(422, f"point {point} outside {m}x{n} slice")
        if body.brush_radius < 0 or body.elapsed_ms < 0:
            raise HTTPException(422, "negative brush radius or elapsed time")
        if not handle.lock.acquire(timeout=MUTATION_TIMEOUT_S):
            raise HTTPException(409, "busy")
        try:
            stroke = Stroke(label=body.label, slice_z=body.slice_z,
                            points=[tuple(p) for p in body.points],
                            brush_radius=body.brush_radius,
                            elapsed_ms=body.elapsed_ms)
            handle.session.add_stroke(stroke)
            seeds.save_session(handle.session, handle.session_path)
        finally:
            handle.lock.release()
        return _session_state(handle)

    @app.delete("/exams/{exam_id}/strokes/last")
    def delete_last_stroke(exam_id: str):
        handle = _exam(exam_id)
        if not handle.lock.acquire(timeout=MUTATION_TIMEOUT_S):
            raise HTTPException(409, "busy")
        try:
            if not handle.session.strokes:
                raise HTTPException(404, "no strokes to remove")
            handle.session.pop_stroke()
            seeds.save_session(handle.session, handle.session_path)
        finally:
            handle.lock.release()
        return _session_state(handle)

    @app.post("/exams/{exam_id}/segment")
    def post_segment(exam_id: str, body: SegmentIn):
        handle = _exam(exam_id)
        if body.algorithm not in ALGORITHMS:
            raise HTTPException(422, f"unknown algorithm {body.algorithm!r}")
        if body.max_iters < 1 or body.slice_distance < 0:
            raise HTTPException(422, "bad max_iters or slice_distance")
        if not handle.lock.acquire(blocking=False):
            raise HTTPException(409, "busy")
        try:
            cfg = EngineConfig(algorithm=body.algorithm,
                               max_iterations=body.max_iters)
            try:
                full, result, ann_seconds = segment_session(
                    handle.volume, handle.session, cfg,
                    slice_distance=body.slice_distance)
            except MissingSeedsError as exc:
                raise HTTPException(409, str(exc)) from None
            except DataError as exc:
                raise HTTPException(422, str(exc)) from None
            handle.last_labels = full
            handle.last_result = result
            handle.result_counter += 1
            payload = {"result_id": f"r{handle.result_counter}",
                       "iterations": result.iterations_run,
                       "converged": result.converged,
                       "elapsed_s": result.elapsed}
            if handle.gt is not None:
                rep = report(full == 1, handle.gt, result.elapsed, ann_seconds)
                payload["metrics"] = {
                    "dsc": rep.dsc, "jac": rep.jac, "hd": rep.hd,
                    "elapsed_segmentation": rep.elapsed_segmentation,
                    "annotation_seconds": rep.annotation_seconds}
            return payload
        finally:
            handle.lock.release()

    @app.get("/exams/{exam_id}/mask/{z}")
    def get_mask(exam_id: str, z: int):
        handle = _exam(exam_id)
        if handle.last_labels is None:
            raise HTTPException(404, "no segmentation result yet")
        if not (0 <= z < handle.volume.shape[0]):
            raise HTTPException(404, f"slice {z} out of range")
        mask2d = handle.last_labels[z] == 1
        m, n = mask2d.shape
        return {"z": z, "dims": [m, n],
                "result_id": f"r{handle.result_counter}",
                "runs": rle_encode(mask2d)}

    return app
