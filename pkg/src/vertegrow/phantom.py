"""Synthetic test volumes with exact ground truth.

A phantom is a two-intensity geometry (ellipsoid, box, or a stacked column of
vertebra-like bodies) plus optional edge smoothing and additive Gaussian
noise. Generation is deterministic for a fixed rng_seed. auto_seed turns a
ground-truth mask into the kind of quick interior/exterior annotation a human
would draw: a line or small rectangle inside the body and a loose rectangle
outside it, at a synthesized 6.5 seconds per slice.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import DataError
from .seeds import AnnotationSession, Stroke
from .volume import Volume

SECONDS_PER_SLICE = 6.5

BODIES = ("ellipsoid", "box", "stacked-vertebrae")
SEED_STYLES = ("skeleton-line", "sloppy-rect")


@dataclass
class PhantomSpec:
    """Recipe for one synthetic volume.

    dims is (M, N, Z). params holds the body geometry in voxels:

    - ellipsoid: center [ci, cj, cz], radii [ri, rj, rz]
    - box: lo [i, j, z], hi [i, j, z] (inclusive)
    - stacked-vertebrae: n_bodies, radii [ri, rj, rz], gap

    params may also carry edge_sigma, a Gaussian smoothing of the intensity
    profile (the ground truth stays crisp). Defaults are filled from dims.
    """

    dims: tuple[int, int, int]
    body: str = "ellipsoid"
    params: dict = field(default_factory=dict)
    fg_intensity: float = 120.0
    bg_intensity: float = 30.0
    noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.body not in BODIES:
            raise DataError(f"unknown body {self.body!r}")
        if self.fg_intensity == self.bg_intensity:
            raise DataError("fg and bg intensity must differ")
        if self.noise_sigma < 0:
            raise DataError("negative noise sigma")
        self.dims = tuple(int(d) for d in self.dims)
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise DataError(f"bad dims {self.dims}")


def _check_range(name, lo, hi, limit):
    if lo < 0 or hi > limit - 1:
        raise DataError(f"geometry out of bounds: {name} spans {lo}..{hi} "
                        f"in a {limit}-voxel axis")


def _ellipsoid(shape, center, radii) -> np.ndarray:
    Z, M, N = shape
    ci, cj, cz = center
    ri, rj, rz = radii
    if min(ri, rj, rz) < 1:
        raise DataError("ellipsoid radii must be >= 1")
    _check_range("ellipsoid rows", ci - ri, ci + ri, M)
    _check_range("ellipsoid cols", cj - rj, cj + rj, N)
    _check_range("ellipsoid slices", cz - rz, cz + rz, Z)
    zz, ii, jj = np.ogrid[:Z, :M, :N]
    return (((zz - cz) / rz) ** 2 + ((ii - ci) / ri) ** 2
            + ((jj - cj) / rj) ** 2) <= 1.0


def _gt_for(spec: PhantomSpec) -> np.ndarray:
    m, n, z_dim = spec.dims
    shape = (z_dim, m, n)
    p = spec.params
    if spec.body == "ellipsoid":
        center = p.get("center", [m // 2, n // 2, z_dim // 2])
        radii = p.get("radii", [max(m // 4, 1), max(n // 4, 1),
                                max((z_dim - 1) // 2, 1)])
        return _ellipsoid(shape, center, radii)
    if spec.body == "box":
        lo = p.get("lo", [m // 4, n // 4, z_dim // 4])
        hi = p.get("hi", [3 * m // 4, 3 * n // 4,
                          max(3 * z_dim // 4, z_dim // 4)])
        if any(a > b for a, b in zip(lo, hi)):
            raise DataError("box lo exceeds hi")
        _check_range("box rows", lo[0], hi[0], m)
        _check_range("box cols", lo[1], hi[1], n)
        _check_range("box slices", lo[2], hi[2], z_dim)
        gt = np.zeros(shape, dtype=bool)
        gt[lo[2]:hi[2] + 1, lo[0]:hi[0] + 1, lo[1]:hi[1] + 1] = True
        return gt
    # stacked-vertebrae: a sagittal column of ellipsoid bodies along i
    n_bodies = int(p.get("n_bodies", 3))
    radii = p.get("radii", [max(m // (4 * n_bodies), 2), max(n // 5, 2),
                            max((z_dim - 1) // 2, 1)])
    gap = int(p.get("gap", 2))
    if n_bodies < 1 or gap < 1:
        raise DataError("stacked-vertebrae needs n_bodies >= 1 and gap >= 1")
    ri, rj, rz = radii
    span = n_bodies * (2 * ri + 1) + (n_bodies - 1) * gap
    first = (m - span) // 2 + ri
    _check_range("stack rows", first - ri, first + (n_bodies - 1) *
                 (2 * ri + 1 + gap) + ri, m)
    gt = np.zeros(shape, dtype=bool)
    for k in range(n_bodies):
        ci = first + k * (2 * ri + 1 + gap)
        gt |= _ellipsoid(shape, [ci, n // 2, z_dim // 2], radii)
    return gt


def generate(spec: PhantomSpec) -> tuple[Volume, np.ndarray]:
    """Build (volume, ground truth) deterministically from the spec."""
    gt = _gt_for(spec)
    profile = gt.astype(np.float64)
    edge_sigma = float(spec.params.get("edge_sigma", 0.0))
    if edge_sigma > 0:
        profile = ndimage.gaussian_filter(profile, sigma=edge_sigma)
    intens = spec.bg_intensity + (spec.fg_intensity - spec.bg_intensity) * profile
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.rng_seed)
        intens = intens + rng.normal(0.0, spec.noise_sigma, size=intens.shape)
    intens = np.clip(intens, 0.0, None).astype(np.float32)
    return Volume(intens), gt


def _longest_run(cols: np.ndarray) -> tuple[int, int]:
    """Longest contiguous run in a sorted 1D index array, as (lo, hi)."""
    best = (int(cols[0]), int(cols[0]))
    start = prev = int(cols[0])
    for c in cols[1:]:
        c = int(c)
        if c != prev + 1:
            if prev - start > best[1] - best[0]:
                best = (start, prev)
            start = c
        prev = c
    if prev - start > best[1] - best[0]:
        best = (start, prev)
    return best


def _interior_line(sl: np.ndarray) -> Stroke | None:
    """Centroid-row horizontal line, trimmed one voxel at each end."""
    ii, jj = np.nonzero(sl)
    ic = int(round(ii.mean()))
    rows_with = np.unique(ii)
    ic = int(rows_with[np.argmin(np.abs(rows_with - ic))])
    cols = np.nonzero(sl[ic])[0]
    lo, hi = _longest_run(cols)
    if hi - lo >= 2:
        lo, hi = lo + 1, hi - 1
    return Stroke(label=1, slice_z=0, points=[(ic, lo), (ic, hi)])


def _rect_outline_inside(sl, lo_i, hi_i, lo_j, hi_j) -> bool:
    return (sl[lo_i, lo_j:hi_j + 1].all() and sl[hi_i, lo_j:hi_j + 1].all()
            and sl[lo_i:hi_i + 1, lo_j].all() and sl[lo_i:hi_i + 1, hi_j].all())


def _interior_rect(sl: np.ndarray) -> Stroke | None:
    """Inscribed rectangle outline, shrunk until it fits inside the mask."""
    ii, jj = np.nonzero(sl)
    ci = (int(ii.min()) + int(ii.max())) / 2.0
    cj = (int(jj.min()) + int(jj.max())) / 2.0
    hi_half = (int(ii.max()) - int(ii.min())) / 2.0
    hj_half = (int(jj.max()) - int(jj.min())) / 2.0
    f = 0.6
    while f >= 0.1:
        lo_i, hi_i = int(round(ci - f * hi_half)), int(round(ci + f * hi_half))
        lo_j, hi_j = int(round(cj - f * hj_half)), int(round(cj + f * hj_half))
        if hi_i > lo_i and hi_j > lo_j and _rect_outline_inside(
                sl, lo_i, hi_i, lo_j, hi_j):
            return Stroke(label=1, slice_z=0, points=[
                (lo_i, lo_j), (lo_i, hi_j), (hi_i, hi_j), (hi_i, lo_j),
                (lo_i, lo_j)])
        f -= 0.05
    return None


def auto_seed(gt: np.ndarray, style: str = "skeleton-line",
              slice_set=None) -> AnnotationSession:
    """Synthesize an annotation session from a ground-truth mask.

    Per slice: one interior stroke strictly inside the mask (a centroid line
    for skeleton-line, an inscribed rectangle outline for sloppy-rect, which
    falls back to the line on slices too small for a rectangle) and one
    exterior rectangle outline 3 voxels outside the mask's bounding box.
    """
    if style not in SEED_STYLES:
        raise DataError(f"unknown seed style {style!r}")
    gt = np.asarray(gt, dtype=bool)
    z_dim, m, n = gt.shape
    if slice_set is None:
        slice_set = [z for z in range(z_dim) if gt[z].any()]
    session = AnnotationSession(exam_id="phantom")
    for z in slice_set:
        sl = gt[z]
        if not sl.any():
            raise DataError(f"slice {z} has no foreground")
        interior = None
        if style == "sloppy-rect":
            interior = _interior_rect(sl)
        if interior is None:
            interior = _interior_line(sl)
        interior.slice_z = z

        ii, jj = np.nonzero(sl)
        lo_i = max(int(ii.min()) - 3, 0)
        hi_i = min(int(ii.max()) + 3, m - 1)
        lo_j = max(int(jj.min()) - 3, 0)
        hi_j = min(int(jj.max()) + 3, n - 1)
        exterior = Stroke(label=-1, slice_z=z, points=[
            (lo_i, lo_j), (lo_i, hi_j), (hi_i, hi_j), (hi_i, lo_j),
            (lo_i, lo_j)])
        if (sl[lo_i, lo_j:hi_j + 1].any() or sl[hi_i, lo_j:hi_j + 1].any()
                or sl[lo_i:hi_i + 1, lo_j].any()
                or sl[lo_i:hi_i + 1, hi_j].any()):
            raise DataError(
                f"slice {z}: no room for an exterior rectangle outside the mask")
        session.strokes.append(interior)
        session.strokes.append(exterior)
        session.per_slice_time[z] = SECONDS_PER_SLICE
    session.validate()
    return session


def default_suite(n: int = 20) -> list[PhantomSpec]:
    """The standard noisy phantom suite: n seeded blurred ellipsoids.

    Geometry varies per seed; noise sigma is 15% of the fg/bg contrast.
    Every suite member converges well under the default 50-sweep cap.
    """
    specs = []
    for k in range(n):
        rng = np.random.default_rng(1000 + k)
        ri = int(rng.integers(12, 17))
        rj = int(rng.integers(12, 17))
        specs.append(PhantomSpec(
            dims=(64, 64, 9),
            body="ellipsoid",
            params={"center": [32, 32, 4], "radii": [ri, rj, 3],
                    "edge_sigma": 0.8},
            fg_intensity=120.0,
            bg_intensity=30.0,
            noise_sigma=0.15 * 90.0,
            rng_seed=k,
        ))
    return specs


# ---------------------------------------------------------------------------
# spec JSON


def spec_to_dict(spec: PhantomSpec) -> dict:
    return {"dims": list(spec.dims), "body": spec.body, "params": spec.params,
            "fg_intensity": spec.fg_intensity,
            "bg_intensity": spec.bg_intensity,
            "noise_sigma": spec.noise_sigma, "rng_seed": spec.rng_seed}


def spec_from_dict(data: dict) -> PhantomSpec:
    try:
        return PhantomSpec(
            dims=tuple(data["dims"]), body=data.get("body", "ellipsoid"),
            params=dict(data.get("params", {})),
            fg_intensity=float(data.get("fg_intensity", 120.0)),
            bg_intensity=float(data.get("bg_intensity", 30.0)),
            noise_sigma=float(data.get("noise_sigma", 0.0)),
            rng_seed=int(data.get("rng_seed", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed phantom spec: {exc}") from None


def load_spec(path) -> PhantomSpec:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    try:
        return spec_from_dict(json.loads(path.read_text()))
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed phantom spec {path}: {exc}") from None
