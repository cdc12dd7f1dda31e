"""Seeded cellular-automaton growth kernels.

Labeled voxels attack their neighbors each sweep: the attack strength is the
attacker's weight attenuated by the normalized intensity difference, and a
neighbor whose current weight is exceeded adopts the attacker's label. The
two update rules differ in how the defender's weight reacts to a winning
attack:

- bgrowth (balanced growth): W(q) <- (W(q) + s) / 2, averaging old and new.
- growcut: W(q) <- s, direct assignment.

bgrowth3d uses the full 26-neighborhood (or 6); bgrowth2d restricts to the 8
(or 4) in-plane neighbors, so slices evolve independently.

Sweeps are in-place over the (z, i, j) raster in ascending order with
neighbor offsets enumerated in ascending (dz, di, dj) order. This makes runs
bit-for-bit deterministic. Iteration stops at the first sweep with zero label
changes, or at max_iterations.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DataError, MissingSeedsError
from .volume import Volume

ALGORITHMS = ("bgrowth3d", "bgrowth2d", "growcut")

_VALID_NEIGHBORHOODS = {
    "bgrowth3d": (26, 6),
    "growcut": (26, 6),
    "bgrowth2d": (8, 4),
}
_DEFAULT_NEIGHBORHOOD = {"bgrowth3d": 26, "growcut": 26, "bgrowth2d": 8}


@dataclass
class EngineConfig:
    algorithm: str = "bgrowth3d"
    max_iterations: int = 50
    neighborhood: int | None = None
    convergence: str = "label_stable"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise DataError(f"unknown algorithm {self.algorithm!r}")
        if self.max_iterations < 1:
            raise DataError("max_iterations must be >= 1")
        if self.convergence != "label_stable":
            raise DataError(f"unknown convergence mode {self.convergence!r}")
        if self.neighborhood is None:
            self.neighborhood = _DEFAULT_NEIGHBORHOOD[self.algorithm]
        if self.neighborhood not in _VALID_NEIGHBORHOODS[self.algorithm]:
            raise DataError(
                f"neighborhood {self.neighborhood} invalid for {self.algorithm}")

    @property
    def averaging(self) -> bool:
        return self.algorithm != "growcut"


@dataclass
class SegmentationResult:
    labels: np.ndarray
    weights: np.ndarray
    iterations_run: int
    converged: bool
    elapsed: float


def offsets_for(neighborhood: int) -> np.ndarray:
    """Neighbor offsets as an array of (dz, di, dj) rows, ascending order.

    26/6 are the 3D box/axis neighborhoods; 8/4 their in-plane (dz=0)
    restrictions.
    """
    if neighborhood not in (26, 6, 8, 4):
        raise DataError(f"unsupported neighborhood {neighborhood}")
    rows = []
    for dz in (-1, 0, 1):
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if (dz, di, dj) == (0, 0, 0):
                    continue
                if neighborhood in (8, 4) and dz != 0:
                    continue
                if neighborhood in (6, 4) and abs(dz) + abs(di) + abs(dj) != 1:
                    continue
                rows.append((dz, di, dj))
    return np.array(rows, dtype=np.int64)


def strength(w_p: float, i_p: float, i_q: float, max_i: float) -> float:
    """Attack strength: attacker weight scaled by intensity similarity.

    A zero max_i means a uniform image; the normalized difference is then
    defined as 0, so the attack carries the full attacker weight.
    """
    if max_i == 0.0:
        return w_p
    return w_p * (1.0 - abs(i_p - i_q) / max_i)


@njit(cache=True)
def _sweep(intens, labels, weights, offsets, max_i, averaging):
    Z, M, N = intens.shape
    changes = 0
    for z in range(Z):
        for i in range(M):
            for j in range(N):
                lab = labels[z, i, j]
                if lab == 0:
                    continue
                w = weights[z, i, j]
                ip = intens[z, i, j]
                for k in range(offsets.shape[0]):
                    zq = z + offsets[k, 0]
                    iq = i + offsets[k, 1]
                    jq = j + offsets[k, 2]
                    if zq < 0 or zq >= Z or iq < 0 or iq >= M or jq < 0 or jq >= N:
                        continue
                    if max_i > 0.0:
                        s = w * (1.0 - abs(ip - intens[zq, iq, jq]) / max_i)
                    else:
                        s = w
                    if s > weights[zq, iq, jq]:
                        if averaging:
                            weights[zq, iq, jq] = (weights[zq, iq, jq] + s) / 2.0
                        else:
                            weights[zq, iq, jq] = s
                        if labels[zq, iq, jq] != lab:
                            labels[zq, iq, jq] = lab
                            changes += 1
    return changes


def _as_intensities(vol) -> np.ndarray:
    arr = vol.intensities if isinstance(vol, Volume) else np.asarray(vol)
    if arr.ndim != 3:
        raise DataError(f"expected a 3D volume, got {arr.ndim} dims")
    return np.ascontiguousarray(arr, dtype=np.float64)


def _check_dims(intens: np.ndarray, labels: np.ndarray) -> None:
    if labels.shape != intens.shape:
        raise DataError(
            f"label dims {labels.shape} do not match volume {intens.shape}")


def _run_sweep(vol, labels, weights, neighborhood, averaging):
    intens = _as_intensities(vol)
    labels = np.ascontiguousarray(labels, dtype=np.int16)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    _check_dims(intens, labels)
    _check_dims(intens, weights)
    offs = offsets_for(neighborhood)
    max_i = float(intens.max())
    changes = int(_sweep(intens, labels, weights, offs, max_i, averaging))
    return labels, weights, changes


def sweep_bgrowth(vol, labels, weights, neighborhood: int = 26):
    """One balanced-growth raster pass. Returns (labels, weights, changes)."""
    return _run_sweep(vol, labels, weights, neighborhood, averaging=True)


def sweep_growcut(vol, labels, weights, neighborhood: int = 26):
    """One growcut raster pass (assignment update)."""
    return _run_sweep(vol, labels, weights, neighborhood, averaging=False)


def segment(vol, seeds: np.ndarray, cfg: EngineConfig | None = None
            ) -> SegmentationResult:
    """Grow the seed labels to convergence or the iteration cap.

    seeds must contain at least one foreground (> 0) and one background (-1)
    voxel. The intensity normalizer max_I is taken once over the volume
    passed in, so crop before segmenting to keep the contrast local.
    """
    cfg = cfg or EngineConfig()
    intens = _as_intensities(vol)
    seeds = np.asarray(seeds)
    _check_dims(intens, seeds)
    if not (seeds > 0).any():
        raise MissingSeedsError("missing foreground seeds")
    if not (seeds < 0).any():
        raise MissingSeedsError("missing background seeds")

    labels = np.ascontiguousarray(seeds, dtype=np.int16).copy()
    weights = np.where(labels != 0, 1.0, 0.0)
    offs = offsets_for(cfg.neighborhood)
    max_i = float(intens.max())

    start = time.perf_counter()
    iterations = 0
    converged = False
    for _ in range(cfg.max_iterations):
        changes = _sweep(intens, labels, weights, offs, max_i, cfg.averaging)
        iterations += 1
        if changes == 0:
            converged = True
            break
    elapsed = time.perf_counter() - start
    return SegmentationResult(labels, weights, iterations, converged, elapsed)


def mask(result: SegmentationResult, label: int = 1) -> np.ndarray:
    """Boolean field where the final labels equal the given value."""
    return result.labels == label


def warm_up() -> None:
    """Compile the sweep kernel on a tiny input (useful before timing)."""
    intens = np.zeros((1, 2, 2), dtype=np.float64)
    labels = np.zeros((1, 2, 2), dtype=np.int16)
    labels[0, 0, 0] = 1
    weights = np.where(labels != 0, 1.0, 0.0)
    _sweep(intens, labels, weights, offsets_for(26), 0.0, True)
    _sweep(intens, labels, weights, offsets_for(26), 0.0, False)
