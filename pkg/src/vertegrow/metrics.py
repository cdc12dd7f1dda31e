"""Overlap and distance metrics between binary segmentations.

Dice and Jaccard treat two empty masks as identical (1.0). The Hausdorff
distance is computed over all mask voxels in voxel index units via a
Euclidean distance transform; it is undefined (an error) when either mask is
empty.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DataError


@dataclass
class MetricReport:
    dsc: float
    jac: float
    hd: float
    elapsed_segmentation: float = 0.0
    annotation_seconds: float = 0.0


def _as_bool_pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise DataError(f"mask dims differ: {a.shape} vs {b.shape}")
    return a, b


def dice(a, b) -> float:
    """2|a n b| / (|a| + |b|); 1.0 when both masks are empty."""
    a, b = _as_bool_pair(a, b)
    denom = int(a.sum()) + int(b.sum())
    if denom == 0:
        return 1.0
    return 2.0 * int(np.logical_and(a, b).sum()) / denom


def jaccard(a, b) -> float:
    """|a n b| / |a u b|; 1.0 when both masks are empty."""
    a, b = _as_bool_pair(a, b)
    union = int(np.logical_or(a, b).sum())
    if union == 0:
        return 1.0
    return int(np.logical_and(a, b).sum()) / union


def hausdorff(a, b, spacing=None) -> float:
    """max over both directions of the farthest nearest-neighbor distance.

    Distances are Euclidean in voxel index space unless spacing (dx, dy, dz)
    is given, in which case each axis step is weighted physically.
    """
    a, b = _as_bool_pair(a, b)
    if not a.any() or not b.any():
        raise DataError("hausdorff undefined for an empty mask")
    sampling = None
    if spacing is not None:
        dx, dy, dz = spacing
        sampling = (dz, dy, dx)  # array axes are (z=slice, i=row/y, j=col/x)
    dist_to_b = ndimage.distance_transform_edt(~b, sampling=sampling)
    dist_to_a = ndimage.distance_transform_edt(~a, sampling=sampling)
    return float(max(dist_to_b[a].max(), dist_to_a[b].max()))


def report(mask, gt, elapsed_segmentation: float = 0.0,
           annotation_seconds: float = 0.0) -> MetricReport:
    """Bundle all three metrics for a segmentation against ground truth."""
    return MetricReport(dsc=dice(mask, gt), jac=jaccard(mask, gt),
                        hd=hausdorff(mask, gt),
                        elapsed_segmentation=elapsed_segmentation,
                        annotation_seconds=annotation_seconds)
