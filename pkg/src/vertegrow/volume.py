"""Volumetric image containers and file I/O.

A volume is an (M rows, N cols, Z slices) scalar grid stored as a numpy array
of shape (Z, M, N) in C order: z outermost, then i (row), then j (col)
innermost. All modules share this layout, so a raster sweep over (z, i, j) is
memory-sequential.

Two interchange formats are supported:

- MetaImage: a .mhd text header next to a .raw little-endian payload.
  DimSize is written in x y z order (cols, rows, slices), the common
  convention, so files interoperate with standard viewers.
- raw + JSON sidecar: a bare .raw payload described by a .json file
  {"dims": [M, N, Z], "spacing": [dx, dy, dz], "dtype": "uint16"}.

Intensity volumes may be uint8, uint16 or float32. Label volumes are int8 or
int16. Everything round-trips bit-exactly.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DataError, MissingSeedsError

INTENSITY_DTYPES = {"uint8": np.uint8, "uint16": np.uint16, "float32": np.float32}
LABEL_DTYPES = {"int8": np.int8, "int16": np.int16}

_MET_TO_DTYPE = {
    "MET_UCHAR": "uint8",
    "MET_USHORT": "uint16",
    "MET_FLOAT": "float32",
    "MET_CHAR": "int8",
    "MET_SHORT": "int16",
}
_DTYPE_TO_MET = {v: k for k, v in _MET_TO_DTYPE.items()}

# MetaImage keys we understand; anything else is ignored with a warning.
_KNOWN_MHD_KEYS = {
    "ObjectType", "NDims", "BinaryData", "BinaryDataByteOrderMSB",
    "ElementByteOrderMSB", "CompressedData", "DimSize", "ElementSpacing",
    "ElementSize", "ElementType", "ElementDataFile", "Offset",
    "TransformMatrix", "CenterOfRotation", "AnatomicalOrientation",
    "HeaderSize",
}


class VoxelIndex(NamedTuple):
    """0-based (row, col, slice) address of one voxel."""

    i: int
    j: int
    z: int


@dataclass
class CropRegion:
    """Inclusive axis-aligned box; records where a crop came from."""

    lo: VoxelIndex
    hi: VoxelIndex

    def __post_init__(self):
        if not all(a <= b for a, b in zip(self.lo, self.hi)):
            raise DataError(f"crop region lo {self.lo} exceeds hi {self.hi}")

    def slices(self) -> tuple[slice, slice, slice]:
        """(z, i, j) slice triple for indexing a (Z, M, N) array."""
        return (slice(self.lo.z, self.hi.z + 1),
                slice(self.lo.i, self.hi.i + 1),
                slice(self.lo.j, self.hi.j + 1))


@dataclass
class Volume:
    """Scalar volume plus geometry metadata.

    intensities: (Z, M, N) array, non-negative scalars.
    spacing: (dx, dy, dz) voxel size in millimeters.
    """

    intensities: np.ndarray
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)
    orientation_note: str = "sagittal slices along Z"

    def __post_init__(self):
        self.intensities = np.asarray(self.intensities)
        if self.intensities.ndim != 3:
            raise DataError(f"expected 3 dims, got {self.intensities.ndim}")
        if any(s < 1 for s in self.intensities.shape):
            raise DataError(f"degenerate dims {self.intensities.shape}")
        if any(s <= 0 for s in self.spacing):
            raise DataError(f"non-positive spacing {self.spacing}")

    @property
    def dims(self) -> tuple[int, int, int]:
        """(M rows, N cols, Z slices)."""
        z, m, n = self.intensities.shape
        return (m, n, z)

    @property
    def shape(self) -> tuple[int, int, int]:
        """(Z, M, N) array shape."""
        return self.intensities.shape


def _dtype_name(arr: np.ndarray) -> str:
    name = arr.dtype.name
    if name not in INTENSITY_DTYPES and name not in LABEL_DTYPES:
        raise DataError(f"unsupported dtype {name}")
    return name


def _shape_from_dims(dims) -> tuple[int, int, int]:
    m, n, z = (int(d) for d in dims)
    if min(m, n, z) < 1:
        raise DataError(f"degenerate dims {dims}")
    return (z, m, n)


def _read_payload(raw: bytes, shape, dtype_name: str) -> np.ndarray:
    dt = np.dtype(dtype_name).newbyteorder("<")
    expected = int(np.prod(shape)) * dt.itemsize
    if len(raw) != expected:
        raise DataError(
            f"payload size mismatch: expected {expected} bytes, got {len(raw)}")
    arr = np.frombuffer(raw, dtype=dt).reshape(shape)
    # native little-endian view so downstream code sees plain dtypes
    return arr.astype(dtype_name, copy=True)


# ---------------------------------------------------------------------------
# MetaImage


def _parse_mhd(path: Path) -> tuple[dict, bytes | None]:
    """Return (header dict, inline payload or None)."""
    data = path.read_bytes()
    header = {}
    pos = 0
    while pos < len(data):
        eol = data.find(b"\n", pos)
        if eol == -1:
            eol = len(data)
        line = data[pos:eol].decode("latin-1").strip()
        pos = eol + 1
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"malformed header line {line!r} in {path}")
        key, value = (part.strip() for part in line.split("=", 1))
        header[key] = value
        if key not in _KNOWN_MHD_KEYS:
            warnings.warn(f"ignoring unknown MetaImage key {key!r}", stacklevel=3)
        if key == "ElementDataFile":
            inline = data[pos:] if value == "LOCAL" else None
            return header, inline
    raise DataError(f"missing ElementDataFile in {path}")


def _load_metaimage(path: Path, allowed: dict) -> tuple[np.ndarray, tuple]:
    header, inline = _parse_mhd(path)
    if header.get("NDims", "3") != "3":
        raise DataError(f"NDims must be 3, got {header.get('NDims')}")
    if header.get("CompressedData", "False").lower() == "true":
        raise DataError("compressed MetaImage payloads are not supported")
    msb = header.get("BinaryDataByteOrderMSB",
                     header.get("ElementByteOrderMSB", "False"))
    if msb.lower() == "true":
        raise DataError("big-endian payloads are not supported")
    if int(header.get("HeaderSize", "0")) != 0:
        raise DataError("nonzero HeaderSize is not supported")
    try:
        dim_size = [int(tok) for tok in header["DimSize"].split()]
        met_type = header["ElementType"]
        data_file = header["ElementDataFile"]
    except KeyError as exc:
        raise DataError(f"missing MetaImage key {exc}") from None
    if len(dim_size) != 3:
        raise DataError(f"DimSize must have 3 entries, got {dim_size}")
    dtype_name = _MET_TO_DTYPE.get(met_type)
    if dtype_name is None or dtype_name not in allowed:
        raise DataError(f"unsupported element type {met_type}")
    spacing = tuple(float(tok) for tok in
                    header.get("ElementSpacing", "1 1 1").split())
    if len(spacing) != 3 or any(s <= 0 for s in spacing):
        raise DataError(f"bad ElementSpacing {header.get('ElementSpacing')!r}")
    n, m, z = dim_size  # x y z on disk
    shape = _shape_from_dims((m, n, z))
    raw = inline if inline is not None else (path.parent / data_file).read_bytes()
    return _read_payload(raw, shape, dtype_name), spacing


def _save_metaimage(arr: np.ndarray, spacing, path: Path) -> None:
    dtype_name = _dtype_name(arr)
    z, m, n = arr.shape
    raw_path = path.with_suffix(".raw")
    lines = [
        "ObjectType = Image",
        "NDims = 3",
        "BinaryData = True",
        "BinaryDataByteOrderMSB = False",
        "CompressedData = False",
        f"DimSize = {n} {m} {z}",
        "ElementSpacing = " + " ".join(repr(float(s)) for s in spacing),
        f"ElementType = {_DTYPE_TO_MET[dtype_name]}",
        f"ElementDataFile = {raw_path.name}",
    ]
    path.write_text("\n".join(lines) + "\n")
    raw_path.write_bytes(np.ascontiguousarray(arr, dtype=f"<{arr.dtype.str[1:]}")
                         .tobytes())


# ---------------------------------------------------------------------------
# raw + JSON sidecar


def _sidecar_paths(path: Path) -> tuple[Path, Path]:
    """Given either the .raw or the .json path, return (raw, json)."""
    if path.suffix == ".json":
        return path.with_suffix(".raw"), path
    return path, path.with_suffix(".json")


def _load_raw(path: Path, allowed: dict) -> tuple[np.ndarray, tuple]:
    raw_path, json_path = _sidecar_paths(path)
    if not json_path.exists():
        raise DataError(f"missing sidecar: {json_path}")
    try:
        meta = json.loads(json_path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed sidecar {json_path}: {exc}") from None
    try:
        dims = meta["dims"]
        dtype_name = meta["dtype"]
    except KeyError as exc:
        raise DataError(f"sidecar missing key {exc}") from None
    if dtype_name not in allowed:
        raise DataError(f"unsupported element type {dtype_name}")
    spacing = tuple(float(s) for s in meta.get("spacing", [1, 1, 1]))
    if len(dims) != 3:
        raise DataError(f"sidecar dims must have 3 entries, got {dims}")
    if len(spacing) != 3 or any(s <= 0 for s in spacing):
        raise DataError(f"bad sidecar spacing {meta.get('spacing')}")
    shape = _shape_from_dims(dims)
    return _read_payload(raw_path.read_bytes(), shape, dtype_name), spacing


def _save_raw(arr: np.ndarray, spacing, path: Path) -> None:
    dtype_name = _dtype_name(arr)
    raw_path, json_path = _sidecar_paths(path)
    z, m, n = arr.shape
    meta = {"dims": [m, n, z], "spacing": list(spacing), "dtype": dtype_name}
    json_path.write_text(json.dumps(meta) + "\n")
    raw_path.write_bytes(np.ascontiguousarray(arr, dtype=f"<{arr.dtype.str[1:]}")
                         .tobytes())


# ---------------------------------------------------------------------------
# public API


def _detect_format(path: Path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("metaimage", "raw"):
            raise DataError(f"unknown format {fmt!r}")
        return fmt
    return "metaimage" if path.suffix == ".mhd" else "raw"


def load_volume(path, fmt: str | None = None) -> Volume:
    """Read an intensity volume (uint8, uint16 or float32).

    fmt is "metaimage" or "raw"; inferred from the extension when omitted.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    if _detect_format(path, fmt) == "metaimage":
        arr, spacing = _load_metaimage(path, INTENSITY_DTYPES)
    else:
        arr, spacing = _load_raw(path, INTENSITY_DTYPES)
    return Volume(arr, spacing)


def save_volume(vol: Volume, path, fmt: str | None = None) -> None:
    path = Path(path)
    if _detect_format(path, fmt) == "metaimage":
        _save_metaimage(vol.intensities, vol.spacing, path)
    else:
        _save_raw(vol.intensities, vol.spacing, path)


def load_labels(path, fmt: str | None = None) -> np.ndarray:
    """Read a label field as an int8/int16 array of shape (Z, M, N)."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    if _detect_format(path, fmt) == "metaimage":
        arr, _ = _load_metaimage(path, LABEL_DTYPES)
    else:
        arr, _ = _load_raw(path, LABEL_DTYPES)
    return arr


def save_labels(labels: np.ndarray, path, fmt: str | None = None,
                spacing=(1.0, 1.0, 1.0)) -> None:
    """Write a label field. Values must fit the array's signed dtype."""
    if not str(path):
        raise DataError("empty path")
    path = Path(path)
    labels = np.asarray(labels)
    if labels.ndim != 3:
        raise DataError(f"expected 3 dims, got {labels.ndim}")
    if labels.dtype.name not in LABEL_DTYPES:
        # attempt a checked narrowing; values outside the target range fail
        info = np.iinfo(np.int16)
        if labels.min() < info.min or labels.max() > info.max:
            raise DataError("label out of range for format")
        labels = labels.astype(np.int16)
    if _detect_format(path, fmt) == "metaimage":
        _save_metaimage(labels, spacing, path)
    else:
        _save_raw(labels, spacing, path)


def narrow_labels(labels: np.ndarray, dtype) -> np.ndarray:
    """Cast labels to a smaller signed dtype, refusing lossy casts."""
    labels = np.asarray(labels)
    info = np.iinfo(dtype)
    if labels.size and (labels.min() < info.min or labels.max() > info.max):
        raise DataError("label out of range for format")
    return labels.astype(dtype)


def crop_to_seeds(vol: Volume, labels: np.ndarray, margin: int = 2
                  ) -> tuple[Volume, np.ndarray, CropRegion]:
    """Cut the bounding box of all nonzero labels, expanded by margin.

    Returns (sub-volume, sub-labels, region). The region maps results back to
    the full grid via uncrop_labels.
    """
    labels = np.asarray(labels)
    if labels.shape != vol.shape:
        raise DataError(
            f"label dims {labels.shape} do not match volume {vol.shape}")
    nz = np.nonzero(labels)
    if len(nz[0]) == 0:
        raise MissingSeedsError("no seeds present")
    zmax, imax, jmax = (int(ax.max()) for ax in nz)
    zmin, imin, jmin = (int(ax.min()) for ax in nz)
    Z, M, N = vol.shape
    lo = VoxelIndex(max(imin - margin, 0), max(jmin - margin, 0),
                    max(zmin - margin, 0))
    hi = VoxelIndex(min(imax + margin, M - 1), min(jmax + margin, N - 1),
                    min(zmax + margin, Z - 1))
    region = CropRegion(lo, hi)
    sl = region.slices()
    sub = Volume(vol.intensities[sl].copy(), vol.spacing, vol.orientation_note)
    return sub, labels[sl].copy(), region


def uncrop_labels(cropped: np.ndarray, region: CropRegion,
                  full_shape: tuple[int, int, int]) -> np.ndarray:
    """Paste a cropped label field back at its original position."""
    full = np.zeros(full_shape, dtype=cropped.dtype)
    full[region.slices()] = cropped
    return full
