"""Dense 3D volumes, overlapped tiling and the ``.svol`` file format.

Axis convention
---------------
Every volume is indexed ``data[t, x, y]`` where ``t`` is time/depth, ``x`` the
crossline axis and ``y`` the inline axis.  On disk samples are laid out with
``t`` varying fastest, then ``x``, then ``y`` (Fortran order of the
``(T, X, Y)`` array).
"""
from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BoundsError,
    DimensionTooSmallError,
    OverlapViolationError,
    VolumeFormatError,
)

AXES = ("t", "x", "y")
DEFAULT_AXIS_LABELS = ("time", "crossline", "inline")

SVOL_MAGIC = b"SVOL"
SVOL_VERSION = 1
_SVOL_HEADER = struct.Struct("<4sIIIIf")


def axis_index(axis):
    """Map an axis tag (``'t'``, ``'x'``, ``'y'`` or 0..2) to its array axis."""
    if isinstance(axis, (int, np.integer)) and 0 <= axis < 3:
        return int(axis)
    try:
        return AXES.index(axis)
    except ValueError:
        raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}") from None


@dataclass(frozen=True, eq=False)
class Volume3D:
    """Scalar field on a regular ``(T, X, Y)`` grid.

    ``data`` is stored read-only as float32 unless a float64 array is given.
    All values must be finite.
    """

    data: np.ndarray
    sample_interval_ms: float | None = None
    origin: tuple[int, int, int] = (0, 0, 0)
    axis_labels: tuple[str, str, str] = DEFAULT_AXIS_LABELS

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise ValueError(f"volume data must be a non-empty 3D array, got shape {arr.shape}")
        dtype = np.float64 if arr.dtype == np.float64 else np.float32
        arr = np.array(arr, dtype=dtype, copy=True)
        if not np.all(np.isfinite(arr)):
            raise ValueError("volume contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        if self.sample_interval_ms is not None:
            si = float(self.sample_interval_ms)
            if not si > 0:
                raise ValueError("sample_interval_ms must be positive")
            object.__setattr__(self, "sample_interval_ms", si)
        object.__setattr__(self, "origin", tuple(int(o) for o in self.origin))
        object.__setattr__(self, "axis_labels", tuple(str(a) for a in self.axis_labels))

    @property
    def dims(self):
        return self.data.shape

    def with_data(self, data):
        """New volume with the same metadata and different samples."""
        return Volume3D(data, self.sample_interval_ms, self.origin, self.axis_labels)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


def _as_array(v):
    return v.data if isinstance(v, Volume3D) else np.asarray(v)


# --------------------------------------------------------------------------
# Tiling


@dataclass
class TileGrid:
    """Placement of ``n``-sided cubic windows over a volume."""

    dims: tuple[int, int, int]
    n: int
    stride: int
    axis_origins: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    coverage: np.ndarray = field(repr=False)

    @property
    def tile_origins(self):
        """All window corners in fixed raster order (t fastest)."""
        ot, ox, oy = self.axis_origins
        return [(t, x, y) for y in oy for x in ox for t in ot]

    def __len__(self):
        return int(np.prod([len(o) for o in self.axis_origins]))


def _axis_origins(length, n, stride):
    origins = list(range(0, length - n + 1, stride))
    if origins[-1] != length - n:
        origins.append(length - n)
    return tuple(origins)


def tile_plan(dims, n=16, stride=8):
    """Plan overlapping windows of side ``n`` covering a volume of ``dims``.

    The last window along each axis is clamped to end on the boundary.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3:
        raise ValueError("dims must have three entries")
    if n < 4:
        raise DimensionTooSmallError(f"window side n={n} must be at least 4")
    if n > min(dims):
        raise DimensionTooSmallError(f"window side n={n} exceeds volume dims {dims}")
    if stride < 1 or 2 * stride > n:
        raise OverlapViolationError(f"stride={stride} must satisfy 1 <= stride <= n/2 (n={n})")

    axis_origins = tuple(_axis_origins(d, n, stride) for d in dims)
    counts = []
    for d, origins in zip(dims, axis_origins):
        c = np.zeros(d, dtype=np.int64)
        for o in origins:
            c[o:o + n] += 1
        counts.append(c)
    coverage = counts[0][:, None, None] * counts[1][None, :, None] * counts[2][None, None, :]
    return TileGrid(dims, n, stride, axis_origins, coverage)


def accumulate_tile(target, tile_origin, tile_values, coverage=None, n=None):
    """Add one window's values into an accumulation buffer in place.

    ``tile_values`` is either an ``n**3`` array or a scalar that is splatted over
    the window footprint (``n`` must then be given).  When ``coverage`` is
    passed it is incremented over the same footprint.
    """
    tile_values = np.asarray(tile_values)
    if tile_values.ndim == 0:
        if n is None:
            raise ValueError("n is required for scalar tile values")
        shape = (n, n, n)
    else:
        shape = tile_values.shape
    lo = tuple(int(o) for o in tile_origin)
    if any(o < 0 for o in lo) or any(o + s > d for o, s, d in zip(lo, shape, target.shape)):
        raise BoundsError(f"tile at {lo} with shape {shape} exceeds target {target.shape}")
    sl = tuple(slice(o, o + s) for o, s in zip(lo, shape))
    target[sl] += tile_values
    if coverage is not None:
        coverage[sl] += 1


def normalize_by_coverage(target, coverage):
    """Average accumulated window contributions per voxel."""
    coverage = np.asarray(coverage)
    if np.any(coverage < 1):
        raise ValueError("some voxels are not covered by any tile")
    return target / coverage


def minmax_normalize(v):
    """Affinely map values onto ``[0, 1]``; a constant input maps to zeros."""
    arr = _as_array(v).astype(np.float64)
    lo, hi = arr.min(), arr.max()
    out = np.zeros_like(arr) if hi <= lo else (arr - lo) / (hi - lo)
    if isinstance(v, Volume3D):
        return v.with_data(out.astype(v.data.dtype))
    return out


def extract_slice(v, axis, index):
    """2D section through a volume.

    ``axis='t'`` gives a time section ``(X, Y)``, ``'x'`` a crossline section
    ``(T, Y)`` and ``'y'`` an inline section ``(T, X)``.
    """
    arr = _as_array(v)
    ax = axis_index(axis)
    if not 0 <= index < arr.shape[ax]:
        raise BoundsError(f"index {index} out of range for axis {AXES[ax]} of length {arr.shape[ax]}")
    return np.take(arr, index, axis=ax)


# --------------------------------------------------------------------------
# File formats


def write_svol(path, v, provenance=None):
    """Write ``v`` as ``.svol`` plus a ``.json`` sidecar with axis metadata."""
    path = Path(path)
    T, X, Y = v.dims
    si = v.sample_interval_ms or 0.0
    payload = np.asarray(v.data, dtype="<f4").ravel(order="F")
    with open(path, "wb") as fh:
        fh.write(_SVOL_HEADER.pack(SVOL_MAGIC, SVOL_VERSION, T, X, Y, si))
        fh.write(payload.tobytes())
    sidecar = {
        "axis_labels": list(v.axis_labels),
        "origin": list(v.origin),
        "sample_interval_ms": v.sample_interval_ms,
        "provenance": provenance or {},
    }
    path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True))
    return path


def read_svol(path):
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _SVOL_HEADER.size:
        raise VolumeFormatError(f"{path}: file too short for svol header")
    magic, version, T, X, Y, si = _SVOL_HEADER.unpack_from(raw)
    if magic != SVOL_MAGIC:
        raise VolumeFormatError(f"{path}: bad magic {magic!r}")
    if version != SVOL_VERSION:
        raise VolumeFormatError(f"{path}: unsupported svol version {version}")
    count = T * X * Y
    body = raw[_SVOL_HEADER.size:]
    if len(body) != 4 * count:
        raise VolumeFormatError(f"{path}: expected {count} samples, found {len(body) // 4}")
    data = np.frombuffer(body, dtype="<f4").reshape((T, X, Y), order="F")

    kwargs = {"sample_interval_ms": si if si > 0 else None}
    sidecar = path.with_suffix(".json")
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
        kwargs["origin"] = tuple(meta.get("origin", (0, 0, 0)))
        kwargs["axis_labels"] = tuple(meta.get("axis_labels", DEFAULT_AXIS_LABELS))
    return Volume3D(data.astype(np.float32), **kwargs)


def to_pgm_bytes(grid):
    """Encode a 2D grid as binary 8-bit PGM after min-max normalization.

    Rows of the image follow the first array axis.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 2:
        raise ValueError("PGM export needs a 2D grid")
    pixels = np.rint(minmax_normalize(grid) * 255.0).astype(np.uint8)
    h, w = pixels.shape
    return b"P5\n%d %d\n255\n" % (w, h) + pixels.tobytes()


def write_pgm(path, grid):
    path = Path(path)
    path.write_bytes(to_pgm_bytes(grid))
    return path


def read_pgm(path):
    raw = Path(path).read_bytes()
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", raw)
    if m is None:
        raise VolumeFormatError("not a binary PGM file")
    w, h, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise VolumeFormatError("only 8-bit PGM is supported")
    return np.frombuffer(raw[m.end(): m.end() + w * h], dtype=np.uint8).reshape(h, w)
