"""Directional center-surround (DCS) comparison.

For a window of neighbor offsets ``o_q`` with Gaussian weights ``w_q`` the
saliency of a voxel ``p`` is

    S[p] = (1/Q) * sum_q |E[p] - w_q * E[p + o_q]|

Neighbors falling outside the volume are read from the nearest boundary voxel.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DimsMismatchError
from .volume import Volume3D, minmax_normalize

ORIENTATIONS = ("axis-t", "axis-x", "axis-y", "diag-tx", "diag-ty", "diag-xy", "full")
WEIGHTINGS = ("inner", "outer")

# unit step directions for the line-shaped windows
_LINES = {
    "axis-t": (1, 0, 0),
    "axis-x": (0, 1, 0),
    "axis-y": (0, 0, 1),
    "diag-tx": (1, 1, 0),
    "diag-ty": (1, 0, 1),
    "diag-xy": (0, 1, 1),
}


@dataclass(frozen=True, eq=False)
class DirectionalWindow:
    offsets: np.ndarray  # (Q, 3) int
    weights: np.ndarray  # (Q,)
    name: str = "custom"

    def __post_init__(self):
        offsets = np.asarray(self.offsets, dtype=np.int64).reshape(-1, 3)
        weights = np.asarray(self.weights, dtype=np.float64).ravel()
        if len(offsets) == 0:
            raise ValueError("window needs at least one offset")
        if len(weights) != len(offsets):
            raise ValueError("one weight per offset is required")
        if np.any(np.all(offsets == 0, axis=1)):
            raise ValueError("the center offset (0, 0, 0) is not allowed")
        if len({tuple(o) for o in offsets}) != len(offsets):
            raise ValueError("duplicate offsets in window")
        if np.any(weights <= 0) or np.any(weights > 1):
            raise ValueError("weights must lie in (0, 1]")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "weights", weights)

    @property
    def Q(self):
        return len(self.offsets)

    @property
    def radius(self):
        return int(np.abs(self.offsets).max())


def gaussian_weights(offsets, sigma):
    d2 = np.sum(np.asarray(offsets, dtype=np.float64) ** 2, axis=1)
    if np.isinf(sigma):
        return np.ones_like(d2)
    return np.exp(-d2 / (2.0 * sigma * sigma))


def make_window(orientation="full", r=2, sigma=1.0):
    """Build one of the standard orientation templates.

    Line templates hold the ``2r`` offsets ``s * step`` for ``s = ±1..±r``;
    ``full`` holds every offset within Chebyshev radius ``r``.
    """
    if r < 1:
        raise ValueError("radius must be >= 1")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if orientation == "full":
        rng = range(-r, r + 1)
        offsets = [o for o in itertools.product(rng, rng, rng) if o != (0, 0, 0)]
    elif orientation in _LINES:
        step = np.array(_LINES[orientation])
        offsets = [tuple(s * step) for s in range(-r, r + 1) if s != 0]
    else:
        raise ConfigError(f"unknown orientation {orientation!r}; expected one of {ORIENTATIONS}")
    offsets = np.array(offsets, dtype=np.int64)
    return DirectionalWindow(offsets, gaussian_weights(offsets, sigma), orientation)


def load_template(path):
    """Read a custom window: one ``i0 j0 r0 w`` line per neighbor, ``#`` comments."""
    offsets, weights = [], []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ConfigError(f"{path}:{lineno}: expected 'i0 j0 r0 w', got {line!r}")
        offsets.append([int(p) for p in parts[:3]])
        weights.append(float(parts[3]))
    try:
        return DirectionalWindow(np.array(offsets), np.array(weights), Path(path).stem)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


@dataclass
class DcsConfig:
    orientation: str = "full"
    radius: int = 2
    sigma: float = 1.0
    weighting: str = "inner"
    template: str | None = None

    def __post_init__(self):
        if self.radius < 1:
            raise ConfigError("radius must be >= 1")
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if self.weighting not in WEIGHTINGS:
            raise ConfigError(f"weighting must be one of {WEIGHTINGS}")
        if self.template is None and self.orientation not in ORIENTATIONS:
            raise ConfigError(f"unknown orientation {self.orientation!r}")

    @property
    def window(self):
        if self.template is not None:
            return load_template(self.template)
        return make_window(self.orientation, self.radius, self.sigma)


def _dcs_slab(padded, window, pad, dims, y0, y1, outer):
    T, X, _ = dims
    center = padded[pad:pad + T, pad:pad + X, pad + y0:pad + y1]
    out = np.zeros(center.shape)
    for (i0, j0, r0), w in zip(window.offsets, window.weights):
        nb = padded[pad + i0:pad + i0 + T, pad + j0:pad + j0 + X, pad + y0 + r0:pad + y1 + r0]
        if outer:
            out += w * np.abs(center - nb)
        else:
            out += np.abs(center - w * nb)
    return out / window.Q


def dcs_saliency(E, cfg=None, threads=1):
    """Center-surround saliency of one energy volume (not normalized)."""
    cfg = cfg or DcsConfig()
    window = cfg.window
    arr = np.asarray(E.data if isinstance(E, Volume3D) else E, dtype=np.float64)
    pad = window.radius
    padded = np.pad(arr, pad, mode="edge")
    dims = arr.shape
    outer = cfg.weighting == "outer"

    Y = dims[2]
    nslabs = max(1, min(int(threads or 1), Y))
    bounds = np.linspace(0, Y, nslabs + 1).astype(int)
    jobs = [(bounds[i], bounds[i + 1]) for i in range(nslabs)]
    if nslabs > 1:
        with ThreadPoolExecutor(max_workers=nslabs) as pool:
            slabs = list(pool.map(lambda b: _dcs_slab(padded, window, pad, dims, *b, outer), jobs))
    else:
        slabs = [_dcs_slab(padded, window, pad, dims, 0, Y, outer)]
    out = np.concatenate(slabs, axis=2)
    return E.with_data(out) if isinstance(E, Volume3D) else out


def dcs_all(energies, cfg_t=None, cfg_x=None, cfg_y=None, threads=1):
    """Directional saliency maps for the three energy volumes, each min-max normalized."""
    vols = tuple(energies)
    if len({tuple(v.dims) for v in vols}) != 1:
        raise DimsMismatchError("energy volumes have different dims")
    cfgs = (cfg_t, cfg_x, cfg_y)
    return tuple(minmax_normalize(dcs_saliency(v, c, threads)) for v, c in zip(vols, cfgs))
