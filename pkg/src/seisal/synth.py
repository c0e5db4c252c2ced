"""Synthetic seismic volumes with planted structures and detection scores."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import DimsMismatchError
from .volume import Volume3D

SCENARIOS = ("layered", "layered+fault", "layered+dome", "chaotic-patch")

# reflector periods (samples; ~50, 31, 19 Hz at 4 ms) and relative amplitudes
_PERIODS = (5.0, 8.0, 13.0)
_AMPS = (1.0, 0.7, 0.5)


@dataclass
class SyntheticSpec:
    dims: tuple[int, int, int] = (64, 64, 64)
    scenario: str = "layered+fault"
    noise_sigma: float = 0.0
    seed: int = 0
    dip: float = 75.0
    throw: int = 3
    dome_center: tuple[float, float, float] | None = None
    dome_radius: float | None = None
    region: tuple[int, int, int, int, int, int] | None = None  # t0, t1, x0, x1, y0, y1
    sample_interval_ms: float = 4.0

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


def layered_trace(t, seed=0):
    """Reflectivity-like sum of sinusoids evaluated at (possibly shifted) times."""
    phases = np.random.default_rng([seed, 1]).uniform(0, 2 * np.pi, len(_PERIODS))
    t = np.asarray(t, dtype=np.float64)
    return sum(a * np.sin(2 * np.pi * t / p + ph) for a, p, ph in zip(_AMPS, _PERIODS, phases))


def _grid(dims):
    return np.meshgrid(*(np.arange(d, dtype=np.float64) for d in dims), indexing="ij")


def fault_plane_offset(spec):
    """Signed horizontal distance (along x) of each voxel from the fault plane."""
    T, X, _ = spec.dims
    t, x, _ = _grid(spec.dims)
    # cos(90 deg) is not exactly 0 in floating point
    cot = 0.0 if spec.dip == 90 else np.cos(np.radians(spec.dip)) / np.sin(np.radians(spec.dip))
    return x - (X // 2) - (t - T / 2.0) * cot


def _layered(spec):
    T, X, Y = spec.dims
    trace = layered_trace(np.arange(T), spec.seed)
    return np.broadcast_to(trace[:, None, None], (T, X, Y)).copy(), np.zeros((T, X, Y), bool)


def _fault(spec):
    T, X, Y = spec.dims
    if not 0 < spec.dip <= 90:
        raise ValueError("dip must lie in (0, 90] degrees")
    if not 0 <= spec.throw < T:
        raise ValueError(f"throw {spec.throw} does not fit {T} samples")
    off = fault_plane_offset(spec)
    t = np.arange(T, dtype=np.float64)[:, None, None]
    foot = layered_trace(t, spec.seed)
    hang = layered_trace(t - spec.throw, spec.seed)
    vol = np.where(off > 0, hang, foot)
    mask = np.abs(off) * np.sin(np.radians(spec.dip)) <= 1.0
    return np.broadcast_to(vol, (T, X, Y)).copy(), mask


def _dome(spec):
    T, X, Y = spec.dims
    center = spec.dome_center or (0.6 * T, X / 2.0, Y / 2.0)
    radius = spec.dome_radius or min(T, X, Y) / 4.0
    c = np.asarray(center, dtype=np.float64)
    if np.any(c - radius < 0) or np.any(c + radius > np.array([T, X, Y]) - 1):
        raise ValueError("dome does not fit inside the volume")
    t, x, y = _grid(spec.dims)
    dist = np.sqrt((t - c[0]) ** 2 + (x - c[1]) ** 2 + (y - c[2]) ** 2)
    lateral = np.sqrt((x - c[1]) ** 2 + (y - c[2]) ** 2)
    # reflectors drape over the body: shallower the closer to the dome axis
    uplift = radius * np.clip(1.0 - (lateral / (2.0 * radius)) ** 2, 0.0, None)
    vol = layered_trace(t + uplift, spec.seed)
    vol[dist < radius] = 0.0
    mask = np.abs(dist - radius) <= 1.0
    return vol, mask


def _chaotic(spec):
    T, X, Y = spec.dims
    region = spec.region or (T // 4, 3 * T // 4, X // 4, 3 * X // 4, Y // 4, 3 * Y // 4)
    t0, t1, x0, x1, y0, y1 = region
    if not (0 <= t0 < t1 <= T and 0 <= x0 < x1 <= X and 0 <= y0 < y1 <= Y):
        raise ValueError("chaotic region does not fit inside the volume")
    vol, _ = _layered(spec)
    patch = np.random.default_rng([spec.seed, 2]).standard_normal((t1 - t0, x1 - x0, y1 - y0))
    vol[t0:t1, x0:x1, y0:y1] = patch
    t, x, y = _grid(spec.dims)
    # Chebyshev distance to the box surface
    inside = np.maximum.reduce([t0 - t, t - (t1 - 1), x0 - x, x - (x1 - 1), y0 - y, y - (y1 - 1)])
    mask = np.abs(inside) <= 1.0
    return vol, mask


_BUILDERS = {
    "layered": _layered,
    "layered+fault": _fault,
    "layered+dome": _dome,
    "chaotic-patch": _chaotic,
}


def generate(spec):
    """Build ``(volume, mask)`` for a synthetic scenario.

    The result depends only on ``spec``; noise comes from a Philox stream keyed
    by ``spec.seed``.
    """
    vol, mask = _BUILDERS[spec.scenario](spec)
    if spec.noise_sigma > 0:
        rng = np.random.Generator(np.random.Philox(key=spec.seed))
        vol = vol + spec.noise_sigma * rng.standard_normal(vol.shape)
    meta = {"sample_interval_ms": spec.sample_interval_ms}
    return Volume3D(vol.astype(np.float32), **meta), Volume3D(mask.astype(np.float32), **meta)


@dataclass
class DetectionReport:
    auc: float
    mean_in: float
    mean_out: float
    contrast_ratio: float = field(init=False)

    def __post_init__(self):
        self.contrast_ratio = self.mean_in / self.mean_out if self.mean_out > 0 else float("inf")

    def as_dict(self):
        return {
            "auc": self.auc,
            "mean_in": self.mean_in,
            "mean_out": self.mean_out,
            "contrast_ratio": self.contrast_ratio,
        }


def auc(saliency, mask):
    """Rank-sum ROC AUC of a saliency map against a binary mask (ties count 1/2)."""
    s = np.asarray(getattr(saliency, "data", saliency), dtype=np.float64).ravel()
    m = np.asarray(getattr(mask, "data", mask)).ravel() > 0.5
    if s.shape != m.shape:
        raise DimsMismatchError("saliency and mask differ in size")
    n_pos = int(m.sum())
    n_neg = m.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("mask must contain both classes")
    ranks = rankdata(s)
    value = (ranks[m].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
    return DetectionReport(float(value), float(s[m].mean()), float(s[~m].mean()))
