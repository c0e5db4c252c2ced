"""Weighted fusion of the directional saliency maps with adaptive weights.

The final map is ``S = W_t * S_t + W_x * S_x + W_y * S_y`` (min-max normalized).
Weights are either fixed or trained voxel by voxel against a desired map with
LMS, NLMS or RLS.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimsMismatchError
from .volume import axis_index, minmax_normalize

TRAINERS = ("lms", "nlms", "rls")
MSE_WINDOW = 1000


# --------------------------------------------------------------------------
# Single-sample updates


def lms_step(w, s, d, mu=0.05):
    """One LMS update.  Returns ``(new_weights, error)``."""
    w = np.asarray(w, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    e = float(d - w @ s)
    return w + mu * e * s, e


def nlms_step(w, s, d, mu=0.5, eps=1e-6):
    """One normalized LMS update.  Returns ``(new_weights, error)``."""
    w = np.asarray(w, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    e = float(d - w @ s)
    return w + (mu / (eps + s @ s)) * e * s, e


def rls_step(w, P, s, d, lam=0.999):
    """One exponentially weighted RLS update.

    ``P`` is the 3x3 inverse correlation estimate.  Returns
    ``(new_weights, new_P, error)``.
    """
    w = np.asarray(w, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    Ps = P @ s
    k = Ps / (lam + s @ Ps)
    e = float(d - w @ s)
    P = (P - np.outer(k, s @ P)) / lam
    return w + k * e, 0.5 * (P + P.T), e


@dataclass
class Trainer:
    kind: str = "nlms"
    mu: float | None = None
    eps: float = 1e-6
    lam: float = 0.999
    delta: float = 0.01

    def __post_init__(self):
        if self.kind not in TRAINERS:
            raise ConfigError(f"unknown trainer {self.kind!r}; expected one of {TRAINERS}")
        if self.mu is None:
            self.mu = 0.05 if self.kind == "lms" else 0.5
        if self.mu <= 0:
            raise ConfigError("step size mu must be positive")
        if self.kind == "nlms" and not self.mu < 2:
            raise ConfigError("NLMS step size must lie in (0, 2)")
        if self.kind == "rls" and not (0.9 < self.lam <= 1.0 and self.delta > 0):
            raise ConfigError("RLS needs 0.9 < lam <= 1 and delta > 0")

    def params(self):
        if self.kind == "rls":
            return {"lam": self.lam, "delta": self.delta}
        if self.kind == "nlms":
            return {"mu": self.mu, "eps": self.eps}
        return {"mu": self.mu}


def run_trainer(samples, desired, trainer=None, w0=None):
    """Feed ``samples`` (N x 3) and ``desired`` (N,) through a trainer in order.

    Returns the final weights and the per-sample a-priori errors.
    """
    trainer = trainer or Trainer()
    samples = np.asarray(samples, dtype=np.float64)
    desired = np.asarray(desired, dtype=np.float64)
    w = np.zeros(3) if w0 is None else np.array(w0, dtype=np.float64)
    errors = np.empty(len(samples))
    if trainer.kind == "rls":
        P = np.eye(3) / trainer.delta
        for n, (s, d) in enumerate(zip(samples, desired)):
            w, P, errors[n] = rls_step(w, P, s, d, trainer.lam)
    elif trainer.kind == "nlms":
        for n, (s, d) in enumerate(zip(samples, desired)):
            w, errors[n] = nlms_step(w, s, d, trainer.mu, trainer.eps)
    else:
        for n, (s, d) in enumerate(zip(samples, desired)):
            w, errors[n] = lms_step(w, s, d, trainer.mu)
    return w, errors


def windowed_mse(errors, window=MSE_WINDOW):
    """Mean squared error over consecutive non-overlapping windows."""
    sq = np.asarray(errors, dtype=np.float64) ** 2
    edges = np.arange(0, len(sq), window)
    return np.add.reduceat(sq, edges) / np.diff(np.append(edges, len(sq)))


def samples_to_mse(errors, threshold=1e-6):
    """Number of samples after which every squared error stays <= threshold."""
    above = np.flatnonzero(np.asarray(errors) ** 2 > threshold)
    return 0 if len(above) == 0 else int(above[-1]) + 1


# --------------------------------------------------------------------------
# Weights and fusion


@dataclass
class FusionWeights:
    weights: np.ndarray
    trainer: str = "none"
    params: dict = field(default_factory=dict)
    errors: np.ndarray | None = field(default=None, repr=False)
    mse_window: int = MSE_WINDOW

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64).reshape(3)
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("fusion weights must be finite")

    @classmethod
    def equal(cls):
        return cls(np.full(3, 1.0 / 3.0), "equal")

    @classmethod
    def manual(cls, wt, wx, wy):
        return cls(np.array([wt, wx, wy]), "manual")

    @property
    def history(self):
        """Windowed MSE curve of the training run (empty if not trained)."""
        if self.errors is None or len(self.errors) == 0:
            return np.empty(0)
        return windowed_mse(self.errors, self.mse_window)

    def mse_curve_csv(self):
        lines = ["iteration_index,windowed_mse"]
        n = 0 if self.errors is None else len(self.errors)
        for i, mse in enumerate(self.history):
            end = min((i + 1) * self.mse_window, n)
            lines.append(f"{end},{mse:.10e}")
        return "\n".join(lines) + "\n"

    def as_dict(self):
        return {"W_t": float(self.weights[0]), "W_x": float(self.weights[1]),
                "W_y": float(self.weights[2]), "trainer": self.trainer, **self.params}


@dataclass
class PiecewiseWeights:
    """Weights re-trained every ``every`` sections along ``axis``."""

    axis: str
    every: int
    blocks: list  # [(start, stop, FusionWeights)]


@dataclass
class DesiredMap:
    """Training target: a labelled volume or one of the directional maps."""

    source: object  # Volume3D or axis tag 't' / 'x' / 'y'
    section_axis: str = "y"
    section_stride: int | None = None

    def resolve(self, maps):
        if isinstance(self.source, str):
            return maps[axis_index(self.source)].data
        vol = self.source
        if tuple(vol.dims) != tuple(maps[0].dims):
            raise DimsMismatchError(f"desired map dims {vol.dims} differ from saliency dims {maps[0].dims}")
        if vol.data.min() < 0 or vol.data.max() > 1:
            raise ValueError("desired map values must lie in [0, 1]")
        return vol.data


def _check_maps(maps):
    if len({tuple(m.dims) for m in maps}) != 1:
        raise DimsMismatchError("saliency maps have different dims")


def _as_weights(w):
    if isinstance(w, FusionWeights):
        return w.weights
    return FusionWeights(w).weights


def combine(S_t, S_x, S_y, w=None):
    """Fuse the three maps with fixed or piecewise weights, then min-max normalize."""
    maps = (S_t, S_x, S_y)
    _check_maps(maps)
    w = FusionWeights.equal() if w is None else w
    arrays = [np.asarray(m.data, dtype=np.float64) for m in maps]
    if isinstance(w, PiecewiseWeights):
        ax = axis_index(w.axis)
        out = np.empty_like(arrays[0])
        for start, stop, fw in w.blocks:
            sl = [slice(None)] * 3
            sl[ax] = slice(start, stop)
            sl = tuple(sl)
            out[sl] = sum(c * a[sl] for c, a in zip(fw.weights, arrays))
    else:
        ww = _as_weights(w)
        if np.any(ww < 0):
            warnings.warn(f"negative fusion weights {ww.tolist()}", RuntimeWarning, stacklevel=2)
        out = ww[0] * arrays[0] + ww[1] * arrays[1] + ww[2] * arrays[2]
    return minmax_normalize(S_t.with_data(out.astype(np.float32)))


def _section(arr, ax, sections):
    sl = [slice(None)] * 3
    sl[ax] = sections
    return arr[tuple(sl)]


def _training_stream(maps, target, ax, sections):
    # raster order with t fastest inside the training sections
    cols = [_section(np.asarray(m.data, dtype=np.float64), ax, sections).ravel(order="F") for m in maps]
    d = _section(np.asarray(target, dtype=np.float64), ax, sections).ravel(order="F")
    if d.size == 0:
        raise ValueError("empty training section")
    return np.stack(cols, axis=1), d


def adapt_weights(S_t, S_x, S_y, desired, trainer=None, sections=None):
    """Train fusion weights so that the fused map tracks ``desired``.

    ``sections`` restricts training to a slice or index along
    ``desired.section_axis``; by default every voxel is used once in raster
    order.
    """
    maps = (S_t, S_x, S_y)
    _check_maps(maps)
    if not isinstance(desired, DesiredMap):
        desired = DesiredMap(desired)
    trainer = trainer or Trainer()
    target = desired.resolve(maps)
    ax = axis_index(desired.section_axis)
    if sections is None:
        sections = slice(None)
    elif isinstance(sections, (int, np.integer)):
        sections = slice(int(sections), int(sections) + 1)
    samples, d = _training_stream(maps, target, ax, sections)
    w, errors = run_trainer(samples, d, trainer)
    return FusionWeights(w, trainer.kind, trainer.params(), errors)


def adapt_piecewise(S_t, S_x, S_y, desired, every=None, trainer=None):
    """Re-train on section ``k * every`` and use it for ``[k * every, (k+1) * every)``.

    ``every`` defaults to ``desired.section_stride``.
    """
    if not isinstance(desired, DesiredMap):
        desired = DesiredMap(desired)
    every = every or desired.section_stride
    if not every or every < 1:
        raise ConfigError("re-adaptation interval must be >= 1")
    length = S_t.dims[axis_index(desired.section_axis)]
    blocks = []
    for start in range(0, length, every):
        fw = adapt_weights(S_t, S_x, S_y, desired, trainer, sections=start)
        blocks.append((start, min(start + every, length), fw))
    return PiecewiseWeights(desired.section_axis, every, blocks)
