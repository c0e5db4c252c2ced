"""Local 3D spectra, directional spectral projection and spectral energies.

Each window of the volume is transformed with a 3D DFT.  The spectrum is then
split into three directional parts by weighting every bin ``(i, j, k)`` (in
centered frequency coordinates along t, x, y) with

    factor_t = sqrt(j**2 + k**2) / r
    factor_x = sqrt(i**2 + k**2) / r
    factor_y = sqrt(i**2 + j**2) / r,      r = sqrt(i**2 + j**2 + k**2)

and the DC bin is dropped (all factors are 0 there).  The energy of a window
along an axis is the mean magnitude of the corresponding projected spectrum.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimsMismatchError, UnsupportedSizeError
from .volume import AXES, Volume3D, accumulate_tile, axis_index, normalize_by_coverage, tile_plan

ORACLE_MAX_N = 16


@dataclass(frozen=True, eq=False)
class SpectralCube:
    """Complex spectrum of an ``n**3`` window with centered frequency indexing.

    ``bins[a, b, c]`` holds frequency ``(freqs[a], freqs[b], freqs[c])`` where
    ``freqs = arange(-(n // 2), n - n // 2)``.
    """

    bins: np.ndarray

    @property
    def n(self):
        return self.bins.shape[0]

    @property
    def freqs(self):
        return centered_freqs(self.n)

    def bin(self, i, j, k):
        h = self.n // 2
        return self.bins[i + h, j + h, k + h]


@dataclass(frozen=True, eq=False)
class EnergyVolumes:
    t: Volume3D
    x: Volume3D
    y: Volume3D

    def __iter__(self):
        return iter((self.t, self.x, self.y))

    def __getitem__(self, axis):
        return (self.t, self.x, self.y)[axis_index(axis)]

    @property
    def dims(self):
        return self.t.dims


def centered_freqs(n):
    return np.arange(-(n // 2), n - n // 2)


def _check_cube(cube):
    cube = np.asarray(cube, dtype=np.float64)
    if cube.ndim != 3 or len(set(cube.shape)) != 1:
        raise ValueError(f"expected an n x n x n cube, got shape {cube.shape}")
    return cube


@lru_cache(maxsize=8)
def dft_matrix(n):
    """Unitary-free DFT matrix ``D[f, s] = exp(-2j*pi*f*s/n)``."""
    f = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(f, f) / n)


def local_dft_oracle(cube):
    """Reference spectrum built from the Kronecker product of three DFT matrices.

    O(n**6); kept as an independent check on :func:`local_fft`.
    """
    cube = _check_cube(cube)
    n = cube.shape[0]
    if n > ORACLE_MAX_N:
        raise UnsupportedSizeError(f"oracle limited to n <= {ORACLE_MAX_N}, got {n}")
    D = dft_matrix(n)
    kron = np.kron(np.kron(D, D), D)
    bins = (kron @ cube.ravel()).reshape(n, n, n)
    return SpectralCube(np.fft.fftshift(bins))


def _is_pow2(n):
    return n >= 1 and n & (n - 1) == 0


def local_fft(cube, allow_any_size=False):
    """Fast 3D DFT of a cubic window, returned with centered indexing."""
    cube = _check_cube(cube)
    n = cube.shape[0]
    if not (allow_any_size or _is_pow2(n)):
        raise UnsupportedSizeError(f"window side {n} is not a power of two")
    return SpectralCube(np.fft.fftshift(np.fft.fftn(cube)))


def projection_factor(m, i, j, k):
    """Fraction of bin ``(i, j, k)`` assigned to axis ``m``; 0 at DC."""
    r2 = i * i + j * j + k * k
    if r2 == 0:
        return 0.0
    other = (j * j + k * k, i * i + k * k, i * i + j * j)[axis_index(m)]
    return float(np.sqrt(other / r2))


@lru_cache(maxsize=16)
def projection_fields(n, centered=True):
    """Factor fields for all three axes, shape ``(3, n, n, n)``.

    With ``centered=False`` the fields follow raw FFT output order.
    """
    f = centered_freqs(n) if centered else np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
    i, j, k = np.meshgrid(f, f, f, indexing="ij")
    r2 = (i * i + j * j + k * k).astype(np.float64)
    dc = r2 == 0
    r2[dc] = 1.0
    fields = np.stack([
        np.sqrt((j * j + k * k) / r2),
        np.sqrt((i * i + k * k) / r2),
        np.sqrt((i * i + j * j) / r2),
    ])
    fields[:, dc] = 0.0
    fields.setflags(write=False)
    return fields


def project_spectrum(spec):
    """Split a spectrum into its t, x and y projections."""
    fields = projection_fields(spec.n)
    return tuple(SpectralCube(spec.bins * f) for f in fields)


def spectral_energy(projected):
    """Mean bin magnitude of a projected spectrum."""
    return float(np.mean(np.abs(projected.bins)))


# --------------------------------------------------------------------------
# Volume-level features


def _prepare_tiles(tiles, taper):
    # Differences against one sample of the window cancel a constant offset
    # exactly whenever the shifted samples themselves are exact (e.g. float32
    # data shifted in float64), so the energies are then bit-identical.
    tiles = tiles - tiles[:, :1, :1, :1]
    tiles -= tiles.mean(axis=(1, 2, 3), keepdims=True)
    if taper is not None:
        tiles *= taper
    return tiles


def _taper_window(kind, n):
    if kind in (None, "none"):
        return None
    if kind == "hann":
        w = np.hanning(n)
        return w[:, None, None] * w[None, :, None] * w[None, None, :]
    raise ValueError(f"unknown taper {kind!r}")


def _tile_energies(data, origins, n, taper):
    tiles = np.stack([data[t:t + n, x:x + n, y:y + n] for t, x, y in origins])
    tiles = _prepare_tiles(tiles.astype(np.float64), taper)
    mag = np.abs(np.fft.fftn(tiles, axes=(1, 2, 3)))
    fields = projection_fields(n, centered=False)
    return np.stack([(mag * f).mean(axis=(1, 2, 3)) for f in fields], axis=1)


def energy_volumes(v, plan=None, n=16, stride=8, taper=None, threads=1, batch=64):
    """Per-axis spectral energy volumes of ``v``.

    Every window's three energies are splatted over its footprint and the
    overlapping contributions averaged per voxel.  Windows are processed in
    batches (optionally on ``threads`` workers) but accumulated in fixed order,
    so the result does not depend on the thread count.
    """
    data = np.asarray(v.data, dtype=np.float64)
    if plan is None:
        plan = tile_plan(v.dims, n, stride)
    elif tuple(plan.dims) != tuple(v.dims):
        raise DimsMismatchError(f"tile plan for {plan.dims} applied to volume {v.dims}")
    n = plan.n
    window = _taper_window(taper, n)
    origins = plan.tile_origins
    chunks = [origins[i:i + batch] for i in range(0, len(origins), batch)]

    if threads and threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _tile_energies(data, c, n, window), chunks))
    else:
        results = [_tile_energies(data, c, n, window) for c in chunks]
    energies = np.concatenate(results)

    acc = np.zeros((3,) + tuple(v.dims))
    for origin, e in zip(origins, energies):
        for m in range(3):
            accumulate_tile(acc[m], origin, e[m], n=n)
    out = [v.with_data(normalize_by_coverage(acc[m], plan.coverage)) for m in range(3)]
    return EnergyVolumes(*out)


__all__ = [
    "AXES",
    "EnergyVolumes",
    "SpectralCube",
    "centered_freqs",
    "energy_volumes",
    "local_dft_oracle",
    "local_fft",
    "project_spectrum",
    "projection_factor",
    "projection_fields",
    "spectral_energy",
]
