"""Attention-model saliency detection for 3D seismic volumes.

Pipeline: local 3D FFT over overlapping windows, directional spectral
projection into t/x/y energies, directional center-surround comparison and
weighted (optionally adaptive) fusion of the three directional maps.
"""
from .dcs import DcsConfig, DirectionalWindow, dcs_all, dcs_saliency, make_window
from .fusion import (
    DesiredMap,
    FusionWeights,
    Trainer,
    adapt_piecewise,
    adapt_weights,
    combine,
    lms_step,
    nlms_step,
    rls_step,
)
from .pipeline import PipelineConfig, export_slices, run_saliency
from .segy import load_volume, read_segy
from .spectral import (
    EnergyVolumes,
    SpectralCube,
    energy_volumes,
    local_dft_oracle,
    local_fft,
    project_spectrum,
    projection_factor,
    spectral_energy,
)
from .synth import SyntheticSpec, auc, generate
from .volume import (
    TileGrid,
    Volume3D,
    extract_slice,
    minmax_normalize,
    read_svol,
    tile_plan,
    write_svol,
)

__version__ = "0.1.0"

__all__ = [
    "adapt_piecewise",
    "adapt_weights",
    "auc",
    "combine",
    "dcs_all",
    "dcs_saliency",
    "DcsConfig",
    "DesiredMap",
    "DirectionalWindow",
    "energy_volumes",
    "EnergyVolumes",
    "export_slices",
    "extract_slice",
    "FusionWeights",
    "generate",
    "lms_step",
    "load_volume",
    "local_dft_oracle",
    "local_fft",
    "make_window",
    "minmax_normalize",
    "nlms_step",
    "PipelineConfig",
    "project_spectrum",
    "projection_factor",
    "read_segy",
    "read_svol",
    "rls_step",
    "run_saliency",
    "spectral_energy",
    "SpectralCube",
    "SyntheticSpec",
    "tile_plan",
    "TileGrid",
    "Trainer",
    "Volume3D",
    "write_svol",
]
