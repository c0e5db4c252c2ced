"""End-to-end saliency pipeline, its flat config file and slice export."""
from __future__ import annotations

import json
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .dcs import DcsConfig, dcs_all
from .errors import BoundsError, ConfigError, SegyError, SeisalError, VolumeFormatError
from .fusion import (
    DesiredMap,
    FusionWeights,
    Trainer,
    adapt_piecewise,
    adapt_weights,
    combine,
)
from .segy import read_segy
from .spectral import energy_volumes
from .synth import auc
from .volume import AXES, axis_index, extract_slice, read_svol, write_pgm, write_svol

SEGY_SUFFIXES = (".sgy", ".segy")


# --------------------------------------------------------------------------
# Configuration


@dataclass
class PipelineConfig:
    input: str = ""
    output: str = ""
    # tiling
    cube_side_n: int = 16
    stride: int = 8
    taper: str = "none"
    # directional center-surround
    orientation_t: str = "full"
    orientation_x: str = "full"
    orientation_y: str = "full"
    template_t: str = ""
    template_x: str = ""
    template_y: str = ""
    radius: int = 2
    sigma: float = 1.0
    weighting: str = "inner"
    # fusion
    fusion: str = "equal"
    weights: tuple = (1 / 3, 1 / 3, 1 / 3)
    trainer: str = "nlms"
    desired: str = "axis:t"
    readapt_every: int = 0
    section_axis: str = "y"
    mse_out: str = ""
    # export
    slice_axis: str = "t"
    slice_indices: tuple = ()
    slice_times_ms: tuple = ()
    export_dir: str = ""
    export_format: str = "pgm"
    intermediates_dir: str = ""
    # SEG-Y geometry
    inline_byte: int = 189
    xline_byte: int = 193
    fill_missing: bool = False
    # evaluation / execution
    mask: str = ""
    threads: str = "1"

    def validate(self):
        if self.fusion not in ("equal", "manual", "adapt"):
            raise ConfigError(f"fusion must be equal, manual or adapt, not {self.fusion!r}")
        if len(self.weights) != 3:
            raise ConfigError("weights needs three values")
        if self.export_format not in ("pgm", "svol"):
            raise ConfigError("export_format must be pgm or svol")
        if self.slice_axis not in AXES or self.section_axis not in AXES:
            raise ConfigError("axis keys must be one of t, x, y")
        if self.readapt_every < 0:
            raise ConfigError("readapt_every must be >= 0")
        self.worker_count()
        for axis in AXES:
            self.dcs_config(axis)
        self.trainer_config()
        return self

    def worker_count(self):
        if str(self.threads) == "auto":
            return os.cpu_count() or 1
        try:
            n = int(self.threads)
        except ValueError:
            raise ConfigError(f"threads must be an integer or 'auto', not {self.threads!r}") from None
        if n < 1:
            raise ConfigError("threads must be >= 1")
        return n

    def dcs_config(self, axis):
        template = getattr(self, f"template_{axis}") or None
        return DcsConfig(getattr(self, f"orientation_{axis}"), self.radius, self.sigma,
                         self.weighting, template)

    def trainer_config(self):
        return Trainer(self.trainer)

    def fusion_weights(self):
        if self.fusion == "manual":
            return FusionWeights.manual(*self.weights)
        return FusionWeights.equal()


def _parse_value(kind, text):
    text = text.strip()
    if kind is bool:
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off", ""):
            return False
        raise ConfigError(f"not a boolean: {text!r}")
    if kind is tuple:
        return tuple(float(p) for p in text.split(",") if p.strip())
    return kind(text)


_FIELD_KINDS = {
    f.name: (tuple if isinstance(f.default, tuple) else type(f.default))
    for f in fields(PipelineConfig)
}
_INT_TUPLES = {"slice_indices"}


def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(repr(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(cfg):
    """Flat ``key = value`` text, one line per field."""
    return "".join(f"{f.name} = {_format_value(getattr(cfg, f.name))}\n" for f in fields(cfg))


def parse_config(text, base=None):
    """Parse ``key = value`` lines (``#`` comments allowed) over ``base``."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _FIELD_KINDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = value
    return apply_overrides(base or PipelineConfig(), values)


def apply_overrides(cfg, overrides):
    """Return a copy of ``cfg`` with string or typed overrides applied."""
    kwargs = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    for key, value in overrides.items():
        if value is None:
            continue
        kind = _FIELD_KINDS[key]
        try:
            if isinstance(value, str):
                value = _parse_value(kind, value)
            elif kind is tuple:
                value = tuple(value)
            else:
                value = kind(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from exc
        if key in _INT_TUPLES:
            value = tuple(int(v) for v in value)
        kwargs[key] = value
    return PipelineConfig(**kwargs)


def load_config(path, overrides=None):
    cfg = parse_config(Path(path).read_text())
    return apply_overrides(cfg, overrides or {})


# --------------------------------------------------------------------------
# Running


class StageError(SeisalError):
    """Failure inside one pipeline stage; ``exit_code`` follows the CLI contract."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
        if isinstance(cause, ConfigError):
            self.exit_code = 2
        elif isinstance(cause, (SegyError, VolumeFormatError)):
            self.exit_code = 3
        else:
            self.exit_code = 4


def load_input(path, cfg=None):
    """Read ``.svol`` or SEG-Y input.  Returns ``(volume, load_report_or_None)``."""
    cfg = cfg or PipelineConfig()
    path = Path(path)
    if path.suffix.lower() in SEGY_SUFFIXES:
        vol, report = read_segy(path, cfg.inline_byte, cfg.xline_byte, cfg.fill_missing)
        return vol, report.as_dict()
    return read_svol(path), None


def time_to_index(time_ms, sample_interval_ms):
    if not sample_interval_ms:
        raise BoundsError("volume has no sample interval; cannot map times to indices")
    return int(round(time_ms / sample_interval_ms))


def export_slices(v, axis="t", indices=(), out_dir=".", times_ms=(), fmt="pgm"):
    """Write one file per requested section, named ``<axis>_<index>.<fmt>``.

    Times (ms) are converted with the volume's sample interval and only make
    sense for the ``t`` axis.
    """
    ax = axis_index(axis)
    tag = AXES[ax]
    wanted = [int(i) for i in indices]
    if times_ms:
        if tag != "t":
            raise BoundsError("time-based export is only defined for the t axis")
        wanted += [time_to_index(t, v.sample_interval_ms) for t in times_ms]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    slices = [(i, extract_slice(v, tag, i)) for i in wanted]  # validate all before writing
    paths = []
    for i, grid in slices:
        if fmt == "pgm":
            paths.append(write_pgm(out_dir / f"{tag}_{i}.pgm", grid))
        elif fmt == "svol":
            vol = v.with_data(np.expand_dims(grid, ax))
            paths.append(write_svol(out_dir / f"{tag}_{i}.svol", vol, {"slice": [tag, i]}))
        else:
            raise ValueError(f"unknown export format {fmt!r}")
    return paths


@contextmanager
def _stage(name, timings):
    t0 = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except (SeisalError, ValueError, OSError, FloatingPointError, IndexError) as exc:
        raise StageError(name, exc) from exc
    finally:
        timings[name] = round(time.perf_counter() - t0, 6)


def _resolve_desired(spec, cfg):
    if spec.startswith("axis:"):
        axis = spec.split(":", 1)[1]
        axis_index(axis)
        return DesiredMap(axis, cfg.section_axis)
    return DesiredMap(read_svol(spec), cfg.section_axis)


def fuse_maps(maps, cfg):
    """Fusion stage shared by ``saliency`` and ``fuse``.  Returns ``(S, info)``."""
    info = {}
    if cfg.fusion != "adapt":
        fw = cfg.fusion_weights()
        info["weights"] = fw.as_dict()
        return combine(*maps, fw), info
    desired = _resolve_desired(cfg.desired, cfg)
    trainer = cfg.trainer_config()
    if cfg.readapt_every:
        pw = adapt_piecewise(*maps, desired, cfg.readapt_every, trainer)
        info["weights"] = [
            {"start": a, "stop": b, **fw.as_dict()} for a, b, fw in pw.blocks
        ]
        curves = [fw for _, _, fw in pw.blocks]
        S = combine(*maps, pw)
    else:
        fw = adapt_weights(*maps, desired, trainer)
        info["weights"] = fw.as_dict()
        curves = [fw]
        S = combine(*maps, fw)
    info["mse_curve"] = [float(m) for m in curves[0].history]
    if cfg.mse_out:
        Path(cfg.mse_out).write_text(curves[0].mse_curve_csv())
        info["mse_out"] = cfg.mse_out
    return S, info


def run_saliency(cfg):
    """Run load, energies, DCS, fusion and export.  Returns ``(S, report)``.

    On failure every file written so far is removed and a :class:`StageError`
    naming the stage is raised.
    """
    timings = {}
    report = {"config": serialize_config(cfg), "timings": timings}
    written = []
    try:
        with _stage("config", timings):
            cfg.validate()
            threads = cfg.worker_count()
            cfgs = [cfg.dcs_config(a) for a in AXES]
        with _stage("load", timings):
            vol, load_report = load_input(cfg.input, cfg)
            if load_report:
                report["load"] = load_report
            report["dims"] = list(vol.dims)
        with _stage("energy", timings):
            energies = energy_volumes(vol, n=cfg.cube_side_n, stride=cfg.stride,
                                      taper=cfg.taper, threads=threads)
        with _stage("dcs", timings):
            # stored precision, so that re-fusing saved maps reproduces S exactly
            maps = tuple(m.with_data(m.data.astype(np.float32))
                         for m in dcs_all(energies, *cfgs, threads=threads))
        with _stage("fusion", timings):
            S, info = fuse_maps(maps, cfg)
            report.update(info)
            if cfg.mse_out:
                written.append(Path(cfg.mse_out))
        with _stage("export", timings):
            if cfg.output:
                written.append(write_svol(cfg.output, S, {"pipeline": "saliency"}))
                written.append(Path(cfg.output).with_suffix(".json"))
            if cfg.intermediates_dir:
                d = Path(cfg.intermediates_dir)
                d.mkdir(parents=True, exist_ok=True)
                for tag, e, s in zip(AXES, energies, maps):
                    for name, v in ((f"E_{tag}", e), (f"S_{tag}", s)):
                        written.append(write_svol(d / f"{name}.svol", v))
                        written.append(d / f"{name}.json")
            if cfg.export_dir and (cfg.slice_indices or cfg.slice_times_ms):
                exported = export_slices(S, cfg.slice_axis, cfg.slice_indices, cfg.export_dir,
                                         cfg.slice_times_ms, cfg.export_format)
                written += exported
                report["exports"] = [str(p) for p in exported]
        if cfg.mask:
            with _stage("evaluate", timings):
                report["detection"] = auc(S, read_svol(cfg.mask)).as_dict()
    except StageError:
        for p in written:
            try:
                Path(p).unlink()
            except OSError:
                pass
        raise
    return S, report


def write_report(report, path=None):
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default)
    if path:
        Path(path).write_text(text + "\n")
    return text


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (tuple, np.ndarray)):
        return list(obj)
    return str(obj)
