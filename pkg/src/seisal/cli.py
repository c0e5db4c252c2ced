"""Command line entry point: ``seisal {convert,synth,saliency,fuse,export,info}``.

Exit codes: 0 ok, 2 configuration error, 3 input parse error, 4 numeric or
stage failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, SegyError, SeisalError, VolumeFormatError
from .pipeline import (
    PipelineConfig,
    StageError,
    apply_overrides,
    export_slices,
    fuse_maps,
    load_config,
    load_input,
    run_saliency,
    serialize_config,
    write_report,
)
from .segy import read_segy
from .synth import SyntheticSpec, auc, generate
from .volume import read_svol, write_svol

EXIT_OK, EXIT_CONFIG, EXIT_PARSE, EXIT_STAGE = 0, 2, 3, 4


def _ints(text):
    return tuple(int(p) for p in text.split(",") if p.strip())


def _floats(text):
    return tuple(float(p) for p in text.split(",") if p.strip())


def _emit(report, path):
    text = write_report(report, path)
    if not path:
        print(text)


# --------------------------------------------------------------------------
# Subcommands


def cmd_convert(args):
    vol, report = read_segy(args.input, args.inline_bytes, args.xline_bytes, args.fill_missing)
    write_svol(args.output, vol, {"source": str(args.input), "load_report": report.as_dict()})
    _emit(report.as_dict(), args.report)
    return EXIT_OK


def cmd_synth(args):
    dims = _ints(args.dims)
    if len(dims) != 3:
        raise ConfigError("--dims needs three comma-separated integers")
    spec = SyntheticSpec(
        dims=dims,
        scenario=args.scenario,
        noise_sigma=args.noise,
        seed=args.seed,
        dip=args.dip,
        throw=args.throw,
        dome_center=_floats(args.dome_center) if args.dome_center else None,
        dome_radius=args.dome_radius,
        region=_ints(args.region) if args.region else None,
    )
    vol, mask = generate(spec)
    provenance = {"synthetic": {k: v for k, v in vars(args).items() if k != "func"}}
    write_svol(args.out, vol, provenance)
    if args.mask:
        write_svol(args.mask, mask, provenance)
    return EXIT_OK


def _pipeline_overrides(args):
    over = {
        "input": getattr(args, "input", None),
        "output": getattr(args, "output", None),
        "cube_side_n": args.n,
        "stride": args.stride,
        "taper": args.taper,
        "radius": args.radius,
        "sigma": args.sigma,
        "weighting": args.weighting,
        "trainer": args.trainer,
        "desired": args.desired,
        "readapt_every": args.readapt_every,
        "section_axis": args.section_axis,
        "mse_out": args.mse_out,
        "threads": args.threads,
    }
    if args.orientation:
        for axis in "txy":
            over[f"orientation_{axis}"] = args.orientation
    for axis in "txy":
        over[f"orientation_{axis}"] = getattr(args, f"orientation_{axis}") or over.get(f"orientation_{axis}")
        over[f"template_{axis}"] = getattr(args, f"template_{axis}")
    if args.weights:
        mode, _, values = args.weights.partition(":")
        if mode not in ("equal", "manual", "adapt"):
            raise ConfigError(f"--weights must be equal, manual:Wt,Wx,Wy or adapt, not {args.weights!r}")
        over["fusion"] = mode
        if mode == "manual":
            w = _floats(values)
            if len(w) != 3:
                raise ConfigError("manual weights need three values")
            over["weights"] = w
    return over


def _build_config(args, extra):
    over = _pipeline_overrides(args)
    over.update(extra)
    over = {k: v for k, v in over.items() if v is not None}
    if args.config:
        return load_config(args.config, over)
    return apply_overrides(PipelineConfig(), over)


def cmd_saliency(args):
    extra = {
        "slice_axis": args.export_axis,
        "slice_indices": _ints(args.export_index) if args.export_index else None,
        "slice_times_ms": _floats(args.export_time_ms) if args.export_time_ms else None,
        "export_dir": args.export_dir,
        "export_format": args.export_format,
        "intermediates_dir": args.save_intermediates,
        "mask": args.mask,
        "inline_byte": args.inline_bytes,
        "xline_byte": args.xline_bytes,
        "fill_missing": True if args.fill_missing else None,
    }
    cfg = _build_config(args, extra)
    _, report = run_saliency(cfg)
    _emit(report, args.report)
    return EXIT_OK


def cmd_fuse(args):
    cfg = _build_config(args, {"mask": args.mask}).validate()
    maps = tuple(read_svol(p) for p in args.maps)
    S, info = fuse_maps(maps, cfg)
    write_svol(args.out, S, {"pipeline": "fuse"})
    report = {"config": serialize_config(cfg), **info}
    if args.mask:
        report["detection"] = auc(S, read_svol(args.mask)).as_dict()
    _emit(report, args.report)
    return EXIT_OK


def cmd_export(args):
    vol, _ = load_input(args.input)
    paths = export_slices(
        vol,
        args.axis,
        _ints(args.index) if args.index else (),
        args.dir,
        _floats(args.time_ms) if args.time_ms else (),
        args.format,
    )
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_info(args):
    path = Path(args.input)
    vol, load_report = load_input(path)
    data = np.asarray(vol.data, dtype=np.float64)
    info = {
        "path": str(path),
        "dims": list(vol.dims),
        "axis_labels": list(vol.axis_labels),
        "sample_interval_ms": vol.sample_interval_ms,
        "origin": list(vol.origin),
        "min": float(data.min()),
        "max": float(data.max()),
        "mean": float(data.mean()),
        "std": float(data.std()),
    }
    if load_report:
        info["load"] = load_report
    print(json.dumps(info, indent=2, default=list))
    return EXIT_OK


# --------------------------------------------------------------------------
# Argument parsing


def _add_pipeline_options(p):
    g = p.add_argument_group("pipeline")
    g.add_argument("--config", help="key = value config file; flags override its values")
    g.add_argument("--n", type=int, help="window side (default 16)")
    g.add_argument("--stride", type=int, help="window stride, at most n/2 (default 8)")
    g.add_argument("--taper", choices=("none", "hann"))
    g.add_argument("--orientation", help="DCS orientation for all three axes")
    for axis in "txy":
        g.add_argument(f"--orientation-{axis}", dest=f"orientation_{axis}")
        g.add_argument(f"--template-{axis}", dest=f"template_{axis}",
                       help="custom DCS template file (lines of 'i0 j0 r0 w')")
    g.add_argument("--radius", type=int)
    g.add_argument("--sigma", type=float)
    g.add_argument("--weighting", choices=("inner", "outer"))
    g.add_argument("--weights", help="equal | manual:Wt,Wx,Wy | adapt")
    g.add_argument("--trainer", choices=("lms", "nlms", "rls"))
    g.add_argument("--desired", help="desired map: file.svol or axis:t|x|y")
    g.add_argument("--readapt-every", type=int, dest="readapt_every")
    g.add_argument("--section-axis", choices=("t", "x", "y"), dest="section_axis")
    g.add_argument("--mse-out", dest="mse_out", help="CSV file for the training MSE curve")
    g.add_argument("--threads", help="worker count or 'auto'")
    g.add_argument("--mask", help="ground-truth mask (.svol) for detection scores")
    g.add_argument("--report", help="write the JSON run report here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="seisal", description="Saliency detection for 3D seismic volumes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="SEG-Y to .svol")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--inline-bytes", type=int, default=189, dest="inline_bytes")
    p.add_argument("--xline-bytes", type=int, default=193, dest="xline_bytes")
    p.add_argument("--fill-missing", action="store_true", dest="fill_missing")
    p.add_argument("--report")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("synth", help="generate a synthetic volume and its structure mask")
    p.add_argument("--scenario", default="layered+fault")
    p.add_argument("--dims", default="64,64,64")
    p.add_argument("--dip", type=float, default=75.0)
    p.add_argument("--throw", type=int, default=3)
    p.add_argument("--dome-center", dest="dome_center")
    p.add_argument("--dome-radius", type=float, dest="dome_radius")
    p.add_argument("--region", help="t0,t1,x0,x1,y0,y1 for chaotic-patch")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--mask")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("saliency", help="full pipeline: energies, DCS, fusion, export")
    p.add_argument("input", nargs="?")
    p.add_argument("output", nargs="?")
    _add_pipeline_options(p)
    p.add_argument("--export-axis", choices=("t", "x", "y"), dest="export_axis")
    p.add_argument("--export-index", dest="export_index", help="comma-separated slice indices")
    p.add_argument("--export-time-ms", dest="export_time_ms", help="comma-separated times in ms (t axis)")
    p.add_argument("--export-dir", dest="export_dir")
    p.add_argument("--export-format", choices=("pgm", "svol"), dest="export_format")
    p.add_argument("--save-intermediates", dest="save_intermediates",
                   help="directory for E_m and S_m volumes")
    p.add_argument("--inline-bytes", type=int, dest="inline_bytes")
    p.add_argument("--xline-bytes", type=int, dest="xline_bytes")
    p.add_argument("--fill-missing", action="store_true", dest="fill_missing")
    p.set_defaults(func=cmd_saliency)

    p = sub.add_parser("fuse", help="re-fuse saved directional maps S_t S_x S_y")
    p.add_argument("maps", nargs=3, metavar="S_m.svol")
    p.add_argument("--out", required=True)
    _add_pipeline_options(p)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("export", help="write sections of a volume as PGM or .svol")
    p.add_argument("input")
    p.add_argument("--axis", default="t", choices=("t", "x", "y"))
    p.add_argument("--index")
    p.add_argument("--time-ms", dest="time_ms")
    p.add_argument("--dir", default=".")
    p.add_argument("--format", default="pgm", choices=("pgm", "svol"))
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("info", help="print dims and statistics of a .svol or SEG-Y file")
    p.add_argument("input")
    p.set_defaults(func=cmd_info)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"seisal: {exc}", file=sys.stderr)
        return exc.exit_code
    except ConfigError as exc:
        print(f"seisal: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SegyError, VolumeFormatError) as exc:
        print(f"seisal: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SeisalError, ValueError, OSError) as exc:
        print(f"seisal: error: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
