"""
Walkthrough on the public F3 Netherlands block
==============================================

Needs the F3 SEG-Y volume (freely downloadable from the dGB / TerraNubis open
data repository).  The script converts it, runs the default pipeline and
exports the 1600 ms time slice of both the amplitude and the saliency map, so
the two images can be compared side by side.

Usage::

    python demos/f3_walkthrough.py /path/to/F3.segy [out_dir] [threads]

The same run from the shell::

    seisal convert F3.segy f3.svol --report load.json
    seisal saliency f3.svol f3_S.svol --threads auto --export-time-ms 1600 --export-dir slices
    seisal export f3.svol --axis t --time-ms 1600 --dir slices_amp
"""

import sys
from pathlib import Path

from seisal import PipelineConfig, export_slices, read_segy, run_saliency, write_svol

if len(sys.argv) < 2:
    print(__doc__)
    sys.exit(0)

src = Path(sys.argv[1])
out = Path(sys.argv[2]) if len(sys.argv) > 2 else Path("f3_out")
threads = sys.argv[3] if len(sys.argv) > 3 else "auto"
out.mkdir(parents=True, exist_ok=True)

###############################################################################
# Conversion.  Files with incomplete surveys can be padded with zero traces by
# passing ``fill_missing=True``.

vol, report = read_segy(src)
print("loaded", vol.dims, "at", vol.sample_interval_ms, "ms;", report.as_dict())
svol = write_svol(out / "f3.svol", vol, {"source": str(src)})

###############################################################################
# Amplitude slice at 1600 ms.  The time axis of the file starts at 0 ms; if
# yours carries a delay, shift the requested time by it.

amp = export_slices(vol, "t", (), out / "amplitude", times_ms=(1600,))
print("amplitude slice:", *amp)

###############################################################################
# Saliency with the defaults and equal weights, plus the same slice.

cfg = PipelineConfig(input=str(svol), output=str(out / "f3_S.svol"), threads=threads,
                     export_dir=str(out / "saliency"), slice_times_ms=(1600.0,))
S, run_report = run_saliency(cfg)
print("timings (s):", run_report["timings"])
print("saliency slice:", *run_report["exports"])
