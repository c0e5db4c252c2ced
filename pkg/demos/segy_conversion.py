"""
Reading SEG-Y
=============

Load a SEG-Y file into a volume, convert it to ``.svol`` and export a time
slice.  Pass a path to use your own file; without one, a small IEEE-float
file is written first so the script runs anywhere.
"""

import struct
import sys
import tempfile
from pathlib import Path

import numpy as np

from seisal import export_slices, read_segy, write_svol
from seisal.segy import ibm_to_ieee

work = Path(tempfile.mkdtemp(prefix="seisal-segy-"))


def write_small_segy(path, data, interval_us=4000):
    # 3200-byte text header, 400-byte binary header, then 240-byte trace
    # headers each followed by big-endian float32 samples (format code 5)
    T, X, Y = data.shape
    binary = bytearray(400)
    struct.pack_into(">HHH", binary, 16, interval_us, 0, T)
    struct.pack_into(">H", binary, 24, 5)
    out = bytearray(b" " * 3200) + binary
    for yi in range(Y):
        for xi in range(X):
            th = bytearray(240)
            struct.pack_into(">ii", th, 188, 100 + yi, 1 + xi)
            struct.pack_into(">H", th, 114, T)
            out += th + data[:, xi, yi].astype(">f4").tobytes()
    Path(path).write_bytes(bytes(out))


if len(sys.argv) > 1:
    src = Path(sys.argv[1])
else:
    src = work / "small.sgy"
    t = np.arange(100)[:, None, None]
    write_small_segy(src, np.sin(t / 5.0) * np.ones((100, 12, 10)), interval_us=4000)

###############################################################################
# IBM hexadecimal floats are decoded on the fly; two classic words:

print("0x42640000 ->", ibm_to_ieee(0x42640000), " 0xC276A000 ->", ibm_to_ieee(0xC276A000))

###############################################################################
# Geometry comes from the inline/crossline header words (bytes 189 and 193 by
# default; pass other positions to ``read_segy`` for non-standard files).

vol, report = read_segy(src)
print("load report:", report.as_dict())
print("dims (t, crossline, inline):", vol.dims, " interval", vol.sample_interval_ms, "ms")

write_svol(work / "converted.svol", vol, {"source": str(src)})
paths = export_slices(vol, "t", (vol.dims[0] // 2,), work)
print("wrote", work / "converted.svol", "and", *paths)
