"""Minimal SEG-Y writer used to generate test fixtures.

Also holds an IBM-float encoder and a reference decoder written with exact
rational arithmetic, independent of the package implementation.
"""
import math
import struct
from fractions import Fraction

import numpy as np


def ieee_to_ibm(x):
    """Encode a Python float as an IBM single-precision word (round to nearest)."""
    if x == 0:
        return 0
    sign = 0x80000000 if x < 0 else 0
    _, e = math.frexp(abs(x))
    exp16 = -(-e // 4)  # ceil(e / 4)
    frac = round(math.ldexp(abs(x), 24 - 4 * exp16))
    if frac == 1 << 24:
        exp16 += 1
        frac = 1 << 20
    return sign | ((exp16 + 64) << 24) | frac


def reference_ibm_decode(word):
    """Exact rational value of an IBM word, rounded to float32."""
    sign = -1 if word >> 31 else 1
    exponent = (word >> 24) & 0x7F
    fraction = word & 0xFFFFFF
    value = sign * Fraction(fraction, 1 << 24) * Fraction(16) ** (exponent - 64)
    return np.float32(float(value))


def write_segy(path, data, fmt=1, inlines=None, crosslines=None, interval_us=4000,
               skip=(), inline_byte=189, xline_byte=193, format_code=None,
               samples_in_binary=None, truncate=0):
    """Write ``data[t, x, y]`` as SEG-Y; trace (inline=y, crossline=x).

    Returns the list of 32-bit sample words written per trace (IBM) so that
    tests can decode them independently.
    """
    data = np.asarray(data, dtype=np.float64)
    T, X, Y = data.shape
    inlines = list(inlines if inlines is not None else range(100, 100 + Y))
    crosslines = list(crosslines if crosslines is not None else range(1, 1 + X))
    text = ("C01 synthetic fixture".ljust(80) * 40).encode("cp500")
    binary = bytearray(400)
    struct.pack_into(">H", binary, 3216 - 3200, interval_us)
    struct.pack_into(">H", binary, 3220 - 3200, T if samples_in_binary is None else samples_in_binary)
    struct.pack_into(">H", binary, 3224 - 3200, fmt if format_code is None else format_code)
    out = bytearray(text + bytes(binary))
    for yi, il in enumerate(inlines):
        for xi, xl in enumerate(crosslines):
            if (il, xl) in skip:
                continue
            th = bytearray(240)
            struct.pack_into(">i", th, inline_byte - 1, il)
            struct.pack_into(">i", th, xline_byte - 1, xl)
            struct.pack_into(">H", th, 114, T)
            trace = data[:, xi, yi]
            if fmt == 1:
                words = np.array([ieee_to_ibm(float(v)) for v in trace], dtype=">u4")
                payload = words.tobytes()
            else:
                payload = trace.astype(">f4").tobytes()
            out += th + payload
    if truncate:
        out = out[:-truncate]
    with open(path, "wb") as fh:
        fh.write(out)
    return path
