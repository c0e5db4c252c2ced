"""SEG-Y (rev 1) reader producing :class:`~seisal.volume.Volume3D`.

Only 4-byte IBM (format code 1) and 4-byte IEEE (format code 5) samples are
accepted.  Byte positions in this module follow the SEG-Y convention of
1-based offsets; the code converts them to 0-based where it reads.
"""
from __future__ import annotations

import io
import mmap
import struct
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import (
    DuplicateTraceError,
    IncompleteGridError,
    TruncatedStreamError,
    UnsupportedFormatError,
)
from .volume import Volume3D

TEXT_HEADER_BYTES = 3200
BINARY_HEADER_BYTES = 400
TRACE_HEADER_BYTES = 240
SUPPORTED_FORMATS = {1: "4-byte IBM float", 5: "4-byte IEEE float"}

DEFAULT_INLINE_BYTE = 189
DEFAULT_XLINE_BYTE = 193
ABSURD_AMPLITUDE = 1e30


@dataclass(frozen=True)
class SegyBinaryHeader:
    samples_per_trace: int
    sample_interval_us: int
    data_format_code: int
    extended_headers: int = 0


@dataclass(frozen=True)
class TraceHeader:
    inline_no: int
    crossline_no: int
    num_samples: int


@dataclass
class Geometry:
    inlines: list
    crosslines: list
    trace_offsets: dict  # (inline, crossline) -> byte offset of the trace header
    num_samples: int
    trace_count: int

    @property
    def inline_range(self):
        return (self.inlines[0], self.inlines[-1])

    @property
    def crossline_range(self):
        return (self.crosslines[0], self.crosslines[-1])


@dataclass
class LoadReport:
    path: str
    trace_count: int
    inline_range: tuple
    crossline_range: tuple
    samples_per_trace: int
    sample_interval_us: int
    data_format_code: int
    missing_traces: int = 0
    zeroed_samples: int = 0
    dims: tuple = field(default=())

    def as_dict(self):
        return asdict(self)


def _read_exact(stream, offset, size):
    stream.seek(offset)
    buf = stream.read(size)
    if len(buf) != size:
        raise TruncatedStreamError(f"expected {size} bytes at offset {offset}, got {len(buf)}")
    return buf


def _as_stream(source):
    if isinstance(source, (bytes, bytearray, memoryview, mmap.mmap)):
        return io.BytesIO(bytes(source)) if not isinstance(source, mmap.mmap) else source
    return source


def parse_headers(stream):
    """Return the raw 3200-byte textual header and the decoded binary header."""
    stream = _as_stream(stream)
    head = _read_exact(stream, 0, TEXT_HEADER_BYTES + BINARY_HEADER_BYTES)
    text = head[:TEXT_HEADER_BYTES]
    b = head[TEXT_HEADER_BYTES:]
    # bytes 3217-3218 interval, 3221-3222 samples/trace, 3225-3226 format code
    interval, = struct.unpack_from(">H", b, 3216 - 3200)
    nsamples, = struct.unpack_from(">H", b, 3220 - 3200)
    fmt, = struct.unpack_from(">H", b, 3224 - 3200)
    n_ext, = struct.unpack_from(">h", b, 3504 - 3200)
    if fmt not in SUPPORTED_FORMATS:
        raise UnsupportedFormatError(f"data format code {fmt} is not supported (only 1 and 5)")
    return text, SegyBinaryHeader(nsamples, interval, fmt, max(n_ext, 0))


def ibm_to_ieee(words):
    """Decode big-endian IBM System/360 single-precision words to float32.

    Accepts a scalar or array of unsigned 32-bit integers (already byte-swapped
    to native order).  The exact value is formed in float64 and rounded once to
    the nearest float32.
    """
    w = np.asarray(words, dtype=np.uint32)
    sign = np.where(w >> 31, -1.0, 1.0)
    exponent = ((w >> 24) & 0x7F).astype(np.int64)
    fraction = (w & 0x00FFFFFF).astype(np.float64)
    with np.errstate(over="ignore"):
        value = (sign * np.ldexp(fraction, 4 * (exponent - 64) - 24)).astype(np.float32)
    return value if value.ndim else value[()]


def read_trace_header(buf, inline_byte=DEFAULT_INLINE_BYTE, xline_byte=DEFAULT_XLINE_BYTE):
    il, = struct.unpack_from(">i", buf, inline_byte - 1)
    xl, = struct.unpack_from(">i", buf, xline_byte - 1)
    ns, = struct.unpack_from(">H", buf, 114)
    return TraceHeader(il, xl, ns)


def _first_trace_offset(header):
    return TEXT_HEADER_BYTES + BINARY_HEADER_BYTES + TEXT_HEADER_BYTES * header.extended_headers


def scan_geometry(stream, header=None, inline_byte=DEFAULT_INLINE_BYTE,
                  xline_byte=DEFAULT_XLINE_BYTE, fill_missing=False):
    """Single pass over the trace headers establishing the inline x crossline grid."""
    stream = _as_stream(stream)
    if header is None:
        _, header = parse_headers(stream)
    stream.seek(0, io.SEEK_END)
    size = stream.tell()
    pos = _first_trace_offset(header)

    ns = header.samples_per_trace
    offsets = {}
    while pos < size:
        th = read_trace_header(_read_exact(stream, pos, TRACE_HEADER_BYTES), inline_byte, xline_byte)
        if ns == 0:
            ns = th.num_samples
        if th.num_samples not in (0, ns):
            raise TruncatedStreamError(
                f"trace at byte {pos} has {th.num_samples} samples, expected {ns}")
        if ns == 0:
            raise TruncatedStreamError("samples per trace is zero")
        key = (th.inline_no, th.crossline_no)
        if key in offsets:
            raise DuplicateTraceError(f"duplicate trace inline={key[0]} crossline={key[1]}")
        offsets[key] = pos
        pos += TRACE_HEADER_BYTES + 4 * ns
    if pos != size:
        raise TruncatedStreamError("file ends inside the last trace")
    if not offsets:
        raise TruncatedStreamError("no traces found")

    inlines = sorted({k[0] for k in offsets})
    crosslines = sorted({k[1] for k in offsets})
    missing = len(inlines) * len(crosslines) - len(offsets)
    if missing and not fill_missing:
        raise IncompleteGridError(
            f"{missing} traces missing from the {len(inlines)} x {len(crosslines)} grid")
    return Geometry(inlines, crosslines, offsets, ns, len(offsets))


def _decode_samples(raw, fmt):
    words = np.frombuffer(raw, dtype=">u4")
    if fmt == 1:
        return ibm_to_ieee(words.astype(np.uint32))
    return words.view(">f4").astype(np.float32)


def read_segy(path, inline_byte=DEFAULT_INLINE_BYTE, xline_byte=DEFAULT_XLINE_BYTE,
              fill_missing=False, use_mmap=False):
    """Load a SEG-Y file into a volume.  Returns ``(volume, LoadReport)``.

    Axes: ``T`` samples per trace, ``X`` crosslines, ``Y`` inlines.  Non-finite
    or absurd (``|v| > 1e30``) samples are replaced by zero and counted.
    """
    with open(path, "rb") as fh:
        if use_mmap:
            try:
                stream = mmap.mmap(fh.fileno(), 0, access=mmap.ACCESS_READ)
            except ValueError:  # empty file cannot be mapped
                stream = fh
        else:
            stream = fh
        _, header = parse_headers(stream)
        geom = scan_geometry(stream, header, inline_byte, xline_byte, fill_missing)
        T, X, Y = geom.num_samples, len(geom.crosslines), len(geom.inlines)
        xl_index = {xl: i for i, xl in enumerate(geom.crosslines)}
        il_index = {il: i for i, il in enumerate(geom.inlines)}
        data = np.zeros((T, X, Y), dtype=np.float32)
        for (il, xl), pos in sorted(geom.trace_offsets.items(), key=lambda kv: kv[1]):
            raw = _read_exact(stream, pos + TRACE_HEADER_BYTES, 4 * T)
            data[:, xl_index[xl], il_index[il]] = _decode_samples(raw, header.data_format_code)
        if stream is not fh:
            stream.close()

    with np.errstate(invalid="ignore"):
        bad = ~np.isfinite(data) | (np.abs(data) > ABSURD_AMPLITUDE)
    zeroed = int(bad.sum())
    if zeroed:
        warnings.warn(f"{path}: zeroed {zeroed} non-finite or absurd samples", RuntimeWarning, stacklevel=2)
        data[bad] = 0.0

    si_ms = header.sample_interval_us / 1000.0 if header.sample_interval_us else None
    vol = Volume3D(data, si_ms, origin=(geom.inlines[0], geom.crosslines[0], 0))
    report = LoadReport(
        path=str(path),
        trace_count=geom.trace_count,
        inline_range=geom.inline_range,
        crossline_range=geom.crossline_range,
        samples_per_trace=T,
        sample_interval_us=header.sample_interval_us,
        data_format_code=header.data_format_code,
        missing_traces=X * Y - geom.trace_count,
        zeroed_samples=zeroed,
        dims=(T, X, Y),
    )
    return vol, report


def load_volume(path, **options):
    """Load a SEG-Y file and return only the volume (see :func:`read_segy`)."""
    return read_segy(path, **options)[0]
