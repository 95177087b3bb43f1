"""Error-bounded lossy codecs.

Two codecs share one payload layout and the integer backend in
:mod:`mcpc.intcode`:

``QUANT``
    uniform scalar quantization, ``q = rint(x / 2tol)``, decoded as ``q * 2tol``.
``LORENZO``
    the same quantization lattice, but the integers are coded as residuals of
    the d-dimensional first-order Lorenzo predictor over previously decoded
    neighbours (out-of-range neighbours count as zero). Since decoded values are
    ``q * 2tol`` the predictor runs exactly on the integer lattice, so encoder
    and decoder stay in lock step and the pointwise bound holds by construction.

Every decoded value is checked against the bound in floating point. Values
that fail the check even after trying the neighbouring bins, or whose bin
index is too large for the integer stream, are stored verbatim in an
exception list. ``tol == 0`` stores every value verbatim.

Payload layout, all little-endian::

    step      f64   (0.0 means verbatim mode)
    count     u64   number of values
    nexc      u32   number of exceptions
    body            integer stream, or count raw f64 words in verbatim mode
    exceptions      nexc x (index u64, raw f64 word)
    crc32     u32   over every preceding byte
"""

from __future__ import annotations

import enum
import math
import struct
import sys
import zlib
from dataclasses import dataclass

import numpy as np

from . import intcode
from .errors import ArgumentError, FormatError, IntegrityError, ShapeError
from .field import ScalarField

__all__ = ["CodecId", "EncodedPayload", "compress", "decompress", "codec_from_name", "check_crc"]

_HEADER = struct.Struct("<dQI")
_CRC = struct.Struct("<I")
_EXC_DTYPE = np.dtype([("index", "<u8"), ("word", "<f8")])

QUANT_LIMIT = 2**62


class CodecId(enum.IntEnum):
    QUANT = 1
    LORENZO = 2


def codec_from_name(name) -> CodecId:
    if isinstance(name, CodecId):
        return name
    try:
        return CodecId[str(name).upper()]
    except KeyError:
        raise ArgumentError(f"unknown codec {name!r}; expected quant or lorenzo") from None


@dataclass(frozen=True)
class EncodedPayload:
    codec: CodecId
    data: bytes
    dims: tuple

    @property
    def nbytes(self) -> int:
        return len(self.data)


def _limit(codec: CodecId, ndim: int) -> int:
    if codec is CodecId.LORENZO:
        # d differencing passes grow a value by at most 2**d
        return 2 ** (62 - ndim)
    return QUANT_LIMIT


def _lorenzo_forward(q: np.ndarray) -> np.ndarray:
    r = q
    for ax in range(q.ndim):
        r = np.diff(r, axis=ax, prepend=0)
    return r


def _lorenzo_inverse(r: np.ndarray) -> np.ndarray:
    q = r
    for ax in range(r.ndim):
        q = np.cumsum(q, axis=ax)
    return q


def _closest_correction(base: float, goal: float) -> float:
    """Pick a double v making ``base + v`` (rounded) as close to ``goal`` as possible."""
    base, goal = float(base), float(goal)
    v0 = goal - base
    cands = [v0, 0.0, -base]
    up = down = v0
    for _ in range(4):
        up = math.nextafter(up, math.inf)
        down = math.nextafter(down, -math.inf)
        cands += [up, down]
    best = v0
    best_err = math.inf
    for v in cands:
        if not math.isfinite(v):
            continue
        err = abs(goal - (base + v))
        if err < best_err:
            best, best_err = v, err
    return best


class _Bound:
    """Pointwise acceptance test for a candidate decoded value.

    Without a reference the test is ``|x - d| <= tol``. With a reference
    ``(base, target)`` it is ``|target - (base + d)| <= min(tol, |target - base|)``,
    i.e. the bound is enforced on the running sum, and no point gets worse.
    """

    def __init__(self, x, tol, base=None, target=None):
        self.x = x
        self.base = base
        self.target = target
        if target is None:
            self.limit = np.full(x.shape, tol)
        else:
            self.limit = np.minimum(tol, np.abs(target - base))

    def ok(self, d, idx=None):
        if idx is None:
            idx = slice(None)
        if self.target is None:
            return np.abs(self.x[idx] - d) <= self.limit[idx]
        return np.abs(self.target[idx] - (self.base[idx] + d)) <= self.limit[idx]

    def verbatim(self, idx):
        if self.target is None:
            return self.x[idx].copy()
        return np.array(
            [_closest_correction(b, g) for b, g in zip(self.base[idx], self.target[idx])],
            dtype=np.float64,
        )


def _step(tol: float) -> float:
    s = 2.0 * tol
    return s if math.isfinite(s) else sys.float_info.max


def _quantize(x, tol, limit, bound):
    """Return (q, exception indices, exception words, step)."""
    s = _step(tol)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _quantize_at(x, s, limit, bound)


def _quantize_at(x, s, limit, bound):
    qf = np.rint(x / s)
    usable = np.abs(qf) < limit
    q = np.where(usable, qf, 0.0).astype(np.int64)
    good = usable & bound.ok(q.astype(np.float64) * s)
    for adj in (-1, 1, None):
        bad = np.flatnonzero(~good)
        if bad.size == 0:
            break
        if adj is None:
            trial = np.zeros(bad.size, dtype=np.int64)
        else:
            trial = q[bad] + adj
        fits = np.abs(trial) < limit
        hit = fits & bound.ok(trial.astype(np.float64) * s, bad)
        q[bad[hit]] = trial[hit]
        good[bad[hit]] = True
    exc = np.flatnonzero(~good)
    q[exc] = 0
    return q, exc, bound.verbatim(exc), s


def compress(codec, field: ScalarField, tol: float, *, base: ScalarField | None = None,
             target: ScalarField | None = None) -> EncodedPayload:
    """Encode ``field`` so every decoded value lies within ``tol`` of its input.

    When ``base`` and ``target`` are given the bound is instead enforced on
    ``target - (base + decoded)``, evaluated in float64 exactly as a caller
    accumulating components will evaluate it. This is how multi-component
    construction keeps ``|x - x~_i| <= tau_i`` free of rounding slack.
    """
    codec = codec_from_name(codec)
    tol = float(tol)
    if not tol >= 0.0 or math.isnan(tol):
        raise ArgumentError(f"tolerance must be >= 0, got {tol}")
    if (base is None) != (target is None):
        raise ArgumentError("base and target must be given together")
    x = field.flat
    b = t = None
    if target is not None:
        if base.dims != field.dims or target.dims != field.dims:
            raise ShapeError("base/target dims differ from field dims")
        b, t = base.flat, target.flat
    bound = _Bound(x, tol, b, t)
    n = x.size

    if tol == 0.0:
        words = x.copy() if t is None else t - b
        if t is not None:
            miss = np.flatnonzero(~bound.ok(words))
            words[miss] = bound.verbatim(miss)
        body = words.astype("<f8").tobytes()
        head = _HEADER.pack(0.0, n, 0)
        raw = head + body
        return EncodedPayload(codec, raw + _CRC.pack(zlib.crc32(raw)), field.dims)

    q, exc, words, s = _quantize(x, tol, _limit(codec, len(field.dims)), bound)
    if codec is CodecId.LORENZO:
        q = _lorenzo_forward(q.reshape(field.dims)).reshape(-1)
    exc_rec = np.empty(exc.size, dtype=_EXC_DTYPE)
    exc_rec["index"] = exc
    exc_rec["word"] = words
    raw = _HEADER.pack(s, n, exc.size) + intcode.encode_ints(q) + exc_rec.tobytes()
    return EncodedPayload(codec, raw + _CRC.pack(zlib.crc32(raw)), field.dims)


def check_crc(data: bytes):
    """Raise unless ``data`` ends with the CRC32 of everything before it."""
    if len(data) < _HEADER.size + _CRC.size:
        raise FormatError(f"payload too short ({len(data)} bytes)")
    (crc,) = _CRC.unpack_from(data, len(data) - _CRC.size)
    if zlib.crc32(data[: -_CRC.size]) != crc:
        raise IntegrityError("payload CRC32 mismatch")


def decompress(payload: EncodedPayload) -> ScalarField:
    codec = codec_from_name(payload.codec)
    data = bytes(payload.data)
    dims = tuple(payload.dims)
    check_crc(data)
    s, n, nexc = _HEADER.unpack_from(data, 0)
    if n != math.prod(dims):
        raise FormatError(f"payload holds {n} values but dims {dims} need {math.prod(dims)}")
    body_end = len(data) - _CRC.size - nexc * _EXC_DTYPE.itemsize
    if body_end < _HEADER.size:
        raise FormatError("exception list overruns payload")
    body = data[_HEADER.size:body_end]

    if s == 0.0:
        if nexc or len(body) != 8 * n:
            raise FormatError("verbatim payload has wrong length")
        values = np.frombuffer(body, dtype="<f8").astype(np.float64)
    else:
        if not (math.isfinite(s) and s > 0.0):
            raise FormatError(f"invalid quantization step {s!r}")
        q = intcode.decode_ints(body, n)
        if codec is CodecId.LORENZO:
            q = _lorenzo_inverse(q.reshape(dims)).reshape(-1)
        values = q.astype(np.float64) * s
        if nexc:
            exc = np.frombuffer(data, dtype=_EXC_DTYPE, count=nexc, offset=body_end)
            idx = exc["index"].astype(np.int64)
            if idx.size and (idx.min() < 0 or idx.max() >= n):
                raise FormatError("exception index out of range")
            values[idx] = exc["word"]
    if not np.isfinite(values).all():
        raise FormatError("payload decodes to non-finite values")
    return ScalarField(values, dims, check=False)
