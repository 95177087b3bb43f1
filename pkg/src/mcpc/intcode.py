"""Lossless coding of signed 64-bit integer streams.

Integers are zigzag-mapped to unsigned, then written as a byte stream where
each nonzero is an LEB128-style varint (7 payload bits per byte, high bit set
on every byte but the last) and each maximal run of zeros becomes the token
byte ``0x00`` followed by the varint run length. A nonzero varint never starts
with ``0x00``, so the token is unambiguous.

Encoding and decoding are vectorized; no per-element Python loop runs.
"""

from __future__ import annotations

import numpy as np

from .errors import FormatError

__all__ = ["zigzag", "unzigzag", "encode_varints", "decode_varints", "encode_ints", "decode_ints"]

_MAX_VARINT_BYTES = 10


def zigzag(q: np.ndarray) -> np.ndarray:
    """Map signed to unsigned: q >= 0 -> 2q, q < 0 -> -2q - 1."""
    q = np.asarray(q, dtype=np.int64)
    return ((q << 1) ^ (q >> 63)).view(np.uint64)


def unzigzag(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    return ((z >> np.uint64(1)).view(np.int64)) ^ (-(z & np.uint64(1)).view(np.int64))


def encode_varints(values: np.ndarray) -> bytes:
    v = np.asarray(values, dtype=np.uint64)
    if v.size == 0:
        return b""
    nbytes = np.ones(v.shape, dtype=np.int64)
    for k in range(1, _MAX_VARINT_BYTES):
        nbytes += v >= np.uint64(1) << np.uint64(7 * k)
    ends = np.cumsum(nbytes)
    starts = ends - nbytes
    out = np.empty(int(ends[-1]), dtype=np.uint8)
    for j in range(_MAX_VARINT_BYTES):
        sel = nbytes > j
        if not sel.any():
            break
        chunk = (v[sel] >> np.uint64(7 * j)) & np.uint64(0x7F)
        more = (nbytes[sel] - 1 > j).astype(np.uint64) << np.uint64(7)
        out[starts[sel] + j] = (chunk | more).astype(np.uint8)
    return out.tobytes()


def decode_varints(data) -> np.ndarray:
    b = np.frombuffer(data, dtype=np.uint8)
    if b.size == 0:
        return np.zeros(0, dtype=np.uint64)
    last = b < 0x80
    if not last[-1]:
        raise FormatError("varint stream truncated inside a value")
    ends = np.flatnonzero(last)
    starts = np.concatenate(([0], ends[:-1] + 1))
    lengths = ends - starts + 1
    if lengths.max() > _MAX_VARINT_BYTES:
        raise FormatError("varint longer than 10 bytes")
    pos = np.arange(b.size) - np.repeat(starts, lengths)
    tenth = b[pos == _MAX_VARINT_BYTES - 1]
    if tenth.size and tenth.max() > 1:
        raise FormatError("varint overflows 64 bits")
    parts = (b & 0x7F).astype(np.uint64) << (7 * pos).astype(np.uint64)
    return np.bitwise_or.reduceat(parts, starts)


def encode_ints(q: np.ndarray) -> bytes:
    """Zigzag + zero-run-length + varint encoding of an int64 sequence."""
    z = zigzag(np.asarray(q, dtype=np.int64).reshape(-1))
    n = z.size
    if n == 0:
        return b""
    nz = z != 0
    prev_nz = np.concatenate(([True], nz[:-1]))
    run_start = ~nz & prev_nz
    start_idx = np.flatnonzero(run_start)
    # each run ends at the next nonzero (or the end of the stream)
    next_nz = np.append(np.flatnonzero(nz), n)
    run_end = next_nz[np.searchsorted(next_nz, start_idx)]
    run_len = (run_end - start_idx).astype(np.uint64)

    count = nz.astype(np.int64) + 2 * run_start
    offs = np.cumsum(count) - count
    tokens = np.zeros(int(count.sum()), dtype=np.uint64)
    tokens[offs[nz]] = z[nz]
    tokens[offs[start_idx] + 1] = run_len
    return encode_varints(tokens)


def decode_ints(data, count: int) -> np.ndarray:
    """Inverse of :func:`encode_ints`; ``count`` is the expected value count."""
    tok = decode_varints(data)
    if tok.size == 0:
        if count:
            raise FormatError(f"integer stream empty, expected {count} values")
        return np.zeros(0, dtype=np.int64)
    is_marker = tok == 0
    if is_marker[-1]:
        raise FormatError("integer stream ends with a dangling zero-run marker")
    is_len = np.concatenate(([False], is_marker[:-1]))
    keep = ~is_marker
    reps = np.where(is_len, tok, np.uint64(1))[keep]
    vals = np.where(is_len, np.uint64(0), tok)[keep]
    if reps.size and reps.max() > count:
        raise FormatError(f"zero run longer than the {count}-value stream")
    total = int(reps.sum()) if reps.size else 0
    if total != count:
        raise FormatError(f"integer stream holds {total} values, expected {count}")
    return unzigzag(np.repeat(vals, reps.astype(np.int64)))
