"""Single-file container for a multi-component field.

All metadata, including every component's tolerance and measured error, sits
in a header ahead of the payloads, so a reader can plan a tolerance-driven
retrieval and then fetch only the leading payloads it needs.

Layout (little-endian)::

    magic            4s   b"MCPC"
    version          u16
    ndims            u8
    dims             u64 x ndims
    dtype            u8   0 = f64, 1 = f32
    delta            u8
    tau0             f64
    n                u16
    table            n x (codec u8, tau f64, measured_error f64,
                          payload_len u64, payload_offset u64)
    payloads         concatenated; offsets relative to the first payload byte
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .codec import CodecId, EncodedPayload, check_crc
from .errors import ArgumentError, FormatError, IntegrityError
from .multicomp import ComponentRecord

__all__ = ["Archive", "FORMAT_VERSION", "MAGIC", "header_size", "write_archive", "read_archive", "to_bytes"]

MAGIC = b"MCPC"
FORMAT_VERSION = 1
_DTYPE_CODES = {"f64": 0, "f32": 1}
_DTYPE_NAMES = {v: k for k, v in _DTYPE_CODES.items()}

_LEAD = struct.Struct("<4sHB")
_MID = struct.Struct("<BBdH")
_ENTRY = struct.Struct("<BddQQ")


def header_size(ndims: int, n: int) -> int:
    return _LEAD.size + 8 * ndims + _MID.size + n * _ENTRY.size


@dataclass
class Archive:
    dims: tuple
    components: list
    delta: int
    tau0: float
    source_dtype: str = "f64"
    format_version: int = FORMAT_VERSION
    # bytes pulled from disk by read_archive; not part of equality
    bytes_read: int = dc_field(default=0, compare=False)

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def n_values(self) -> int:
        count = 1
        for d in self.dims:
            count *= d
        return count

    @property
    def loaded(self) -> int:
        """Length of the leading run of components whose payload is in memory."""
        k = 0
        for rec in self.components:
            if rec.payload is None:
                break
            k += 1
        return k

    @property
    def payload_bytes(self) -> int:
        return sum(rec.payload_bits for rec in self.components) // 8


def _validate(a: Archive):
    if a.n < 1:
        raise ArgumentError("an archive needs at least one component")
    if a.n > 0xFFFF:
        raise ArgumentError(f"too many components ({a.n})")
    if a.source_dtype not in _DTYPE_CODES:
        raise ArgumentError(f"unknown source dtype {a.source_dtype!r}")
    if not 1 <= len(a.dims) <= 4:
        raise ArgumentError(f"bad dims {a.dims}")
    for i, rec in enumerate(a.components, start=1):
        if rec.index != i:
            raise ArgumentError(f"component indices must run 1..n; slot {i} holds {rec.index}")
        if rec.payload is None:
            raise ArgumentError(f"component {i} has no payload to write")
        if 8 * rec.payload.nbytes != rec.payload_bits:
            raise ArgumentError(f"component {i}: payload_bits disagrees with payload length")


def to_bytes(a: Archive) -> bytes:
    _validate(a)
    head = [
        _LEAD.pack(MAGIC, a.format_version, len(a.dims)),
        struct.pack(f"<{len(a.dims)}Q", *a.dims),
        _MID.pack(_DTYPE_CODES[a.source_dtype], a.delta, a.tau0, a.n),
    ]
    offset = 0
    for rec in a.components:
        size = rec.payload.nbytes
        head.append(_ENTRY.pack(int(rec.codec), rec.prescribed_tol, rec.measured_error, size, offset))
        offset += size
    return b"".join(head) + b"".join(rec.payload.data for rec in a.components)


def write_archive(a: Archive, path) -> int:
    data = to_bytes(a)
    Path(path).write_bytes(data)
    return len(data)


class _CountingReader:
    def __init__(self, fh):
        self.fh = fh
        self.count = 0

    def read_exact(self, size: int, what: str) -> bytes:
        data = self.fh.read(size)
        self.count += len(data)
        if len(data) != size:
            raise FormatError(f"truncated archive: wanted {size} bytes for {what}, got {len(data)}")
        return data

    def seek(self, pos: int):
        self.fh.seek(pos)


def read_archive(path, prefix: int | None = None) -> Archive:
    """Load the header and the first ``prefix`` payloads (all when None).

    Metadata for every component is always returned; components past the
    prefix carry ``payload=None``. ``Archive.bytes_read`` reports exactly how
    many file bytes were read.
    """
    with open(path, "rb") as fh:
        r = _CountingReader(fh)
        magic, version, ndims = _LEAD.unpack(r.read_exact(_LEAD.size, "lead-in"))
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise FormatError(f"unsupported format version {version}")
        if not 1 <= ndims <= 4:
            raise FormatError(f"bad ndims {ndims}")
        dims = struct.unpack(f"<{ndims}Q", r.read_exact(8 * ndims, "dims"))
        if any(d < 1 for d in dims):
            raise FormatError(f"bad dims {dims}")
        dtype_code, delta, tau0, n = _MID.unpack(r.read_exact(_MID.size, "header"))
        if dtype_code not in _DTYPE_NAMES:
            raise FormatError(f"bad dtype code {dtype_code}")
        if n < 1:
            raise FormatError("archive declares zero components")
        if prefix is None:
            prefix = n
        if not 0 <= prefix <= n:
            raise ArgumentError(f"prefix {prefix} outside 0..{n}")
        table = r.read_exact(n * _ENTRY.size, "component table")
        payload_start = header_size(ndims, n)

        records = []
        expected_offset = 0
        for i in range(n):
            codec, tau, err, size, offset = _ENTRY.unpack_from(table, i * _ENTRY.size)
            if offset != expected_offset:
                raise FormatError(f"component {i + 1}: offset {offset} breaks contiguous tiling")
            try:
                codec = CodecId(codec)
            except ValueError:
                raise FormatError(f"component {i + 1}: unknown codec id {codec}") from None
            expected_offset += size
            records.append(ComponentRecord(i + 1, codec, tau, err, 8 * size))

        r.seek(payload_start)
        pos = payload_start
        for rec in records[:prefix]:
            data = r.read_exact(rec.payload_bits // 8, f"payload {rec.index}")
            try:
                check_crc(data)
            except IntegrityError as exc:
                raise IntegrityError(f"component {rec.index} (file offset {pos}): {exc}") from None
            pos += len(data)
            rec.payload = EncodedPayload(rec.codec, data, tuple(dims))

        if prefix == n:
            fh.seek(0, 2)
            if fh.tell() != payload_start + expected_offset:
                raise FormatError("archive has trailing bytes after the last payload")

    return Archive(
        dims=tuple(dims),
        components=records,
        delta=delta,
        tau0=tau0,
        source_dtype=_DTYPE_NAMES[dtype_code],
        format_version=version,
        bytes_read=r.count,
    )
