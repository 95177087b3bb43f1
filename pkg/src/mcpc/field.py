"""Scalar fields on regular grids: raw-brick I/O, pointwise arithmetic, statistics.

A :class:`ScalarField` wraps a C-ordered float64 numpy array of 1 to 4
dimensions. Values are always finite; f32 inputs are widened on load.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ArgumentError, DataError, FormatError, ShapeError

__all__ = [
    "ScalarField",
    "FieldStats",
    "DTYPES",
    "load_raw",
    "save_raw",
    "subtract",
    "add_in_place",
    "stats",
    "max_abs_error",
]

DTYPES = {"f64": np.dtype("<f8"), "f32": np.dtype("<f4")}


def _check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not 1 <= len(dims) <= 4:
        raise ArgumentError(f"expected 1 to 4 dimensions, got {len(dims)}")
    if any(d < 1 for d in dims):
        raise ArgumentError(f"every extent must be >= 1, got {dims}")
    return dims


def _first_nonfinite(values: np.ndarray) -> int | None:
    bad = ~np.isfinite(values.reshape(-1))
    if bad.any():
        return int(np.argmax(bad))
    return None


class ScalarField:
    """A d-dimensional grid of finite float64 values in row-major order.

    ``values`` is an ndarray of shape ``dims``. The array is owned by the
    field; only :func:`add_in_place` mutates it.
    """

    __slots__ = ("dims", "values")

    def __init__(self, values, dims: Sequence[int] | None = None, *, check: bool = True):
        arr = np.ascontiguousarray(values, dtype=np.float64)
        if dims is None:
            dims = arr.shape if arr.ndim else (1,)
        dims = _check_dims(dims)
        if arr.size != math.prod(dims):
            raise ShapeError(f"{arr.size} values do not fill dims {dims}")
        arr = arr.reshape(dims)
        if check:
            idx = _first_nonfinite(arr)
            if idx is not None:
                raise DataError(f"non-finite value at flat index {idx}")
        self.dims = dims
        self.values = arr

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "ScalarField":
        dims = _check_dims(dims)
        return cls(np.zeros(dims), dims, check=False)

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def copy(self) -> "ScalarField":
        return ScalarField(self.values.copy(), self.dims, check=False)

    def bitwise_equal(self, other: "ScalarField") -> bool:
        """True when dims match and every 64-bit word is identical."""
        return self.dims == other.dims and np.array_equal(
            self.values.view(np.uint64), other.values.view(np.uint64)
        )

    def __eq__(self, other):
        if not isinstance(other, ScalarField):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"ScalarField(dims={self.dims})"


@dataclass(frozen=True)
class FieldStats:
    min: float
    max: float
    range: float
    stddev: float
    mean: float


def load_raw(path, dims: Sequence[int], dtype: str = "f64") -> ScalarField:
    """Read a headerless little-endian brick of ``dims`` values."""
    dims = _check_dims(dims)
    if dtype not in DTYPES:
        raise ArgumentError(f"unsupported dtype {dtype!r}; expected one of {sorted(DTYPES)}")
    dt = DTYPES[dtype]
    path = Path(path)
    expected = math.prod(dims) * dt.itemsize
    actual = path.stat().st_size
    if actual != expected:
        raise FormatError(
            f"{path}: size {actual} bytes does not match dims {dims} x {dt.itemsize} = {expected}"
        )
    raw = np.fromfile(path, dtype=dt)
    idx = _first_nonfinite(raw)
    if idx is not None:
        raise DataError(f"{path}: non-finite value at flat index {idx}")
    return ScalarField(raw.astype(np.float64), dims, check=False)


def save_raw(field: ScalarField, path, dtype: str = "f64") -> int:
    """Write ``field`` as a headerless little-endian brick; returns bytes written."""
    if dtype not in DTYPES:
        raise ArgumentError(f"unsupported dtype {dtype!r}")
    data = field.flat.astype(DTYPES[dtype]).tobytes()
    Path(path).write_bytes(data)
    return len(data)


def _same_dims(a: ScalarField, b: ScalarField):
    if a.dims != b.dims:
        raise ShapeError(f"dims mismatch: {a.dims} vs {b.dims}")


def subtract(a: ScalarField, b: ScalarField) -> ScalarField:
    _same_dims(a, b)
    return ScalarField(a.values - b.values, a.dims, check=False)


def add_in_place(acc: ScalarField, c: ScalarField) -> ScalarField:
    """``acc += c`` pointwise. Components must be added in index order."""
    _same_dims(acc, c)
    np.add(acc.values, c.values, out=acc.values)
    return acc


def stats(x: ScalarField) -> FieldStats:
    v = x.flat
    lo = float(v.min())
    hi = float(v.max())
    mean = float(v.mean())
    if hi == lo:
        sd = 0.0
    else:
        # population standard deviation, scaled so huge ranges do not overflow
        dev = v - mean
        scale = float(np.max(np.abs(dev)))
        sd = scale * float(np.sqrt(np.mean(np.square(dev / scale))))
    return FieldStats(min=lo, max=hi, range=hi - lo, stddev=sd, mean=mean)


def max_abs_error(a: ScalarField, b: ScalarField) -> float:
    _same_dims(a, b)
    return float(np.max(np.abs(a.values - b.values)))
