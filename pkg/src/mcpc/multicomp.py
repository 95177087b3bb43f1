"""Multi-component progressive-precision representation of scalar fields.

A field ``x`` is stored as components ``c_1 .. c_n``. Each component is the
lossy-compressed residual left after adding up the components before it,
compressed to a tolerance from a geometric schedule ``tau_i = 2**(-delta*i) * tau0``.
Any prefix of ``m`` components, summed left to right, reconstructs ``x`` to
within ``tau_m``; adding further components refines the result without any
retained decoder state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple, Sequence

import numpy as np

from .codec import CodecId, EncodedPayload, codec_from_name, compress, decompress
from .errors import ArgumentError, RangeError, SequencingError, ShapeError
from .field import ScalarField, add_in_place, max_abs_error, stats, subtract

__all__ = [
    "ToleranceSchedule",
    "ComponentRecord",
    "RefineState",
    "Retrieval",
    "build_schedule",
    "construct",
    "reconstruct",
    "refine",
    "components_needed",
    "reconstruct_to_tolerance",
    "construct_lossless",
    "split_scalar",
]

MAX_DELTA = 16
# extra verbatim components allowed after the cap when one tol=0 pass is not exact
_MAX_EXACT_PASSES = 4


@dataclass(frozen=True)
class ToleranceSchedule:
    tau0: float
    delta: int
    taus: tuple

    @property
    def n(self) -> int:
        return len(self.taus)


@dataclass
class ComponentRecord:
    index: int
    codec: CodecId
    prescribed_tol: float
    measured_error: float
    payload_bits: int
    payload: EncodedPayload | None = dc_field(default=None, compare=False)

    @property
    def loaded(self) -> bool:
        return self.payload is not None


@dataclass
class RefineState:
    approx: ScalarField
    next_index: int = 1

    @classmethod
    def start(cls, dims) -> "RefineState":
        return cls(ScalarField.zeros(dims), 1)

    @property
    def dims(self):
        return self.approx.dims


class Retrieval(NamedTuple):
    field: ScalarField
    m_used: int
    met: bool


def _check_delta(delta):
    if not (isinstance(delta, (int, np.integer)) and 1 <= delta <= MAX_DELTA):
        raise ArgumentError(f"delta must be an integer in 1..{MAX_DELTA}, got {delta!r}")


def build_schedule(value_range: float, delta: int, n: int) -> ToleranceSchedule:
    """Tolerances ``value_range * 2**(-delta*i)`` for ``i = 1..n``.

    A zero range gives the single exact tolerance ``(0.0,)``. A schedule whose
    tolerances underflow is cut at its first zero entry.
    """
    _check_delta(delta)
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ArgumentError(f"component count must be >= 1, got {n!r}")
    value_range = float(value_range)
    if not value_range >= 0.0 or not math.isfinite(value_range):
        raise ArgumentError(f"range must be finite and >= 0, got {value_range}")
    if value_range == 0.0:
        return ToleranceSchedule(0.0, int(delta), (0.0,))
    taus = []
    for i in range(1, n + 1):
        tau = math.ldexp(value_range, -delta * i)
        taus.append(tau)
        if tau == 0.0:
            break
    return ToleranceSchedule(value_range, int(delta), tuple(taus))


def _add_component(x, approx, tau, codec, index):
    resid = subtract(x, approx)
    payload = compress(codec, resid, tau, base=approx, target=x)
    add_in_place(approx, decompress(payload))
    err = max_abs_error(x, approx)
    return ComponentRecord(index, codec, tau, err, 8 * payload.nbytes, payload)


def construct(x: ScalarField, schedule: ToleranceSchedule, codec, trace: list | None = None) -> list[ComponentRecord]:
    """Compress ``x`` into one component per scheduled tolerance.

    If ``trace`` is a list, a copy of the running approximation is appended to
    it after each component.
    """
    codec = codec_from_name(codec)
    approx = ScalarField.zeros(x.dims)
    records = []
    for i, tau in enumerate(schedule.taus, start=1):
        records.append(_add_component(x, approx, tau, codec, i))
        if trace is not None:
            trace.append(approx.copy())
    return records


def _payload(rec: ComponentRecord) -> EncodedPayload:
    if rec.payload is None:
        raise SequencingError(f"component {rec.index} has no payload loaded")
    return rec.payload


def refine(state: RefineState, nxt: ComponentRecord) -> RefineState:
    if nxt.index != state.next_index:
        raise SequencingError(f"expected component {state.next_index}, received {nxt.index}")
    c = decompress(_payload(nxt))
    if c.dims != state.dims:
        raise ShapeError(f"component dims {c.dims} differ from state dims {state.dims}")
    add_in_place(state.approx, c)
    state.next_index += 1
    return state


def reconstruct(components: Sequence[ComponentRecord], m: int, dims=None) -> ScalarField:
    """Sum the first ``m`` components left to right.

    ``dims`` is only needed when ``m == 0`` and no component carries a payload.
    """
    if not 0 <= m <= len(components):
        raise ArgumentError(f"m={m} outside 0..{len(components)}")
    if dims is None:
        loaded = [c for c in components if c.payload is not None]
        if not loaded:
            if m:
                raise SequencingError("no component payloads are loaded")
            raise ArgumentError("dims required to build an empty reconstruction")
        dims = loaded[0].payload.dims
    state = RefineState.start(dims)
    for rec in components[:m]:
        refine(state, rec)
    return state.approx


def components_needed(components: Sequence[ComponentRecord], tol: float) -> tuple[int, bool]:
    """Smallest prefix whose recorded error is within ``tol``; metadata only."""
    if not tol >= 0.0:
        raise ArgumentError(f"tolerance must be >= 0, got {tol}")
    for i, rec in enumerate(components, start=1):
        if rec.measured_error <= tol:
            return i, True
    return len(components), False


def reconstruct_to_tolerance(components: Sequence[ComponentRecord], tol: float, dims=None) -> Retrieval:
    m, met = components_needed(components, tol)
    return Retrieval(reconstruct(components, m, dims), m, met)


def construct_lossless(x: ScalarField, delta: int, codec, max_components: int = 64) -> list[ComponentRecord]:
    """Add components on the open-ended schedule until ``x`` is reproduced bit for bit.

    If ``max_components`` scheduled components are not enough, verbatim
    (``tol = 0``) components are appended until the sum is exact. Exactness is
    numeric equality, which is bitwise equality except that a ``-0.0`` input
    comes back as ``+0.0``.
    """
    _check_delta(delta)
    if max_components < 1:
        raise ArgumentError(f"max_components must be >= 1, got {max_components}")
    codec = codec_from_name(codec)
    tau0 = stats(x).range
    approx = ScalarField.zeros(x.dims)
    records = []
    for i in range(1, max_components + 1):
        tau = math.ldexp(tau0, -delta * i)
        records.append(_add_component(x, approx, tau, codec, i))
        if approx == x or tau == 0.0:
            break
    passes = 0
    while approx != x:
        if passes == _MAX_EXACT_PASSES:
            raise RuntimeError("verbatim components failed to reach an exact sum")
        records.append(_add_component(x, approx, 0.0, codec, len(records) + 1))
        passes += 1
    return records


_F32_MAX = float(np.finfo(np.float32).max)
_F32_TINY = float(np.finfo(np.float32).tiny)


def split_scalar(x: float, n: int) -> list[float]:
    """Expand a double into ``n`` single-precision components.

    ``c_k = fl32(x - (c_1 + ... + c_{k-1}))`` with the partial sum formed in
    double precision, left to right.
    """
    x = float(x)
    if n < 1:
        raise ArgumentError(f"component count must be >= 1, got {n}")
    if not math.isfinite(x) or (x != 0.0 and not _F32_TINY <= abs(x) <= _F32_MAX):
        raise RangeError(f"{x!r} is outside the normal single-precision range")
    parts = []
    acc = 0.0
    for _ in range(n):
        c = float(np.float32(x - acc))
        parts.append(c)
        acc += c
    return parts
