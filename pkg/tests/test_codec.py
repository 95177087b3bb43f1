import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from mcpc import ArgumentError, CodecId, FormatError, IntegrityError, ScalarField, compress, decompress
from mcpc.codec import EncodedPayload, codec_from_name
from mcpc.metrics import synth_field

from conftest import naive_max_abs, random_field

CODECS = [CodecId.QUANT, CodecId.LORENZO]


def roundtrip(codec, x, tol):
    return decompress(compress(codec, x, tol))


def test_codec_ids_are_stable():
    assert int(CodecId.QUANT) == 1 and int(CodecId.LORENZO) == 2
    assert codec_from_name("lorenzo") is CodecId.LORENZO
    with pytest.raises(ArgumentError):
        codec_from_name("zfp")


@pytest.mark.parametrize("codec", CODECS)
def test_constant_field(codec):
    x = ScalarField([7.0] * 4)
    assert naive_max_abs(x.values, roundtrip(codec, x, 0.3).values) <= 0.3
    # 7 sits on the lattice of step 0.5
    assert roundtrip(codec, x, 0.25) == x


def test_two_values_quarter_tol():
    y = roundtrip(CodecId.QUANT, ScalarField([0.0, 1.0]), 0.25)
    assert naive_max_abs([0.0, 1.0], y.values) <= 0.25


@pytest.mark.parametrize("codec", CODECS)
def test_random_cube_tight_tol(codec, rng):
    x = random_field(rng, (16, 16, 16))
    y = roundtrip(codec, x, 2.0**-20)
    assert naive_max_abs(x.values, y.values) <= 2.0**-20


@pytest.mark.parametrize("codec", CODECS)
def test_zero_tol_is_bitwise(codec, rng):
    x = random_field(rng, (5, 7), "wide")
    assert roundtrip(codec, x, 0.0).bitwise_equal(x)


def test_lorenzo_smooth_is_compact():
    x = synth_field("gaussian-mixture", (32, 32, 32), 0)
    p = compress(CodecId.LORENZO, x, 2.0**-8)
    assert 8 * p.nbytes / x.size < 64
    assert naive_max_abs(x.values, decompress(p).values) <= 2.0**-8


def test_lorenzo_beats_quant_on_ramp():
    x = synth_field("ramp", (32, 32, 32), 0)
    q = compress(CodecId.QUANT, x, 1e-3).nbytes
    lz = compress(CodecId.LORENZO, x, 1e-3).nbytes
    assert lz < q


def test_all_zero_field_is_tiny():
    p = compress(CodecId.QUANT, ScalarField.zeros((16, 16, 16)), 0.1)
    # 20-byte header, 3-byte run token, 4-byte crc
    assert p.nbytes == 27


@pytest.mark.parametrize("codec", CODECS)
def test_huge_values_become_exceptions(codec):
    x = ScalarField([1e300, -1e300, 1.0, 0.0])
    y = roundtrip(codec, x, 1e-10)
    assert naive_max_abs(x.values, y.values) <= 1e-10


@pytest.mark.parametrize("tol", [5e-324, 1e-300, 1e300, 1.7e308])
@pytest.mark.parametrize("codec", CODECS)
def test_extreme_tolerances(codec, tol, rng):
    x = random_field(rng, (6, 6), "wide")
    assert naive_max_abs(x.values, roundtrip(codec, x, tol).values) <= tol


def test_negative_tol_rejected():
    with pytest.raises(ArgumentError):
        compress(CodecId.QUANT, ScalarField([1.0]), -1.0)
    with pytest.raises(ArgumentError):
        compress(CodecId.QUANT, ScalarField([1.0]), math.nan)


@pytest.mark.parametrize("codec", CODECS)
def test_flipped_byte_never_silent(codec, rng):
    x = random_field(rng, (8, 8))
    p = compress(codec, x, 1e-3)
    for pos in range(0, p.nbytes, 3):
        bad = bytearray(p.data)
        bad[pos] ^= 0x40
        with pytest.raises((IntegrityError, FormatError)):
            decompress(EncodedPayload(codec, bytes(bad), x.dims))


def test_truncated_payload():
    p = compress(CodecId.QUANT, ScalarField([1.0, 2.0]), 0.1)
    with pytest.raises(FormatError):
        decompress(EncodedPayload(p.codec, p.data[:10], p.dims))
    with pytest.raises(FormatError):
        decompress(EncodedPayload(p.codec, p.data, (3,)))


def test_deterministic(rng):
    x = random_field(rng, (9, 9))
    a, b = compress(CodecId.LORENZO, x, 0.01), compress(CodecId.LORENZO, x, 0.01)
    assert a.data == b.data
    assert decompress(a).bitwise_equal(decompress(b))


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
shapes = hnp.array_shapes(min_dims=1, max_dims=4, min_side=1, max_side=5)


@settings(max_examples=300, deadline=None)
@given(hnp.arrays(np.float64, shapes, elements=finite),
       st.one_of(st.just(0.0), st.floats(min_value=0.0, max_value=1e308, allow_subnormal=True)),
       st.sampled_from(CODECS))
def test_bound_holds_for_any_field(v, tol, codec):
    x = ScalarField(v)
    y = roundtrip(codec, x, tol)
    assert np.all(np.abs(x.values - y.values) <= tol)
    if tol == 0.0:
        assert y.bitwise_equal(x)


def _target_mode(codec, target, base, tol):
    resid = ScalarField(target.values - base.values)
    y = decompress(compress(codec, resid, tol, base=base, target=target))
    return np.abs(target.values - (base.values + y.values))


@settings(max_examples=150, deadline=None)
@given(hnp.arrays(np.float64, shapes, elements=finite), st.floats(0.0, 1e6), st.sampled_from(CODECS))
def test_target_mode_never_worsens_a_point(v, tol, codec):
    target = ScalarField(v)
    base = ScalarField(v / 3.0)
    err = _target_mode(codec, target, base, tol)
    with np.errstate(over="ignore"):
        assert np.all(err <= np.abs(target.values - base.values))


@settings(max_examples=300, deadline=None)
@given(hnp.arrays(np.float64, shapes, elements=finite),
       st.floats(-0.5, 0.5),
       st.one_of(st.just(0.0), st.floats(0.0, 1e300)),
       st.sampled_from(CODECS))
def test_target_mode_bound_near_target(v, u, tol, codec):
    # base within a factor of two of the target, as in every later component
    v = np.clip(v, -1e300, 1e300)
    target = ScalarField(v)
    base = ScalarField(v * (1.0 + u))
    err = _target_mode(codec, target, base, tol)
    assert np.all(err <= tol)
