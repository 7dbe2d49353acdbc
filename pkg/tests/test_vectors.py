"""Vector store: dual headers, coercion, scanning, duplication."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dc64 import (DEFAULT_LONG_THRESHOLD, INT32_NA, MAX_ELEMENTS,
                  CapacityError, DiagnosticSink, ElemType,
                  InstrumentationCounters, RangeError, SpecError, TypedVector,
                  VectorHeader, coerce, duplicate, header_length, new_vector,
                  scan_missing_infinite, vector_from_values)


def ref_scan(values, elem_type):
    """Element-by-element reference scan (the independent oracle)."""
    for i, x in enumerate(values):
        if elem_type is ElemType.INT32:
            if int(x) == INT32_NA:
                return i
        else:
            if math.isnan(x) or math.isinf(x):
                return i
    return None


# -- headers ----------------------------------------------------------------

def test_new_vector_zeroed_double():
    v = new_vector(ElemType.DOUBLE, 8)
    assert v.tolist() == [0.0] * 8
    assert v.ref_status == 0
    assert v.header.length32 == 8 and v.header.long_length is None


def test_new_vector_empty_int32():
    v = new_vector(ElemType.INT32, 0)
    assert v.length == 0
    assert v.header.length32 == 0


def test_new_vector_long_header_at_lowered_threshold():
    v = new_vector(ElemType.DOUBLE, 1001, long_threshold=1000)
    assert v.header.length32 == -1
    assert v.header.long_length == 1001
    assert header_length(v) == 1001


def test_new_vector_capacity_ceiling():
    with pytest.raises(CapacityError):
        new_vector(ElemType.DOUBLE, MAX_ELEMENTS + 1)
    # the ceiling itself is a legal header even if not allocatable here
    h = VectorHeader.for_length(MAX_ELEMENTS, 1000)
    assert h.long_length == MAX_ELEMENTS


def test_header_length_trivial():
    assert header_length(vector_from_values([4.0])) == 1


def test_header_long_length_is_authoritative():
    h = VectorHeader.for_length(11, long_threshold=10)
    assert h.length32 == -1 and h.long_length == 11 and h.length == 11


def test_header_default_threshold_boundary():
    at = VectorHeader.for_length(DEFAULT_LONG_THRESHOLD)
    over = VectorHeader.for_length(DEFAULT_LONG_THRESHOLD + 1)
    assert at.length32 == DEFAULT_LONG_THRESHOLD and not at.is_long
    assert over.length32 == -1 and over.long_length == 2**31


@given(length=st.integers(0, 10_000), threshold=st.integers(1, 5_000))
def test_header_dual_rule_property(length, threshold):
    h = VectorHeader.for_length(length, threshold)
    if length > threshold:
        assert h.length32 == -1 and h.long_length == length
    else:
        assert h.length32 == length and h.long_length is None
    assert h.length == length


def test_header_rejects_negative_and_bad_threshold():
    with pytest.raises(SpecError):
        VectorHeader.for_length(-1)
    with pytest.raises(SpecError):
        VectorHeader.for_length(5, long_threshold=0)
    with pytest.raises(SpecError):
        VectorHeader.for_length(5, long_threshold=DEFAULT_LONG_THRESHOLD + 1)


# -- ref status ---------------------------------------------------------------

def test_ref_status_saturates_at_two():
    v = new_vector(ElemType.DOUBLE, 3)
    assert v.ref_status == 0
    v.mark_bound()
    assert v.ref_status == 1
    v.mark_bound()
    v.mark_bound()
    assert v.ref_status == 2


# -- coercion -----------------------------------------------------------------

def test_coerce_int32_to_double_exact():
    v = vector_from_values(range(1, 11), ElemType.INT32)
    out = coerce(v, ElemType.DOUBLE)
    assert out.elem_type is ElemType.DOUBLE
    assert out.tolist() == [float(i) for i in range(1, 11)]


def test_coerce_double_to_int32_truncates():
    v = vector_from_values([9.0])
    out = coerce(v, ElemType.INT32)
    assert out.tolist() == [9]


def test_coerce_truncation_emits_diagnostic():
    sink = DiagnosticSink(1)
    out = coerce(vector_from_values([2.7]), ElemType.INT32, sink=sink)
    assert out.tolist() == [int(2.7)]  # trunc toward zero
    assert len(sink.messages) == 1 and sink.messages[0].level == 1


def test_coerce_trunc_matches_scalar_reference():
    rng = np.random.default_rng(7)
    vals = rng.uniform(-1e6, 1e6, 500)
    out = coerce(vector_from_values(vals), ElemType.INT32, sink=DiagnosticSink(1))
    expected = [int(x) for x in vals]  # python int() truncates toward zero
    assert out.tolist() == expected


def test_coerce_identity_when_types_match():
    v = vector_from_values([1.5, 2.5])
    assert coerce(v, ElemType.DOUBLE) is v


def test_coerce_nan_to_int32_na():
    out = coerce(vector_from_values([1.0, float("nan")]), ElemType.INT32)
    assert out.tolist() == [1, INT32_NA]


def test_coerce_infinity_maps_to_na_with_diagnostic():
    sink = DiagnosticSink(1)
    out = coerce(vector_from_values([math.inf, -math.inf]), ElemType.INT32, sink=sink)
    assert out.tolist() == [INT32_NA, INT32_NA]
    assert any("infinite" in d.message for d in sink.messages)


def test_coerce_out_of_range_names_element():
    v = vector_from_values([0.0, 2.0**31, 1.0])
    with pytest.raises(RangeError) as exc:
        coerce(v, ElemType.INT32)
    assert exc.value.element_index == 1
    assert "element 1" in str(exc.value)
    # -2^31 collides with the NA sentinel and is out of range too
    with pytest.raises(RangeError):
        coerce(vector_from_values([-(2.0**31)]), ElemType.INT32)


def test_coerce_int32_na_becomes_nan():
    v = TypedVector(np.array([5, INT32_NA], dtype=np.int32))
    out = coerce(v, ElemType.DOUBLE)
    assert out.data[0] == 5.0 and math.isnan(out.data[1])


@given(st.lists(st.integers(-(2**31) + 1, 2**31 - 1), max_size=64))
def test_coerce_widening_roundtrip_property(values):
    v = vector_from_values(values, ElemType.INT32)
    back = coerce(coerce(v, ElemType.DOUBLE), ElemType.INT32)
    assert back.tolist() == values


def test_coerce_rejects_int64_target():
    with pytest.raises(SpecError):
        coerce(vector_from_values([1.0]), ElemType.INT64)


# -- scanning -------------------------------------------------------------------

def test_scan_clean_vector():
    assert scan_missing_infinite(vector_from_values([1.0, 2.0, 3.0])) is None


def test_scan_finds_first_nan():
    assert scan_missing_infinite(vector_from_values([1.0, float("nan"), 3.0])) == 1


def test_scan_finds_int32_sentinel():
    v = TypedVector(np.array([5, INT32_NA], dtype=np.int32))
    assert scan_missing_infinite(v) == 1


def test_scan_finds_infinity():
    assert scan_missing_infinite(vector_from_values([math.inf])) == 0
    assert scan_missing_infinite(vector_from_values([0.0, -math.inf])) == 1


def test_scan_rejects_int64():
    v = TypedVector(np.zeros(2, dtype=np.int64))
    with pytest.raises(SpecError):
        scan_missing_infinite(v)


def test_scan_agrees_with_reference_on_randomized_vectors():
    # 10^5 randomized small vectors against the element-by-element oracle
    rng = np.random.default_rng(42)
    specials = np.array([np.nan, np.inf, -np.inf, 0.0, 1.5, -2.5])
    hits = 0
    for _ in range(100_000):
        n = int(rng.integers(0, 7))
        vals = specials[rng.integers(0, len(specials), n)]
        v = TypedVector(np.array(vals, dtype=np.float64))
        expected = ref_scan(vals.tolist(), ElemType.DOUBLE)
        assert scan_missing_infinite(v) == expected
        hits += expected is not None
    assert hits > 0  # the sample actually exercised violations


def test_scan_agreement_int32_randomized():
    rng = np.random.default_rng(3)
    for _ in range(2_000):
        n = int(rng.integers(0, 9))
        vals = rng.choice([0, 7, -9, INT32_NA], size=n).astype(np.int32)
        v = TypedVector(vals)
        assert scan_missing_infinite(v) == ref_scan(vals.tolist(), ElemType.INT32)


# -- duplication ------------------------------------------------------------------

def test_duplicate_deep_copy():
    v = vector_from_values([1.0, 2.0, 3.0])
    d = duplicate(v)
    assert d.tolist() == [1.0, 2.0, 3.0]
    assert d.data is not v.data
    d.data[0] = 99.0
    assert v.tolist() == [1.0, 2.0, 3.0]
    assert d.ref_status == 0


def test_duplicate_empty():
    d = duplicate(new_vector(ElemType.INT32, 0))
    assert d.length == 0


def test_duplicate_large_bitwise_and_counter():
    rng = np.random.default_rng(11)
    v = TypedVector(rng.standard_normal(2**20))
    counters = InstrumentationCounters()
    d = duplicate(v, counters)
    assert counters.copies == 1
    assert d.data.tobytes() == v.data.tobytes()


@given(st.lists(st.floats(allow_nan=False), max_size=32))
@settings(max_examples=50)
def test_duplicate_bitwise_property(values):
    v = vector_from_values(values)
    d = duplicate(v)
    assert d.data.tobytes() == v.data.tobytes()


# -- construction guards ------------------------------------------------------------

def test_typed_vector_rejects_2d_and_wrong_dtype():
    with pytest.raises(SpecError):
        TypedVector(np.zeros((2, 2)))
    with pytest.raises(SpecError):
        TypedVector(np.zeros(3, dtype=np.float32))
    with pytest.raises(SpecError):
        TypedVector(np.zeros(3), ElemType.INT32)


def test_vector_from_values_host_types_only():
    with pytest.raises(SpecError):
        vector_from_values([1], ElemType.INT64)


def test_new_vector_without_zero_init():
    v = new_vector(ElemType.INT32, 16, zero_init=False)
    assert v.length == 16 and v.elem_type is ElemType.INT32
    assert v.ref_status == 0


# -- missing-value conventions --------------------------------------------------------

def test_is_missing_conventions():
    from dc64.vectors import is_missing
    assert is_missing(INT32_NA, ElemType.INT32)
    assert is_missing(float("nan"), ElemType.DOUBLE)
    assert not is_missing(0, ElemType.INT32)
    # infinities are "infinite", not "missing"
    assert not is_missing(math.inf, ElemType.DOUBLE)
    assert not is_missing(-math.inf, ElemType.DOUBLE)
