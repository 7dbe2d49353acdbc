"""Typed numeric vectors with a dual-header long-vector layout.

A vector's legacy 32-bit length field holds the actual length while it
fits under the configured threshold (default 2^31 - 1) and the sentinel
-1 otherwise, in which case a 64-bit length is carried alongside.
Lengths are capped at 2^52 elements, the largest count a double can
index exactly.

Host-level vectors are double or 32-bit integer; 64-bit integer vectors
exist only transiently inside marshaling.  Missing values are the
sentinel -2^31 for 32-bit integers and any NaN for doubles; infinities
are "infinite", not "missing".
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, RangeError, SpecError
from .instrumentation import DiagnosticSink, InstrumentationCounters
from .parcast import WorkerConfig, parallel_scan

DEFAULT_LONG_THRESHOLD = 2**31 - 1
MAX_ELEMENTS = 2**52
INT32_NA = -(2**31)
_INT32_MIN_VALID = -(2**31) + 1
_INT32_MAX_VALID = 2**31 - 1


class ElemType(enum.Enum):
    DOUBLE = "double"
    INT32 = "int32"
    INT64 = "int64"

    @property
    def dtype(self) -> np.dtype:
        return _DTYPES[self]

    @property
    def itemsize(self) -> int:
        return self.dtype.itemsize


_DTYPES = {
    ElemType.DOUBLE: np.dtype(np.float64),
    ElemType.INT32: np.dtype(np.int32),
    ElemType.INT64: np.dtype(np.int64),
}
_BY_DTYPE = {v: k for k, v in _DTYPES.items()}


@dataclass(frozen=True)
class VectorHeader:
    """Legacy 32-bit length (or -1) plus the optional 64-bit length."""

    length32: int
    long_length: int | None = None

    @classmethod
    def for_length(cls, length: int, long_threshold: int = DEFAULT_LONG_THRESHOLD) -> "VectorHeader":
        if not 0 < long_threshold <= DEFAULT_LONG_THRESHOLD:
            raise SpecError(f"long threshold must be in [1, 2^31-1], got {long_threshold}")
        if length < 0:
            raise SpecError(f"length must be non-negative, got {length}")
        if length > MAX_ELEMENTS:
            raise CapacityError(f"length {length} exceeds the 2^52 element ceiling")
        if length <= long_threshold:
            return cls(length32=int(length), long_length=None)
        return cls(length32=-1, long_length=int(length))

    @property
    def length(self) -> int:
        if self.length32 == -1 and self.long_length is not None:
            return self.long_length
        return self.length32

    @property
    def is_long(self) -> bool:
        return self.length32 == -1 and self.long_length is not None


class TypedVector:
    """A contiguous numeric buffer plus header and reference status.

    ``ref_status`` models whether any caller-side binding refers to the
    buffer: 0 means fresh/unbound (safe to hand to a callee without
    copying), and it saturates at 2.  Concurrent mutation of one vector
    is not supported; mutating operations need exclusive access.
    """

    __slots__ = ("header", "elem_type", "data", "ref_status")

    def __init__(self, data: np.ndarray, elem_type: ElemType | None = None, *,
                 header: VectorHeader | None = None,
                 long_threshold: int = DEFAULT_LONG_THRESHOLD,
                 ref_status: int = 0):
        data = np.ascontiguousarray(data)
        if data.ndim != 1:
            raise SpecError(f"vectors are 1-D, got {data.ndim}-D data")
        if elem_type is None:
            elem_type = _BY_DTYPE.get(data.dtype)
            if elem_type is None:
                raise SpecError(f"unsupported element dtype {data.dtype}")
        elif data.dtype != elem_type.dtype:
            raise SpecError(f"dtype {data.dtype} does not match {elem_type.value}")
        if header is None:
            header = VectorHeader.for_length(data.shape[0], long_threshold)
        elif header.length != data.shape[0]:
            raise SpecError(f"header length {header.length} != buffer length {data.shape[0]}")
        if ref_status not in (0, 1, 2):
            raise SpecError(f"ref_status must be 0, 1, or 2, got {ref_status}")
        self.data = data
        self.elem_type = elem_type
        self.header = header
        self.ref_status = ref_status

    @property
    def length(self) -> int:
        return self.header.length

    def __len__(self) -> int:
        return self.header.length

    def mark_bound(self) -> "TypedVector":
        """Record one more caller-side binding (saturating at 2)."""
        self.ref_status = min(2, self.ref_status + 1)
        return self

    def tolist(self) -> list:
        return self.data.tolist()

    def __repr__(self) -> str:
        head = np.array2string(self.data[:6], separator=", ")
        more = ", ..." if self.length > 6 else ""
        return (f"TypedVector({self.elem_type.value}, length={self.length}, "
                f"ref_status={self.ref_status}, data={head[:-1]}{more}])")


def new_vector(elem_type: ElemType, length: int, zero_init: bool = True, *,
               long_threshold: int = DEFAULT_LONG_THRESHOLD) -> TypedVector:
    """Allocate a fresh vector (ref_status 0), zeroed unless asked not to."""
    header = VectorHeader.for_length(length, long_threshold)
    try:
        data = (np.zeros if zero_init else np.empty)(length, dtype=elem_type.dtype)
    except MemoryError as exc:
        raise CapacityError(f"cannot allocate {length} x {elem_type.value}: {exc}") from exc
    return TypedVector(data, elem_type, header=header)


def vector_from_values(values: Sequence | Iterable, elem_type: ElemType | None = None, *,
                       long_threshold: int = DEFAULT_LONG_THRESHOLD) -> TypedVector:
    """Build a host vector from Python numbers; doubles unless told otherwise."""
    if elem_type is None:
        elem_type = ElemType.DOUBLE
    if elem_type not in (ElemType.DOUBLE, ElemType.INT32):
        raise SpecError("host vectors are double or int32")
    data = np.asarray(list(values), dtype=elem_type.dtype)
    return TypedVector(data, elem_type, long_threshold=long_threshold)


def header_length(v: TypedVector) -> int:
    """The true 64-bit length, whichever header field stores it."""
    return v.header.length


def duplicate(v: TypedVector, counters: InstrumentationCounters | None = None) -> TypedVector:
    """Deep copy with fresh ref_status 0; bumps the copy ledger."""
    try:
        data = v.data.copy()
    except MemoryError as exc:
        raise CapacityError(f"cannot duplicate {v.length} x {v.elem_type.value}: {exc}") from exc
    if counters is not None:
        counters.copies += 1
    return TypedVector(data, v.elem_type, header=v.header)


def coerce(v: TypedVector, target: ElemType, *, sink: DiagnosticSink | None = None,
           arg_index: int | None = None) -> TypedVector:
    """Convert a host vector to the target host type.

    Int32 -> Double is exact (the NA sentinel becomes NaN).  Double ->
    Int32 truncates toward zero with a tuning diagnostic for inexact
    elements; NaN maps to the NA sentinel, infinities map to NA with a
    diagnostic, and finite values outside the 32-bit range raise
    RangeError naming the element.  Matching types return the input
    unchanged (same identity, no copy).
    """
    if target not in (ElemType.DOUBLE, ElemType.INT32):
        raise SpecError(f"coercion target must be a host type, got {target.value}")
    if v.elem_type == target:
        return v
    if v.elem_type == ElemType.INT32 and target == ElemType.DOUBLE:
        out = v.data.astype(np.float64)
        na = v.data == INT32_NA
        if na.any():
            out[na] = np.nan
        return TypedVector(out, ElemType.DOUBLE, header=v.header)
    if v.elem_type == ElemType.DOUBLE and target == ElemType.INT32:
        return _coerce_double_to_int32(v, sink, arg_index)
    raise SpecError(f"cannot coerce {v.elem_type.value} to {target.value}")


def _coerce_double_to_int32(v: TypedVector, sink: DiagnosticSink | None,
                            arg_index: int | None) -> TypedVector:
    data = v.data
    nan_mask = np.isnan(data)
    inf_mask = np.isinf(data)
    finite = ~(nan_mask | inf_mask)
    out_of_range = finite & ((data < float(_INT32_MIN_VALID)) | (data > float(_INT32_MAX_VALID)))
    if out_of_range.any():
        i = int(np.argmax(out_of_range))
        raise RangeError(
            f"element {i}: value {data[i]!r} outside the 32-bit integer range "
            f"[{_INT32_MIN_VALID}, {_INT32_MAX_VALID}]",
            element_index=i)
    trunc = np.trunc(data)
    out = np.where(finite, trunc, 0.0).astype(np.int32)
    if nan_mask.any():
        out[nan_mask] = INT32_NA
    if inf_mask.any():
        out[inf_mask] = INT32_NA
        if sink is not None and sink.wants(1):
            i = int(np.argmax(inf_mask))
            sink.emit(1, f"{int(inf_mask.sum())} infinite values mapped to the "
                         f"integer NA sentinel (first at element {i})", arg_index)
    if sink is not None and sink.wants(1):
        inexact = finite & (trunc != data)
        if inexact.any():
            i = int(np.argmax(inexact))
            sink.emit(1, f"{int(inexact.sum())} non-integral values truncated "
                         f"toward zero (first at element {i})", arg_index)
    return TypedVector(out, ElemType.INT32, header=v.header)


def _scan_double(chunk: np.ndarray, base: int) -> int | None:
    finite = np.isfinite(chunk)
    if finite.all():
        return None
    return base + int(np.argmin(finite))


def _scan_int32(chunk: np.ndarray, base: int) -> int | None:
    na = chunk == INT32_NA
    if not na.any():
        return None
    return base + int(np.argmax(na))


def scan_missing_infinite(v: TypedVector, cfg: WorkerConfig | None = None) -> int | None:
    """Smallest index holding NA/NaN/Inf, or None.  Pure scan."""
    if v.elem_type == ElemType.DOUBLE:
        scanner = _scan_double
    elif v.elem_type == ElemType.INT32:
        scanner = _scan_int32
    else:
        raise SpecError(f"scan applies to host vectors, got {v.elem_type.value}")
    return parallel_scan(v.data, scanner, cfg or WorkerConfig())


def is_missing(value, elem_type: ElemType) -> bool:
    """Scalar missing-value predicate matching the vector conventions."""
    if elem_type == ElemType.INT32:
        return int(value) == INT32_NA
    if elem_type == ElemType.DOUBLE:
        return math.isnan(value)
    raise SpecError(f"no missing-value convention for {elem_type.value}")
