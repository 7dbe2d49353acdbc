"""DC64 vector file format.

Layout: magic "DC64", format version u8 = 1, element-type tag u8
(0 = double, 1 = int32), length u64 little-endian, then raw
little-endian element data (IEEE-754 binary64 or two's-complement
32-bit).  No padding; the header is exactly 14 bytes.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

from .errors import SpecError
from .vectors import DEFAULT_LONG_THRESHOLD, ElemType, TypedVector, MAX_ELEMENTS

MAGIC = b"DC64"
VERSION = 1
_HEADER = struct.Struct("<4sBBQ")

_TAGS = {ElemType.DOUBLE: 0, ElemType.INT32: 1}
_BY_TAG = {v: k for k, v in _TAGS.items()}
_WIRE_DTYPES = {ElemType.DOUBLE: np.dtype("<f8"), ElemType.INT32: np.dtype("<i4")}


def write_vector(path: str | os.PathLike, v: TypedVector) -> None:
    if v.elem_type not in _TAGS:
        raise SpecError(f"{v.elem_type.value} vectors are not storable")
    wire = v.data.astype(_WIRE_DTYPES[v.elem_type], copy=False)
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, _TAGS[v.elem_type], v.length))
        f.write(wire.tobytes())


def read_vector(path: str | os.PathLike, *,
                long_threshold: int = DEFAULT_LONG_THRESHOLD) -> TypedVector:
    path = Path(path)
    size = path.stat().st_size
    with open(path, "rb") as f:
        head = f.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise SpecError(f"{path}: truncated header")
        magic, version, tag, length = _HEADER.unpack(head)
        if magic != MAGIC:
            raise SpecError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        if version != VERSION:
            raise SpecError(f"{path}: unsupported format version {version}")
        if tag not in _BY_TAG:
            raise SpecError(f"{path}: unknown element-type tag {tag}")
        if length > MAX_ELEMENTS:
            raise SpecError(f"{path}: length {length} exceeds the 2^52 ceiling")
        elem_type = _BY_TAG[tag]
        expected = _HEADER.size + length * elem_type.itemsize
        if size != expected:
            raise SpecError(f"{path}: size {size} != expected {expected} "
                            f"for {length} x {elem_type.value}")
        data = np.fromfile(f, dtype=_WIRE_DTYPES[elem_type], count=length)
    if data.shape[0] != length:
        raise SpecError(f"{path}: short read ({data.shape[0]} of {length} elements)")
    return TypedVector(data.astype(elem_type.dtype, copy=False), elem_type,
                       long_threshold=long_threshold)
