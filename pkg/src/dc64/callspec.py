"""Per-argument signature and intent declarations.

A signature names the callee-side element type of one argument
("double", "integer"/"int", or "int64"); an intent names its access
mode ("rw", "r", "w").  Write-only arguments can be passed as a
mode+length descriptor instead of a concrete vector, to be materialized
as a zero-initialized buffer at call time.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import SpecError
from .instrumentation import DiagnosticSink
from .vectors import (DEFAULT_LONG_THRESHOLD, MAX_ELEMENTS, ElemType,
                      TypedVector, new_vector)

MAX_ARGS = 65


class Signature(enum.Enum):
    DOUBLE = "double"
    INT32 = "integer"
    INT64 = "int64"

    def render(self) -> str:
        return self.value

    @property
    def callee_elem_type(self) -> ElemType:
        return _CALLEE_TYPE[self]

    @property
    def host_elem_type(self) -> ElemType:
        """The host-side carrier: int64 arguments travel as doubles."""
        return ElemType.INT32 if self is Signature.INT32 else ElemType.DOUBLE


_CALLEE_TYPE = {
    Signature.DOUBLE: ElemType.DOUBLE,
    Signature.INT32: ElemType.INT32,
    Signature.INT64: ElemType.INT64,
}

_SIGNATURE_NAMES = {
    "double": Signature.DOUBLE,
    "integer": Signature.INT32,
    "int": Signature.INT32,  # alias; both spellings are in the wild
    "int64": Signature.INT64,
}


class Intent(enum.Enum):
    READ_WRITE = "rw"
    READ = "r"
    WRITE = "w"

    def render(self) -> str:
        return self.value


_INTENT_NAMES = {i.value: i for i in Intent}


def parse_signature(items: Sequence[str]) -> tuple[Signature, ...]:
    out = []
    for pos, item in enumerate(items):
        tag = _SIGNATURE_NAMES.get(str(item).strip().lower())
        if tag is None:
            raise SpecError(f"unknown signature {item!r} at position {pos}; "
                            f"accepted: double, integer, int64")
        out.append(tag)
    return tuple(out)


def parse_intent(items: Sequence[str] | None, arg_count: int) -> tuple[Intent, ...]:
    """Absent intents default to read-and-write for every argument."""
    if items is None:
        return (Intent.READ_WRITE,) * arg_count
    out = []
    for pos, item in enumerate(items):
        tag = _INTENT_NAMES.get(str(item).strip().lower())
        if tag is None:
            raise SpecError(f"unknown intent {item!r} at position {pos}; "
                            f"accepted: rw, r, w")
        out.append(tag)
    if len(out) != arg_count:
        raise SpecError(f"{len(out)} intents for {arg_count} arguments")
    return tuple(out)


@dataclass(frozen=True)
class VectorDescriptor:
    """Length+mode placeholder for a write-only argument."""

    mode: ElemType
    length: int

    def __post_init__(self):
        if self.mode not in (ElemType.DOUBLE, ElemType.INT32):
            raise SpecError(f"descriptor mode must be a host type, got {self.mode}")
        if not 0 <= self.length <= MAX_ELEMENTS:
            raise SpecError(f"descriptor length {self.length} outside [0, 2^52]")


CallArgument = Union[TypedVector, VectorDescriptor]


@dataclass(frozen=True)
class CallSpec:
    """A validated invocation request: symbol plus per-argument declarations."""

    symbol: str
    signature: tuple[Signature, ...]
    intents: tuple[Intent, ...]
    naok: bool = False
    library_filter: str | None = None
    verbosity: int = 0
    fortran_convention: bool = False

    def __post_init__(self):
        if not self.symbol:
            raise SpecError("symbol name must be non-empty")
        n = len(self.signature)
        if not 1 <= n <= MAX_ARGS:
            raise SpecError(f"{n} arguments declared; between 1 and {MAX_ARGS} supported")
        if len(self.intents) != n:
            raise SpecError(f"{len(self.intents)} intents for {n} signatures")
        if self.verbosity not in (0, 1, 2):
            raise SpecError(f"verbosity must be 0, 1, or 2, got {self.verbosity!r}")

    @classmethod
    def make(cls, symbol: str, signature: Iterable[str] | str,
             intents: Iterable[str] | str | None = None, *, naok: bool = False,
             library_filter: str | None = None, verbosity: int = 0,
             fortran_convention: bool = False) -> "CallSpec":
        """Parse string declarations; comma-separated strings accepted."""
        if isinstance(signature, str):
            signature = signature.split(",")
        sig = parse_signature(list(signature))
        if isinstance(intents, str):
            intents = intents.split(",")
        its = parse_intent(list(intents) if intents is not None else None, len(sig))
        return cls(symbol=symbol, signature=sig, intents=its, naok=naok,
                   library_filter=library_filter, verbosity=verbosity,
                   fortran_convention=fortran_convention)


def validate(spec: CallSpec, args: Sequence[CallArgument], *,
             long_threshold: int = DEFAULT_LONG_THRESHOLD,
             sink: DiagnosticSink | None = None) -> list[CallArgument]:
    """Check counts and argument kinds; materialize early descriptors.

    Descriptors are permitted under any intent but only avoid work under
    write; elsewhere they are materialized immediately as zero vectors
    with a tuning diagnostic.
    """
    n = len(spec.signature)
    if len(args) > MAX_ARGS:
        raise SpecError(f"{len(args)} arguments; at most {MAX_ARGS} supported")
    if len(args) != n:
        raise SpecError(f"{len(args)} arguments for {n} declared signatures")
    out: list[CallArgument] = []
    for pos, (arg, intent) in enumerate(zip(args, spec.intents)):
        if isinstance(arg, VectorDescriptor):
            if intent is not Intent.WRITE:
                if sink is not None:
                    sink.emit(1, f"descriptor under intent '{intent.value}' is "
                                 f"materialized as a zero vector up front", pos + 1)
                out.append(new_vector(arg.mode, arg.length, zero_init=True,
                                      long_threshold=long_threshold))
            else:
                out.append(arg)
        elif isinstance(arg, TypedVector):
            if arg.elem_type not in (ElemType.DOUBLE, ElemType.INT32):
                raise SpecError(f"argument {pos + 1}: host vectors are double or "
                                f"int32, got {arg.elem_type.value}", arg_index=pos + 1)
            out.append(arg)
        else:
            raise SpecError(f"argument {pos + 1}: expected a vector or descriptor, "
                            f"got {type(arg).__name__}", arg_index=pos + 1)
    return out
