"""Pre-call and post-call argument processing.

Per argument: optional missing/infinite scan, host coercion to the
declared signature, double<->int64 casting, and duplication exactly
where the intent requires it:

  * int64 signature, intent rw/r: cast double -> int64 into a fresh
    buffer (no extra duplicate; the cast already allocates).
  * int64 signature, intent rw/w: back-cast int64 -> double after the
    call.  Read-only int64 arguments are never back-cast.
  * other signatures: rw duplicates in any case, r hands the caller's
    buffer over untouched, w duplicates only when ref_status != 0.
  * write-only descriptors materialize as zero-initialized buffers in
    the callee's type (int64 allocated directly, skipping one cast).

Every buffer decision is tallied in InstrumentationCounters so copy
avoidance is observable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .callspec import CallArgument, Intent, Signature, VectorDescriptor
from .errors import CastError, MissingValueError, SpecError
from .instrumentation import Diagnostic, DiagnosticSink, InstrumentationCounters
from .parcast import ChunkOutcome, WorkerConfig, parallel_map
from .vectors import (DEFAULT_LONG_THRESHOLD, ElemType, TypedVector, coerce,
                      duplicate, new_vector, scan_missing_infinite)

_TWO_52 = float(2**52)
_INT64_LO = -(2.0**63)   # exactly representable; valid
_INT64_HI = 2.0**63      # not a valid int64; exclusive bound


class Origin(enum.Enum):
    BORROWED = "borrowed"
    DUPLICATED = "duplicated"
    CASTED = "casted"
    FRESH_ZERO = "fresh_zero"


@dataclass
class PreparedArg:
    """One argument ready for handoff to the callee."""

    handoff: TypedVector          # buffer the callee accesses in place
    origin: Origin
    needs_backcast: bool
    source_index: int             # 0-based argument position
    source: TypedVector | None    # the caller's vector, None for descriptors
    _scratch: np.ndarray | None = field(default=None, repr=False)

    def address(self) -> int:
        """Base address of element 0; zero-length buffers hand out a live
        one-element scratch so every passed address is valid."""
        if self.handoff.data.size == 0:
            if self._scratch is None:
                self._scratch = np.zeros(1, dtype=self.handoff.elem_type.dtype)
            return self._scratch.ctypes.data
        return self.handoff.data.ctypes.data


def _d2i_kernel(check_inexact: bool):
    def kernel(src: np.ndarray, dst: np.ndarray, base: int) -> ChunkOutcome:
        out = ChunkOutcome()
        finite = np.isfinite(src)
        if not finite.all():
            i = int(np.argmin(finite))
            out.error_index = base + i
            out.error = CastError(
                f"element {base + i}: non-finite value {src[i]!r} has no int64 image",
                element_index=base + i)
            return out
        bad = (src < _INT64_LO) | (src >= _INT64_HI)
        if bad.any():
            i = int(np.argmax(bad))
            out.error_index = base + i
            out.error = CastError(
                f"element {base + i}: value {src[i]!r} outside [-2^63, 2^63)",
                element_index=base + i)
            return out
        if check_inexact:
            trunc = np.trunc(src)
            inexact = trunc != src
            if inexact.any():
                out.inexact_count = int(inexact.sum())
                out.first_inexact = base + int(np.argmax(inexact))
            np.copyto(dst, trunc, casting="unsafe")
        else:
            # float -> int64 truncates toward zero; range checked above
            np.copyto(dst, src, casting="unsafe")
        return out

    return kernel


def _i2d_kernel(check_inexact: bool):
    def kernel(src: np.ndarray, dst: np.ndarray, base: int) -> ChunkOutcome:
        out = ChunkOutcome()
        np.copyto(dst, src, casting="unsafe")  # rounds to nearest even
        if check_inexact:
            big = (src > 2**52) | (src < -(2**52))
            if big.any():
                conv = dst[big]
                vals = src[big]
                lost = np.empty(vals.shape, dtype=bool)
                over = conv >= _INT64_HI
                lost[over] = True
                ok = ~over
                lost[ok] = conv[ok].astype(np.int64) != vals[ok]
                if lost.any():
                    idx = np.flatnonzero(big)[lost]
                    out.inexact_count = int(lost.sum())
                    out.first_inexact = base + int(idx[0])
        return out

    return kernel


def cast_double_to_int64(src: np.ndarray, cfg: WorkerConfig | None = None, *,
                         sink: DiagnosticSink | None = None,
                         arg_index: int | None = None) -> np.ndarray:
    """Cast a double buffer to int64, truncating non-integral values
    toward zero (with a tuning diagnostic).  Non-finite or out-of-range
    elements raise CastError naming the element; the smallest failing
    index wins regardless of worker count.
    """
    cfg = cfg or WorkerConfig()
    check = sink is not None and sink.wants(1)
    dst, outcome = parallel_map(src, _d2i_kernel(check), cfg, np.int64)
    if check and outcome.inexact_count:
        sink.emit(1, f"{outcome.inexact_count} non-integral values truncated toward "
                     f"zero in the int64 cast (first at element {outcome.first_inexact})",
                  arg_index)
    return dst


def cast_int64_to_double(src: np.ndarray, cfg: WorkerConfig | None = None, *,
                         sink: DiagnosticSink | None = None,
                         arg_index: int | None = None) -> np.ndarray:
    """Back-cast an int64 buffer to double.  Magnitudes beyond 2^52 may
    round to nearest even; actual precision loss emits a tuning
    diagnostic.  Never errors.
    """
    cfg = cfg or WorkerConfig()
    check = sink is not None and sink.wants(1)
    dst, outcome = parallel_map(src, _i2d_kernel(check), cfg, np.float64)
    if check and outcome.inexact_count:
        sink.emit(1, f"{outcome.inexact_count} values beyond 2^52 lost precision in "
                     f"the double back-cast (first at element {outcome.first_inexact})",
                  arg_index)
    return dst


def prepare_argument(arg: CallArgument, sig: Signature, intent: Intent, naok: bool, *,
                     source_index: int = 0,
                     long_threshold: int = DEFAULT_LONG_THRESHOLD,
                     cfg: WorkerConfig | None = None,
                     counters: InstrumentationCounters | None = None,
                     sink: DiagnosticSink | None = None) -> PreparedArg:
    """Build the handoff buffer for one argument per its declarations."""
    cfg = cfg or WorkerConfig()
    counters = counters if counters is not None else InstrumentationCounters()
    pos = source_index + 1

    if isinstance(arg, VectorDescriptor):
        # validate() has already materialized descriptors under rw/r
        if intent is not Intent.WRITE:
            raise SpecError(
                f"argument {pos}: descriptor under intent '{intent.value}' must be "
                f"materialized before preparation", arg_index=pos)
        if sink is not None and arg.mode != sig.host_elem_type:
            sink.emit(1, f"descriptor mode '{arg.mode.value}' overridden by "
                         f"signature '{sig.render()}'", pos)
        # fresh zeros cannot contain missing values; no scan needed
        handoff = new_vector(sig.callee_elem_type, arg.length, zero_init=True,
                             long_threshold=long_threshold)
        return PreparedArg(handoff, Origin.FRESH_ZERO,
                           needs_backcast=sig is Signature.INT64,
                           source_index=source_index, source=None)

    v: TypedVector = arg
    if not naok:
        counters.scans += 1
        hit = scan_missing_infinite(v, cfg)
        if hit is not None:
            raise MissingValueError(
                f"argument {pos}: missing or infinite value at element {hit}",
                arg_index=pos, element_index=hit)

    if sig is Signature.INT64:
        if intent is Intent.WRITE:
            # contents are irrelevant under write; allocate the callee's
            # type directly instead of casting
            handoff = new_vector(ElemType.INT64, v.length, zero_init=True,
                                 long_threshold=long_threshold)
            return PreparedArg(handoff, Origin.FRESH_ZERO, needs_backcast=True,
                               source_index=source_index, source=v)
        carrier = coerce(v, ElemType.DOUBLE, sink=sink, arg_index=pos)
        buf = cast_double_to_int64(carrier.data, cfg, sink=sink, arg_index=pos)
        counters.casts += 1
        handoff = TypedVector(buf, ElemType.INT64, long_threshold=long_threshold)
        return PreparedArg(handoff, Origin.CASTED,
                           needs_backcast=intent is Intent.READ_WRITE,
                           source_index=source_index, source=v)

    host = coerce(v, sig.host_elem_type, sink=sink, arg_index=pos)
    if intent is Intent.READ_WRITE:
        handoff = duplicate(host, counters)
        return PreparedArg(handoff, Origin.DUPLICATED, needs_backcast=False,
                           source_index=source_index, source=v)
    if intent is Intent.READ:
        return PreparedArg(host, Origin.BORROWED, needs_backcast=False,
                           source_index=source_index, source=v)
    # write intent on a concrete vector: copy only if someone else holds it
    if host.ref_status != 0:
        handoff = duplicate(host, counters)
        return PreparedArg(handoff, Origin.DUPLICATED, needs_backcast=False,
                           source_index=source_index, source=v)
    return PreparedArg(host, Origin.BORROWED, needs_backcast=False,
                       source_index=source_index, source=v)


def postprocess_argument(p: PreparedArg, sig: Signature, intent: Intent, *,
                         long_threshold: int = DEFAULT_LONG_THRESHOLD,
                         cfg: WorkerConfig | None = None,
                         counters: InstrumentationCounters | None = None,
                         sink: DiagnosticSink | None = None) -> TypedVector:
    """Turn a returned handoff buffer into the result vector."""
    cfg = cfg or WorkerConfig()
    counters = counters if counters is not None else InstrumentationCounters()
    if sig is Signature.INT64:
        if not p.needs_backcast:
            # read-only: caller's vector comes back untouched
            return p.source if p.source is not None else p.handoff
        buf = cast_int64_to_double(p.handoff.data, cfg, sink=sink,
                                   arg_index=p.source_index + 1)
        counters.backcasts += 1
        return TypedVector(buf, ElemType.DOUBLE, long_threshold=long_threshold)
    return p.handoff


@dataclass
class CallResult:
    """The post-call collection of output vectors plus bookkeeping.

    Addressable by 0-based position or by caller-supplied name.
    """

    outputs: list[TypedVector]
    names: list[str | None]
    counters: InstrumentationCounters
    diagnostics: list[Diagnostic]

    def __getitem__(self, key: int | str) -> TypedVector:
        if isinstance(key, str):
            try:
                return self.outputs[self.names.index(key)]
            except ValueError:
                raise KeyError(key) from None
        return self.outputs[key]

    def __len__(self) -> int:
        return len(self.outputs)

    def __contains__(self, name: str) -> bool:
        return name in self.names


def assemble_result(outputs: list[TypedVector], names: list[str | None] | None,
                    counters: InstrumentationCounters,
                    diagnostics: list[Diagnostic]) -> CallResult:
    if names is None:
        names = [None] * len(outputs)
    else:
        names = (list(names) + [None] * len(outputs))[:len(outputs)]
    return CallResult(outputs=list(outputs), names=names,
                      counters=counters, diagnostics=list(diagnostics))
