"""dc64: a dynamic call engine for C/Fortran-convention shared-library
functions with declared per-argument signatures and intents, 64-bit
long-vector support, double<->int64 casting, and copy avoidance."""

from .callspec import (CallSpec, Intent, Signature, VectorDescriptor,
                       parse_intent, parse_signature, validate)
from .dispatch import Engine, LibraryHandle, ResolvedSymbol, StubLibrary
from .errors import (CapacityError, CastError, EngineError, LoadError,
                     MissingValueError, RangeError, SpecError, SymbolError)
from .instrumentation import Diagnostic, DiagnosticSink, InstrumentationCounters
from .marshalling import (CallResult, Origin, PreparedArg, assemble_result,
                          cast_double_to_int64, cast_int64_to_double,
                          postprocess_argument, prepare_argument)
from .parcast import (WorkerConfig, effective_thread_count, elementwise,
                      parallel_map, parallel_scan, reset_thread_count,
                      set_thread_count, spawn_count)
from .vectors import (DEFAULT_LONG_THRESHOLD, INT32_NA, MAX_ELEMENTS, ElemType,
                      TypedVector, VectorHeader, coerce, duplicate,
                      header_length, new_vector, scan_missing_infinite,
                      vector_from_values)

__version__ = "0.1.0"

__all__ = [
    "CallSpec", "Intent", "Signature", "VectorDescriptor", "parse_intent",
    "parse_signature", "validate",
    "Engine", "LibraryHandle", "ResolvedSymbol", "StubLibrary",
    "CapacityError", "CastError", "EngineError", "LoadError",
    "MissingValueError", "RangeError", "SpecError", "SymbolError",
    "Diagnostic", "DiagnosticSink", "InstrumentationCounters",
    "CallResult", "Origin", "PreparedArg", "assemble_result",
    "cast_double_to_int64", "cast_int64_to_double", "postprocess_argument",
    "prepare_argument",
    "WorkerConfig", "effective_thread_count", "elementwise", "parallel_map",
    "parallel_scan", "reset_thread_count", "set_thread_count", "spawn_count",
    "DEFAULT_LONG_THRESHOLD", "INT32_NA", "MAX_ELEMENTS", "ElemType",
    "TypedVector", "VectorHeader", "coerce", "duplicate", "header_length",
    "new_vector", "scan_missing_infinite", "vector_from_values",
    "__version__",
]
