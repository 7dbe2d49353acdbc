"""Shared-library loading, symbol resolution, and call execution.

The ABI contract is positional by-reference: every argument is passed
as the machine address of element 0 of its handoff buffer, and the
callee returns nothing.  Fortran-compiled entry points are reached by
probing the lowercased name and then the lowercased name with a
trailing underscore.

An Engine owns a load-ordered library registry.  Within one engine,
calls execute one at a time on the caller's thread; distinct engines
may run calls concurrently.  Callee crashes are outside the contract,
as is a callee writing through a read-intent buffer.
"""

from __future__ import annotations

import ctypes
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .callspec import CallArgument, CallSpec, validate
from .errors import EngineError, LoadError, SpecError, SymbolError
from .instrumentation import DiagnosticSink, InstrumentationCounters
from .marshalling import (CallResult, PreparedArg, assemble_result,
                          postprocess_argument, prepare_argument)
from .parcast import WorkerConfig
from .vectors import (DEFAULT_LONG_THRESHOLD, ElemType, TypedVector,
                      new_vector, vector_from_values)

_KNOWN_SUFFIXES = (".so", ".dylib", ".dll")


def platform_dynlib_suffix() -> str:
    if sys.platform == "darwin":
        return ".dylib"
    if sys.platform in ("win32", "cygwin"):
        return ".dll"
    return ".so"


@dataclass(frozen=True)
class ResolvedSymbol:
    """A callable entry taking buffer base addresses and returning nothing."""

    name: str            # the name that actually resolved (e.g. "get_f_")
    func: Callable
    arity: int | None
    library: str

    def __call__(self, *addresses: int) -> None:
        self.func(*addresses)


class LibraryHandle:
    """One loaded shared object; valid until explicitly unloaded."""

    def __init__(self, path: Path, registry_name: str):
        self.path = path
        self.registry_name = registry_name
        try:
            self._cdll = ctypes.CDLL(str(path))
        except OSError as exc:
            raise LoadError(f"cannot load {path}: {exc}") from exc
        self._cache: dict[tuple[str, int | None], Callable] = {}

    def find(self, symbol: str, arity: int | None = None) -> Callable | None:
        key = (symbol, arity)
        func = self._cache.get(key)
        if func is not None:
            return func
        try:
            func = self._cdll[symbol]
        except (AttributeError, KeyError):
            return None
        func.restype = None
        if arity is not None:
            func.argtypes = [ctypes.c_void_p] * arity
        self._cache[key] = func
        return func


class StubLibrary:
    """In-process callees registered like a library; callables receive
    the raw buffer addresses.  Lets the whole pipeline run with no
    compiled fixture present."""

    def __init__(self, registry_name: str, functions: Mapping[str, Callable]):
        self.path = Path(f"<stub:{registry_name}>")
        self.registry_name = registry_name
        self._functions = dict(functions)

    def find(self, symbol: str, arity: int | None = None) -> Callable | None:
        return self._functions.get(symbol)


class Engine:
    """Dynamic call engine: a library registry plus the marshaling pipeline."""

    def __init__(self, *, long_threshold: int = DEFAULT_LONG_THRESHOLD,
                 worker_config: WorkerConfig | None = None):
        if not 0 < long_threshold <= DEFAULT_LONG_THRESHOLD:
            raise SpecError(f"long threshold must be in [1, 2^31-1], got {long_threshold}")
        self.long_threshold = long_threshold
        self.worker_config = worker_config or WorkerConfig()
        self._libraries: list[LibraryHandle | StubLibrary] = []
        self._by_name: dict[str, LibraryHandle | StubLibrary] = {}

    # -- registry ---------------------------------------------------------

    def load_library(self, path, registry_name: str | None = None) -> LibraryHandle:
        """Load a shared object, appending the platform suffix when the
        path has none.  Registry names are unique."""
        p = Path(path)
        if p.suffix not in _KNOWN_SUFFIXES:
            p = p.with_name(p.name + platform_dynlib_suffix())
        if not p.exists():
            raise LoadError(f"no such library: {p}")
        name = registry_name or p.stem
        if name in self._by_name:
            raise LoadError(f"registry name {name!r} already in use "
                            f"(loaded from {self._by_name[name].path})")
        handle = LibraryHandle(p, name)
        self._libraries.append(handle)
        self._by_name[name] = handle
        return handle

    def register_stub_library(self, registry_name: str,
                              functions: Mapping[str, Callable]) -> StubLibrary:
        if registry_name in self._by_name:
            raise LoadError(f"registry name {registry_name!r} already in use")
        stub = StubLibrary(registry_name, functions)
        self._libraries.append(stub)
        self._by_name[registry_name] = stub
        return stub

    def unload_library(self, registry_name: str) -> None:
        """Remove a library from the registry.  Must not race live calls."""
        handle = self._by_name.pop(registry_name, None)
        if handle is None:
            raise LoadError(f"no library registered as {registry_name!r}")
        self._libraries.remove(handle)

    def loaded_libraries(self) -> list[tuple[str, str]]:
        return [(h.registry_name, str(h.path)) for h in self._libraries]

    def library(self, registry_name: str) -> LibraryHandle | StubLibrary:
        handle = self._by_name.get(registry_name)
        if handle is None:
            raise LoadError(f"no library registered as {registry_name!r}")
        return handle

    # -- resolution and invocation ----------------------------------------

    def resolve(self, name: str, library_filter: str | None = None,
                fortran_convention: bool = False,
                arity: int | None = None) -> ResolvedSymbol:
        """Find a symbol, searching one library when filtered, else all
        in load order."""
        if not self._libraries:
            raise SymbolError(f"symbol {name!r}: no libraries loaded")
        if library_filter is not None:
            handle = self._by_name.get(library_filter)
            if handle is None:
                raise SymbolError(f"symbol {name!r}: library {library_filter!r} "
                                  f"is not loaded")
            search: Sequence = (handle,)
        else:
            search = tuple(self._libraries)
        if fortran_convention:
            lowered = name.lower()
            candidates = [lowered, lowered + "_"]
        else:
            candidates = [name]
        for handle in search:
            for cand in candidates:
                func = handle.find(cand, arity)
                if func is not None:
                    return ResolvedSymbol(name=cand, func=func, arity=arity,
                                          library=handle.registry_name)
        searched = ", ".join(h.registry_name for h in search)
        raise SymbolError(f"symbol {name!r} not found (searched: {searched})")

    def invoke(self, sym: ResolvedSymbol, prepared: Sequence[PreparedArg]) -> None:
        """Call the callee on this thread with the handoff base addresses."""
        if sym.arity is not None and sym.arity != len(prepared):
            raise SpecError(f"symbol {sym.name!r} resolved for {sym.arity} "
                            f"arguments, got {len(prepared)}")
        addresses = [p.address() for p in prepared]
        sym.func(*addresses)

    # -- the full pipeline --------------------------------------------------

    def call64(self, spec: CallSpec,
               args: Sequence[CallArgument] | Mapping[str, CallArgument],
               names: Sequence[str | None] | None = None, *,
               workers: int | None = None) -> CallResult:
        """validate -> prepare each -> invoke -> postprocess -> assemble."""
        if isinstance(args, Mapping):
            names = list(args.keys())
            args = list(args.values())
        else:
            args = list(args)
            names = list(names) if names is not None else None
        cfg = WorkerConfig(threads=workers) if workers is not None else self.worker_config
        sink = DiagnosticSink(spec.verbosity)
        counters = InstrumentationCounters()

        normalized = validate(spec, args, long_threshold=self.long_threshold, sink=sink)
        sym = self.resolve(spec.symbol, spec.library_filter,
                           spec.fortran_convention, arity=len(normalized))

        prepared: list[PreparedArg] = []
        for pos, (arg, sig, intent) in enumerate(zip(normalized, spec.signature,
                                                     spec.intents)):
            try:
                prepared.append(prepare_argument(
                    arg, sig, intent, spec.naok, source_index=pos,
                    long_threshold=self.long_threshold, cfg=cfg,
                    counters=counters, sink=sink))
            except EngineError as exc:
                raise exc.at_argument(pos + 1) from None

        self.invoke(sym, prepared)

        outputs: list[TypedVector] = []
        for p, sig, intent in zip(prepared, spec.signature, spec.intents):
            try:
                outputs.append(postprocess_argument(
                    p, sig, intent, long_threshold=self.long_threshold,
                    cfg=cfg, counters=counters, sink=sink))
            except EngineError as exc:
                raise exc.at_argument(p.source_index + 1) from None

        return assemble_result(outputs, names, counters, sink.messages)

    # -- conveniences -------------------------------------------------------

    def vector(self, values, elem_type: ElemType | None = None) -> TypedVector:
        return vector_from_values(values, elem_type, long_threshold=self.long_threshold)

    def zeros(self, elem_type: ElemType, length: int) -> TypedVector:
        return new_vector(elem_type, length, zero_init=True,
                          long_threshold=self.long_threshold)
