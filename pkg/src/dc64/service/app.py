"""HTTP service wrapping one Engine instance.

The registry is process state: load a library once, call its symbols
from any number of clients.  Calls are serialized with a lock to honor
the one-call-at-a-time engine contract.
"""

from __future__ import annotations

import threading
import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import __version__, bench, elfsyms, parcast, vecfile
from ..callspec import CallSpec, VectorDescriptor
from ..dispatch import Engine
from ..errors import (EngineError, LoadError, SpecError, SymbolError)
from ..marshalling import CallResult
from ..vectors import DEFAULT_LONG_THRESHOLD, ElemType, vector_from_values
from .models import (ArgumentSpec, BenchRequest, CallRequest, CallResponse,
                     CountersPayload, DiagnosticPayload, ErrorPayload,
                     HealthResponse, LibraryInfo, LibraryLoadRequest,
                     ResolveRequest, ResolveResponse, SymbolListResponse,
                     ThreadConfig, VectorPayload)

_STATUS = {SpecError: 400, LoadError: 400, SymbolError: 404}


def create_app(engine: Engine | None = None, *,
               long_threshold: int = DEFAULT_LONG_THRESHOLD) -> FastAPI:
    engine = engine or Engine(long_threshold=long_threshold)
    app = FastAPI(title="dc64 call service", version=__version__)
    app.state.engine = engine
    app.state.lock = threading.Lock()

    @app.exception_handler(EngineError)
    async def engine_error(request: Request, exc: EngineError):
        status = _STATUS.get(type(exc), 422)
        payload = ErrorPayload(error=str(exc), kind=type(exc).__name__)
        return JSONResponse(status_code=status, content=payload.model_dump())

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(version=__version__)

    @app.post("/libraries", response_model=LibraryInfo)
    def load_library(req: LibraryLoadRequest):
        with app.state.lock:
            name = req.name or Path(req.path).stem
            existing = dict(engine.loaded_libraries())
            if name in existing:
                # idempotent re-load of the same file; conflicting paths fail
                handle = engine.library(name)
                resolved = _resolve_lib_path(req.path)
                if resolved is not None and Path(handle.path) == resolved:
                    return LibraryInfo(name=name, path=str(handle.path))
                raise LoadError(f"registry name {name!r} already in use "
                                f"(loaded from {handle.path})")
            handle = engine.load_library(req.path, registry_name=req.name)
            return LibraryInfo(name=handle.registry_name, path=str(handle.path))

    @app.get("/libraries", response_model=list[LibraryInfo])
    def list_libraries():
        return [LibraryInfo(name=n, path=p) for n, p in engine.loaded_libraries()]

    @app.delete("/libraries/{name}")
    def unload_library(name: str):
        with app.state.lock:
            engine.unload_library(name)
        return {"unloaded": name}

    @app.get("/libraries/{name}/symbols", response_model=SymbolListResponse)
    def list_symbols(name: str):
        handle = engine.library(name)
        path = Path(handle.path)
        if not path.exists():
            raise LoadError(f"{path} is not inspectable")
        return SymbolListResponse(library=name, path=str(path),
                                  symbols=elfsyms.exported_functions(path))

    @app.post("/resolve", response_model=ResolveResponse)
    def resolve(req: ResolveRequest):
        sym = engine.resolve(req.symbol, library_filter=req.library,
                             fortran_convention=req.fortran)
        return ResolveResponse(symbol=req.symbol, resolved_name=sym.name,
                               library=sym.library)

    @app.post("/calls", response_model=CallResponse)
    def call(req: CallRequest):
        with app.state.lock:
            lib_name = _ensure_loaded(engine, req.library)
            spec = CallSpec.make(req.symbol, req.signature, req.intents,
                                 naok=req.naok,
                                 library_filter=req.package or lib_name,
                                 verbosity=req.verbose,
                                 fortran_convention=req.fortran)
            args, names = _build_arguments(engine, req.args)
            t0 = time.perf_counter_ns()
            result = engine.call64(spec, args, names, workers=req.threads)
            elapsed = time.perf_counter_ns() - t0
            return _call_response(result, names, elapsed, req)

    @app.post("/bench")
    def run_bench(req: BenchRequest):
        with app.state.lock:
            lib_name = _ensure_loaded(engine, req.library)
            kwargs = {}
            if req.replicates is not None:
                kwargs["replicates"] = req.replicates
            if req.suite == "scaling":
                if req.lengths:
                    kwargs["lengths"] = req.lengths
                elif req.length:
                    kwargs["lengths"] = [req.length]
                if req.threads:
                    kwargs["threads"] = req.threads
            else:
                if req.length is not None:
                    kwargs["length"] = req.length
                if req.threads:
                    kwargs["threads"] = req.threads[0]
            records = bench.run_suite(req.suite, engine, lib_name, **kwargs)
            return PlainTextResponse(bench.csv_text(records), media_type="text/csv")

    @app.get("/threads", response_model=ThreadConfig)
    def get_threads():
        return ThreadConfig(threads=parcast.effective_thread_count())

    @app.put("/threads", response_model=ThreadConfig)
    def set_threads(cfg: ThreadConfig):
        parcast.set_thread_count(cfg.threads)
        return ThreadConfig(threads=parcast.effective_thread_count())

    return app


def _resolve_lib_path(path: str) -> Path | None:
    from ..dispatch import _KNOWN_SUFFIXES, platform_dynlib_suffix
    p = Path(path)
    if p.suffix not in _KNOWN_SUFFIXES:
        p = p.with_name(p.name + platform_dynlib_suffix())
    return p if p.exists() else None


def _ensure_loaded(engine: Engine, library: str) -> str:
    """Accept a registered name or a path to load on first use."""
    loaded = dict(engine.loaded_libraries())
    if library in loaded:
        return library
    resolved = _resolve_lib_path(library)
    if resolved is not None:
        for name, path in loaded.items():
            if Path(path) == resolved:
                return name
        return engine.load_library(library).registry_name
    if Path(library).stem in loaded:
        return Path(library).stem
    raise LoadError(f"no such library: {library}")


def _build_arguments(engine: Engine, specs: list[ArgumentSpec]):
    args = []
    names = []
    for pos, spec in enumerate(specs):
        names.append(spec.name or f"arg{pos + 1}")
        if spec.zeros is not None:
            mode = ElemType.DOUBLE if spec.zeros.mode == "double" else ElemType.INT32
            args.append(VectorDescriptor(mode, spec.zeros.length))
        elif spec.path is not None:
            args.append(vecfile.read_vector(spec.path,
                                            long_threshold=engine.long_threshold))
        else:
            elem = (ElemType.INT32 if spec.elem_type == "integer"
                    else ElemType.DOUBLE)
            args.append(engine.vector(spec.values, elem))
    return args, names


def _call_response(result: CallResult, names: list[str], elapsed_ns: int,
                   req: CallRequest) -> CallResponse:
    out_dir = Path(req.out_dir) if req.out_dir else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for name, vec in zip(names, result.outputs):
        file_path = None
        if out_dir is not None:
            file_path = str(out_dir / f"{name}.dc64")
            vecfile.write_vector(file_path, vec)
        values = vec.tolist() if vec.length <= req.max_inline else None
        outputs.append(VectorPayload(name=name, elem_type=vec.elem_type.value,
                                     length=vec.length,
                                     length32=vec.header.length32,
                                     values=values, file=file_path))
    counters = CountersPayload(**result.counters.as_dict())
    diags = [DiagnosticPayload(level=d.level, argument=d.arg_index,
                               message=d.message) for d in result.diagnostics]
    return CallResponse(outputs=outputs, counters=counters, diagnostics=diags,
                        elapsed_ns=elapsed_ns)
