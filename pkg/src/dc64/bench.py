"""Benchmark suites over the no-op BENCHMARK callee.

Four suites:

  overhead  length-1 vectors; the full signature x intent {rw, r} x
            NAOK grid, plus plain-reference rows (scan + duplicate +
            direct call, i.e. a fixed-behavior baseline interface)
            recorded under the "overhead-ref" suite label.  int64 has
            no plain-reference rows.
  large     the same grid at a configurable length.
  write     {rw on a fresh zero vector, w on a descriptor} per
            signature, NAOK on; the rw vector is allocated inside the
            timed region, matching how a caller would write results.
  scaling   int64 rw over a thread-count list and length list.

One CSV row per (configuration, replicate) carrying the raw elapsed
nanoseconds; medians and IQRs are for consumers to compute.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .callspec import CallSpec, Intent, Signature, VectorDescriptor
from .dispatch import Engine
from .errors import LoadError, SpecError
from .instrumentation import InstrumentationCounters
from .parcast import WorkerConfig
from .vectors import ElemType, duplicate, new_vector, scan_missing_infinite

CSV_FIELDS = ("suite", "signature", "intent", "naok", "length", "threads",
              "replicate", "elapsed_ns")

BENCH_SYMBOL = "BENCHMARK"

_SIGNATURES = (Signature.DOUBLE, Signature.INT32, Signature.INT64)
_REF_SIGNATURES = (Signature.DOUBLE, Signature.INT32)  # no int64 baseline


@dataclass(frozen=True)
class BenchRecord:
    suite: str
    signature: str
    intent: str
    naok: bool
    length: int
    threads: int
    replicate: int
    elapsed_ns: int

    def row(self) -> list:
        return [self.suite, self.signature, self.intent,
                "true" if self.naok else "false", self.length, self.threads,
                self.replicate, self.elapsed_ns]


def write_csv(records: Iterable[BenchRecord], path) -> None:
    with open(path, "w", newline="") as f:
        _dump(records, f)


def csv_text(records: Iterable[BenchRecord]) -> str:
    buf = io.StringIO()
    _dump(records, buf)
    return buf.getvalue()


def _dump(records: Iterable[BenchRecord], f) -> None:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for rec in records:
        w.writerow(rec.row())


def _input_vector(engine: Engine, sig: Signature, length: int):
    elem = ElemType.INT32 if sig is Signature.INT32 else ElemType.DOUBLE
    v = new_vector(elem, length, zero_init=True,
                   long_threshold=engine.long_threshold)
    return v.mark_bound()  # held by the harness across replicates


def _require_symbol(engine: Engine, library: str | None) -> None:
    try:
        engine.resolve(BENCH_SYMBOL, library_filter=library, arity=1)
    except Exception as exc:
        raise LoadError(f"benchmark fixture unavailable: {exc}") from exc


def _engine_rows(engine: Engine, library: str | None, suite: str, length: int,
                 replicates: int, threads: int, *,
                 intents: Sequence[Intent]) -> list[BenchRecord]:
    records = []
    for sig in _SIGNATURES:
        vec = _input_vector(engine, sig, length)
        for intent in intents:
            for naok in (False, True):
                spec = CallSpec(symbol=BENCH_SYMBOL, signature=(sig,),
                                intents=(intent,), naok=naok,
                                library_filter=library)
                for rep in range(replicates):
                    t0 = time.perf_counter_ns()
                    engine.call64(spec, [vec], workers=threads)
                    dt = time.perf_counter_ns() - t0
                    records.append(BenchRecord(suite, sig.render(), intent.render(),
                                               naok, length, threads, rep, dt))
    return records


def _reference_rows(engine: Engine, library: str | None, suite: str, length: int,
                    replicates: int, threads: int) -> list[BenchRecord]:
    """Baseline rows: resolve + optional scan + unconditional duplicate +
    direct call, the fixed behavior of a plain positional interface."""
    cfg = WorkerConfig(threads=threads)
    counters = InstrumentationCounters()
    records = []
    for sig in _REF_SIGNATURES:
        vec = _input_vector(engine, sig, length)
        for naok in (False, True):
            for rep in range(replicates):
                t0 = time.perf_counter_ns()
                sym = engine.resolve(BENCH_SYMBOL, library_filter=library, arity=1)
                if not naok:
                    scan_missing_infinite(vec, cfg)
                dup = duplicate(vec, counters)
                sym.func(dup.data.ctypes.data if dup.data.size else
                         _scratch(dup.elem_type))
                dt = time.perf_counter_ns() - t0
                records.append(BenchRecord(f"{suite}-ref", sig.render(), "rw",
                                           naok, length, threads, rep, dt))
    return records


_SCRATCHES = {}


def _scratch(elem: ElemType) -> int:
    arr = _SCRATCHES.get(elem)
    if arr is None:
        arr = np.zeros(1, dtype=elem.dtype)
        _SCRATCHES[elem] = arr
    return arr.ctypes.data


def run_overhead(engine: Engine, library: str | None = None, *,
                 length: int = 1, replicates: int = 10_000,
                 threads: int | None = None) -> list[BenchRecord]:
    _require_symbol(engine, library)
    t = threads or engine.worker_config.resolve_threads()
    rows = _engine_rows(engine, library, "overhead", length, replicates, t,
                        intents=(Intent.READ_WRITE, Intent.READ))
    rows += _reference_rows(engine, library, "overhead", length, replicates, t)
    return rows


def run_large(engine: Engine, library: str | None = None, *,
              length: int = 2**24, replicates: int = 100,
              threads: int | None = None) -> list[BenchRecord]:
    _require_symbol(engine, library)
    t = threads or engine.worker_config.resolve_threads()
    rows = _engine_rows(engine, library, "large", length, replicates, t,
                        intents=(Intent.READ_WRITE, Intent.READ))
    rows += _reference_rows(engine, library, "large", length, replicates, t)
    return rows


def run_write(engine: Engine, library: str | None = None, *,
              length: int = 2**24, replicates: int = 100,
              threads: int | None = None) -> list[BenchRecord]:
    """Write-result timing: zero-initialized vectors passed rw versus
    write-only descriptors."""
    _require_symbol(engine, library)
    t = threads or engine.worker_config.resolve_threads()
    records = []
    for sig in _SIGNATURES:
        elem = ElemType.INT32 if sig is Signature.INT32 else ElemType.DOUBLE
        for intent in (Intent.READ_WRITE, Intent.WRITE):
            spec = CallSpec(symbol=BENCH_SYMBOL, signature=(sig,),
                            intents=(intent,), naok=True, library_filter=library)
            for rep in range(replicates):
                if intent is Intent.WRITE:
                    arg = VectorDescriptor(elem, length)
                    t0 = time.perf_counter_ns()
                    engine.call64(spec, [arg], workers=t)
                    dt = time.perf_counter_ns() - t0
                else:
                    # allocation of the result carrier is part of the cost
                    t0 = time.perf_counter_ns()
                    vec = new_vector(elem, length, zero_init=True,
                                     long_threshold=engine.long_threshold)
                    engine.call64(spec, [vec], workers=t)
                    dt = time.perf_counter_ns() - t0
                records.append(BenchRecord("write", sig.render(), intent.render(),
                                           True, length, t, rep, dt))
    return records


def run_scaling(engine: Engine, library: str | None = None, *,
                lengths: Sequence[int] = (2**16, 2**22),
                threads: Sequence[int] = (1, 2, 4),
                replicates: int = 5) -> list[BenchRecord]:
    """int64 rw casting cost over the thread grid."""
    _require_symbol(engine, library)
    records = []
    spec = CallSpec(symbol=BENCH_SYMBOL, signature=(Signature.INT64,),
                    intents=(Intent.READ_WRITE,), naok=True,
                    library_filter=library)
    for length in lengths:
        vec = _input_vector(engine, Signature.INT64, length)
        for t in threads:
            for rep in range(replicates):
                t0 = time.perf_counter_ns()
                engine.call64(spec, [vec], workers=t)
                dt = time.perf_counter_ns() - t0
                records.append(BenchRecord("scaling", Signature.INT64.render(),
                                           Intent.READ_WRITE.render(), True,
                                           length, t, rep, dt))
    return records


SUITES = {
    "overhead": run_overhead,
    "large": run_large,
    "write": run_write,
    "scaling": run_scaling,
}


def run_suite(name: str, engine: Engine, library: str | None = None,
              **kwargs) -> list[BenchRecord]:
    try:
        fn = SUITES[name]
    except KeyError:
        raise SpecError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return fn(engine, library, **kwargs)
