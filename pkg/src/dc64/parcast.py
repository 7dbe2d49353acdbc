"""Chunked, order-preserving parallel element transforms.

Work is split statically into ``threads`` contiguous ranges, so the
output of a pure per-element transform is bitwise identical for every
thread count.  Thread count defaults to the ``DOTCALL64_THREADS``
environment variable, else hardware parallelism; an explicit
:func:`set_thread_count` overrides both.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EngineError, SpecError

ENV_THREADS = "DOTCALL64_THREADS"

_explicit_thread_count: int | None = None
_spawn_count = 0  # worker threads started since process start


def set_thread_count(n: int) -> None:
    """Pin the number of worker threads for subsequent transforms."""
    global _explicit_thread_count
    if not isinstance(n, int) or n < 1:
        raise SpecError(f"thread count must be a positive integer, got {n!r}")
    _explicit_thread_count = n


def reset_thread_count() -> None:
    """Drop an explicit pin; fall back to env var / hardware count."""
    global _explicit_thread_count
    _explicit_thread_count = None


def effective_thread_count() -> int:
    if _explicit_thread_count is not None:
        return _explicit_thread_count
    env = os.environ.get(ENV_THREADS)
    if env is not None:
        try:
            n = int(env)
        except ValueError:
            n = 0
        if n >= 1:
            return n
    return os.cpu_count() or 1


def spawn_count() -> int:
    """Total worker threads spawned; lets tests assert the serial path."""
    return _spawn_count


@dataclass(frozen=True)
class WorkerConfig:
    """threads=None resolves to the effective count at call time."""

    threads: int | None = None
    min_chunk: int = 1 << 16

    def __post_init__(self):
        if self.threads is not None and self.threads < 1:
            raise SpecError(f"threads must be >= 1, got {self.threads}")
        if self.min_chunk < 1:
            raise SpecError(f"min_chunk must be >= 1, got {self.min_chunk}")

    def resolve_threads(self) -> int:
        return self.threads if self.threads is not None else effective_thread_count()


@dataclass
class ChunkOutcome:
    """What one chunk reports back: the first failing element (as an
    exception to raise) and/or a count of inexact elements."""

    error_index: int | None = None
    error: Exception | None = None
    inexact_count: int = 0
    first_inexact: int | None = None


# A kernel maps src[lo:hi] into dst[lo:hi]; ``base`` is the absolute
# index of the chunk's first element.
ChunkKernel = Callable[[np.ndarray, np.ndarray, int], ChunkOutcome]
# A scanner returns the absolute index of the first violation in its
# chunk, or None.
ChunkScanner = Callable[[np.ndarray, int], "int | None"]


def elementwise(fn: Callable) -> ChunkKernel:
    """Wrap a scalar function as a chunk kernel (test/utility path; the
    production casts use vectorized kernels)."""

    def kernel(src: np.ndarray, dst: np.ndarray, base: int) -> ChunkOutcome:
        out = ChunkOutcome()
        for i in range(len(src)):
            try:
                dst[i] = fn(src[i])
            except Exception as exc:  # first error in this chunk wins
                if isinstance(exc, EngineError):
                    err = exc
                    if err.element_index is None:
                        err.element_index = base + i
                else:
                    err = EngineError(f"element {base + i}: {exc}",
                                      element_index=base + i)
                out.error_index = base + i
                out.error = err
                return out
        return out

    return kernel


def _chunk_bounds(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n))
    step, extra = divmod(n, parts)
    bounds = []
    lo = 0
    for i in range(parts):
        hi = lo + step + (1 if i < extra else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def _run_chunks(n: int, cfg: WorkerConfig, work: Callable[[int, int, int], None]) -> None:
    """Run work(lo, hi, slot_index) over static chunks; chunk 0 runs on
    the calling thread."""
    global _spawn_count
    threads = cfg.resolve_threads()
    if n == 0:
        return
    if threads == 1 or n < cfg.min_chunk:
        work(0, n, 0)
        return
    bounds = _chunk_bounds(n, threads)
    workers = []
    for slot, (lo, hi) in enumerate(bounds[1:], start=1):
        t = threading.Thread(target=work, args=(lo, hi, slot), daemon=True)
        _spawn_count += 1
        t.start()
        workers.append(t)
    work(bounds[0][0], bounds[0][1], 0)
    for t in workers:
        t.join()


def parallel_map(src: np.ndarray, kernel: ChunkKernel, cfg: WorkerConfig,
                 out_dtype) -> tuple[np.ndarray, ChunkOutcome]:
    """Apply a pure per-element kernel; dst[i] == transform(src[i]).

    Output is independent of thread count and chunking.  If any element
    fails, the error with the smallest element index is raised.
    Returns the output buffer and the merged inexactness report.
    """
    n = len(src)
    dst = np.empty(n, dtype=out_dtype)
    outcomes: list[ChunkOutcome | None] = [None] * max(1, cfg.resolve_threads())
    failures: list[BaseException | None] = [None] * len(outcomes)

    def work(lo: int, hi: int, slot: int) -> None:
        try:
            outcomes[slot] = kernel(src[lo:hi], dst[lo:hi], lo)
        except BaseException as exc:  # kernel bug; surfaced after join
            failures[slot] = exc

    _run_chunks(n, cfg, work)

    for exc in failures:
        if exc is not None:
            raise exc
    merged = ChunkOutcome()
    for out in outcomes:
        if out is None:
            continue
        if out.error is not None and (merged.error_index is None
                                      or out.error_index < merged.error_index):
            merged.error_index = out.error_index
            merged.error = out.error
        merged.inexact_count += out.inexact_count
        if out.first_inexact is not None and (merged.first_inexact is None
                                              or out.first_inexact < merged.first_inexact):
            merged.first_inexact = out.first_inexact
    if merged.error is not None:
        raise merged.error
    return dst, merged


def parallel_scan(src: np.ndarray, scanner: ChunkScanner, cfg: WorkerConfig) -> int | None:
    """Return the smallest absolute index flagged by the scanner, or None."""
    n = len(src)
    if n == 0:
        return None
    hits: list[int | None] = [None] * max(1, cfg.resolve_threads())
    failures: list[BaseException | None] = [None] * len(hits)

    def work(lo: int, hi: int, slot: int) -> None:
        try:
            hits[slot] = scanner(src[lo:hi], lo)
        except BaseException as exc:
            failures[slot] = exc

    _run_chunks(n, cfg, work)
    for exc in failures:
        if exc is not None:
            raise exc
    found = [h for h in hits if h is not None]
    return min(found) if found else None
