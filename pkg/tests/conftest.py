"""Shared fixtures.

The compiled callee library is built on demand from the C source that
ships with the repository; tests that cross the real ABI boundary
request `fixture_lib` and are skipped when no C toolchain is present.
Engine unit and property tests use in-process stub callees and run
everywhere.
"""

from __future__ import annotations

import ctypes
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from dc64 import Engine, parcast
from dc64.dispatch import platform_dynlib_suffix

FIXTURE_SRC = Path(__file__).resolve().parents[1] / "fixtures" / "src" / "dc64fixtures.c"

_CTYPES = {
    np.dtype(np.float64): ctypes.c_double,
    np.dtype(np.int32): ctypes.c_int32,
    np.dtype(np.int64): ctypes.c_int64,
}


def buffer_view(address: int, count: int, dtype) -> np.ndarray:
    """View raw callee-side memory as a numpy array (test helper)."""
    ctype = _CTYPES[np.dtype(dtype)]
    return np.ctypeslib.as_array((ctype * max(count, 1)).from_address(address))[:count]


@pytest.fixture(scope="session")
def fixture_lib(tmp_path_factory) -> Path:
    cc = shutil.which("cc") or shutil.which("gcc") or shutil.which("clang")
    if cc is None:
        pytest.skip("no C compiler for the callee fixture library")
    if not FIXTURE_SRC.exists():
        pytest.skip(f"fixture source missing: {FIXTURE_SRC}")
    out = tmp_path_factory.mktemp("fixlib") / f"dc64fixtures{platform_dynlib_suffix()}"
    subprocess.run([cc, "-shared", "-fPIC", "-O2", "-o", str(out), str(FIXTURE_SRC)],
                   check=True, capture_output=True)
    return out


@pytest.fixture
def engine(fixture_lib) -> Engine:
    """Engine with a lowered long threshold and the compiled fixtures."""
    eng = Engine(long_threshold=1000)
    eng.load_library(fixture_lib, registry_name="fixtures")
    return eng


@pytest.fixture
def bare_engine() -> Engine:
    return Engine(long_threshold=1000)


@pytest.fixture
def clean_threads():
    """Restore thread-count state around a test."""
    parcast.reset_thread_count()
    yield
    parcast.reset_thread_count()
