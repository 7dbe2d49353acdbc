"""Benchmark harness: grid arithmetic, CSV schema, row-order determinism."""

from __future__ import annotations

import csv
import io

import pytest

from dc64 import Engine, LoadError
from dc64.bench import (CSV_FIELDS, csv_text, run_large, run_overhead,
                        run_scaling, run_suite, run_write, write_csv)


@pytest.fixture
def bench_engine(fixture_lib):
    eng = Engine()
    eng.load_library(fixture_lib, registry_name="fixtures")
    return eng


def _parse(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == list(CSV_FIELDS)
    return rows[1:]


def test_overhead_grid_row_count(bench_engine):
    reps = 3
    records = run_overhead(bench_engine, "fixtures", replicates=reps)
    # engine grid: 3 signatures x {rw, r} x {naok off/on}; the plain
    # reference comparator adds double/integer rows but no int64 rows
    engine_rows = [r for r in records if r.suite == "overhead"]
    ref_rows = [r for r in records if r.suite == "overhead-ref"]
    assert len(engine_rows) == 3 * 2 * 2 * reps
    assert len(ref_rows) == 2 * 2 * reps
    assert not [r for r in ref_rows if r.signature == "int64"]
    assert len(records) == 16 * reps


def test_overhead_grid_covers_every_cell(bench_engine):
    records = run_overhead(bench_engine, "fixtures", replicates=1)
    cells = {(r.signature, r.intent, r.naok) for r in records if r.suite == "overhead"}
    assert cells == {(s, i, n)
                     for s in ("double", "integer", "int64")
                     for i in ("rw", "r")
                     for n in (False, True)}


def test_overhead_runs_at_length_one(bench_engine):
    records = run_overhead(bench_engine, "fixtures", replicates=1)
    assert {r.length for r in records} == {1}
    assert all(r.elapsed_ns >= 0 for r in records)


def test_large_suite_uses_configurable_length(bench_engine):
    records = run_large(bench_engine, "fixtures", length=4096, replicates=1)
    assert {r.length for r in records} == {4096}
    assert len(records) == 16


def test_write_suite_grid(bench_engine):
    records = run_write(bench_engine, "fixtures", length=512, replicates=2)
    assert len(records) == 3 * 2 * 2
    cells = {(r.signature, r.intent) for r in records}
    assert cells == {(s, i) for s in ("double", "integer", "int64")
                     for i in ("rw", "w")}
    assert all(r.naok for r in records)


def test_scaling_grid_size(bench_engine):
    records = run_scaling(bench_engine, "fixtures", lengths=(256,),
                          threads=(1, 2, 4), replicates=5)
    assert len(records) == 15
    assert {r.threads for r in records} == {1, 2, 4}
    assert {(r.signature, r.intent) for r in records} == {("int64", "rw")}


def test_csv_schema_and_parse(bench_engine, tmp_path):
    records = run_scaling(bench_engine, "fixtures", lengths=(64,), threads=(1,),
                          replicates=2)
    path = tmp_path / "out.csv"
    write_csv(records, path)
    rows = _parse(path.read_text())
    assert len(rows) == 2
    for suite, sig, intent, naok, length, threads, rep, ns in rows:
        assert suite == "scaling" and sig == "int64" and intent == "rw"
        assert naok in ("true", "false")
        int(length), int(threads), int(rep), int(ns)


def test_row_order_deterministic(bench_engine):
    def key(recs):
        return [(r.suite, r.signature, r.intent, r.naok, r.length, r.threads,
                 r.replicate) for r in recs]

    a = run_overhead(bench_engine, "fixtures", replicates=2)
    b = run_overhead(bench_engine, "fixtures", replicates=2)
    assert key(a) == key(b)


def test_run_suite_dispatch(bench_engine):
    records = run_suite("write", bench_engine, "fixtures", length=64, replicates=1)
    assert records and records[0].suite == "write"
    with pytest.raises(Exception):
        run_suite("nope", bench_engine, "fixtures")


def test_missing_fixture_symbol_raises_load_error():
    eng = Engine()
    eng.register_stub_library("empty", {})
    with pytest.raises(LoadError):
        run_overhead(eng, "empty", replicates=1)


def test_csv_text_matches_file(bench_engine, tmp_path):
    records = run_scaling(bench_engine, "fixtures", lengths=(32,), threads=(1,),
                          replicates=1)
    path = tmp_path / "t.csv"
    write_csv(records, path)
    assert path.read_text() == csv_text(records)
