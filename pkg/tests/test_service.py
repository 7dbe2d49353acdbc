"""HTTP service surface."""

from __future__ import annotations

import csv
import io
import math

import pytest
from fastapi.testclient import TestClient

from dc64 import Engine, parcast
from dc64.service import create_app
from dc64.vecfile import read_vector, write_vector
from dc64.vectors import vector_from_values


@pytest.fixture
def client(fixture_lib):
    app = create_app(Engine(long_threshold=1000))
    with TestClient(app) as c:
        c.fixture_lib = str(fixture_lib)
        yield c
    parcast.reset_thread_count()


def _load(client, name=None):
    body = {"path": client.fixture_lib}
    if name:
        body["name"] = name
    resp = client.post("/libraries", json=body)
    assert resp.status_code == 200, resp.text
    return resp.json()["name"]


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200 and resp.json()["status"] == "ok"


def test_load_list_unload(client):
    name = _load(client, "fixtures")
    assert name == "fixtures"
    listed = client.get("/libraries").json()
    assert [entry["name"] for entry in listed] == ["fixtures"]
    assert client.delete("/libraries/fixtures").status_code == 200
    assert client.get("/libraries").json() == []


def test_load_idempotent_same_path(client):
    _load(client, "fixtures")
    again = client.post("/libraries", json={"path": client.fixture_lib,
                                            "name": "fixtures"})
    assert again.status_code == 200


def test_load_conflicting_name(client, tmp_path):
    _load(client, "fixtures")
    other = tmp_path / "other.so"
    other.write_bytes(b"not really")
    resp = client.post("/libraries", json={"path": str(other), "name": "fixtures"})
    assert resp.status_code == 400
    assert resp.json()["kind"] == "LoadError"


def test_load_missing_file(client):
    resp = client.post("/libraries", json={"path": "/no/such/lib"})
    assert resp.status_code == 400 and resp.json()["kind"] == "LoadError"


def test_symbols_endpoint(client):
    name = _load(client)
    resp = client.get(f"/libraries/{name}/symbols")
    assert resp.status_code == 200
    assert resp.json()["symbols"] == ["BENCHMARK", "fill_seq", "get64_c",
                                      "get_c", "get_f_", "mutate_all"]


def test_resolve_fortran(client):
    _load(client, "fixtures")
    resp = client.post("/resolve", json={"symbol": "get_f", "fortran": True})
    assert resp.status_code == 200
    assert resp.json()["resolved_name"] == "get_f_"


def test_resolve_unknown_is_404(client):
    _load(client)
    resp = client.post("/resolve", json={"symbol": "nope"})
    assert resp.status_code == 404 and resp.json()["kind"] == "SymbolError"


def test_call_get_c(client):
    resp = client.post("/calls", json={
        "library": client.fixture_lib,
        "symbol": "get_c",
        "signature": ["double", "integer", "double"],
        "args": [
            {"name": "input", "values": list(range(1, 11)), "elem_type": "integer"},
            {"name": "index", "values": [9], "elem_type": "integer"},
            {"name": "output", "values": [0], "elem_type": "integer"},
        ],
    })
    assert resp.status_code == 200, resp.text
    body = resp.json()
    out = body["outputs"][2]
    assert out["name"] == "output" and out["values"] == [9.0]
    assert body["counters"]["copies"] == 3  # three rw arguments
    assert body["elapsed_ns"] > 0


def test_call_writes_dc64_files(client, tmp_path):
    out_dir = tmp_path / "out"
    resp = client.post("/calls", json={
        "library": client.fixture_lib,
        "symbol": "fill_seq",
        "signature": ["double", "int64"],
        "intents": ["w", "r"],
        "naok": True,
        "args": [{"name": "out", "zeros": {"mode": "double", "length": 10}},
                 {"name": "n", "values": [10], "elem_type": "double"}],
        "out_dir": str(out_dir),
    })
    assert resp.status_code == 200, resp.text
    vec = read_vector(out_dir / "out.dc64")
    assert vec.tolist() == [float(i) for i in range(1, 11)]


def test_call_reads_dc64_files(client, tmp_path):
    src = tmp_path / "input.dc64"
    write_vector(src, vector_from_values([5.0, 6.0, 7.0]))
    resp = client.post("/calls", json={
        "library": client.fixture_lib,
        "symbol": "get_c",
        "signature": ["double", "integer", "double"],
        "args": [{"name": "input", "path": str(src)},
                 {"name": "index", "values": [2], "elem_type": "integer"},
                 {"name": "output", "values": [0], "elem_type": "double"}],
    })
    assert resp.status_code == 200
    assert resp.json()["outputs"][2]["values"] == [6.0]


def test_call_naok_error_names_argument(client):
    resp = client.post("/calls", json={
        "library": client.fixture_lib,
        "symbol": "get_c",
        "signature": ["double", "integer", "double"],
        "args": [{"values": ["NaN"], "elem_type": "double"},
                 {"values": [1], "elem_type": "integer"},
                 {"values": [0], "elem_type": "double"}],
    })
    assert resp.status_code == 422
    body = resp.json()
    assert body["kind"] == "MissingValueError" and "argument 1" in body["error"]


def test_call_bad_signature_is_spec_error(client):
    resp = client.post("/calls", json={
        "library": client.fixture_lib,
        "symbol": "get_c",
        "signature": ["float"],
        "args": [{"values": [1], "elem_type": "double"}],
    })
    assert resp.status_code == 400 and resp.json()["kind"] == "SpecError"


def test_call_nan_values_serialized_as_strings(client):
    resp = client.post("/calls", json={
        "library": client.fixture_lib,
        "symbol": "BENCHMARK",
        "signature": ["double"],
        "intents": ["rw"],
        "naok": True,
        "args": [{"values": ["NaN", "Infinity", 1.5], "elem_type": "double"}],
    })
    assert resp.status_code == 200
    values = resp.json()["outputs"][0]["values"]
    assert values[0] == "NaN" and values[1] == "Infinity" and values[2] == 1.5
    assert math.isnan(float(values[0]))


def test_call_max_inline_omits_values(client):
    resp = client.post("/calls", json={
        "library": client.fixture_lib,
        "symbol": "BENCHMARK",
        "signature": ["double"],
        "naok": True,
        "max_inline": 4,
        "args": [{"values": [0.0] * 8, "elem_type": "double"}],
    })
    body = resp.json()
    assert body["outputs"][0]["values"] is None
    assert body["outputs"][0]["length"] == 8


def test_call_reports_long_header(client):
    resp = client.post("/calls", json={
        "library": client.fixture_lib,
        "symbol": "BENCHMARK",
        "signature": ["double"],
        "intents": ["r"],
        "naok": True,
        "max_inline": 0,
        "args": [{"values": [0.0] * 1001, "elem_type": "double"}],
    })
    out = resp.json()["outputs"][0]
    assert out["length"] == 1001 and out["length32"] == -1


def test_bench_endpoint_returns_csv(client):
    resp = client.post("/bench", json={"suite": "scaling",
                                       "library": client.fixture_lib,
                                       "lengths": [64], "threads": [1, 2],
                                       "replicates": 2})
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("text/csv")
    rows = list(csv.reader(io.StringIO(resp.text)))
    assert rows[0][0] == "suite" and len(rows) == 1 + 4


def test_bench_unknown_library(client):
    resp = client.post("/bench", json={"suite": "overhead", "library": "ghost"})
    assert resp.status_code == 400 and resp.json()["kind"] == "LoadError"


def test_threads_endpoints(client):
    resp = client.put("/threads", json={"threads": 3})
    assert resp.status_code == 200 and resp.json()["threads"] == 3
    assert client.get("/threads").json()["threads"] == 3


def test_argument_spec_requires_exactly_one_source(client):
    resp = client.post("/calls", json={
        "library": client.fixture_lib,
        "symbol": "BENCHMARK",
        "signature": ["double"],
        "args": [{"values": [1.0], "path": "/also/this"}],
    })
    assert resp.status_code == 422  # pydantic validation
