"""Request/response models for the call service.

Non-finite floats are serialized as the strings "NaN", "Infinity",
"-Infinity" so responses stay strict JSON; clients convert back with
float().
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ServiceModel(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")


class HealthResponse(ServiceModel):
    status: str = "ok"
    version: str


class LibraryLoadRequest(ServiceModel):
    path: str
    name: Optional[str] = None


class LibraryInfo(ServiceModel):
    name: str
    path: str


class SymbolListResponse(ServiceModel):
    library: str
    path: str
    symbols: list[str]


class ResolveRequest(ServiceModel):
    symbol: str
    library: Optional[str] = None
    fortran: bool = False


class ResolveResponse(ServiceModel):
    symbol: str
    resolved_name: str
    library: str


class ZerosSpec(ServiceModel):
    mode: Literal["double", "integer"]
    length: int = Field(ge=0)


class ArgumentSpec(ServiceModel):
    """Exactly one of values / path / zeros."""

    name: Optional[str] = None
    values: Optional[list[float]] = None
    elem_type: Optional[Literal["double", "integer"]] = None
    path: Optional[str] = None
    zeros: Optional[ZerosSpec] = None

    @model_validator(mode="after")
    def _one_source(self):
        given = sum(x is not None for x in (self.values, self.path, self.zeros))
        if given != 1:
            raise ValueError("exactly one of values, path, or zeros is required")
        return self


class CallRequest(ServiceModel):
    library: str
    symbol: str
    signature: list[str]
    intents: Optional[list[str]] = None
    naok: bool = False
    fortran: bool = False
    verbose: int = Field(default=0, ge=0, le=2)
    package: Optional[str] = None
    args: list[ArgumentSpec]
    out_dir: Optional[str] = None
    threads: Optional[int] = Field(default=None, ge=1)
    max_inline: int = Field(default=65536, ge=0)


class VectorPayload(ServiceModel):
    name: Optional[str] = None
    elem_type: str
    length: int
    length32: int
    values: Optional[list[float]] = None  # omitted beyond max_inline
    file: Optional[str] = None


class CountersPayload(ServiceModel):
    copies: int
    casts: int
    backcasts: int
    scans: int


class DiagnosticPayload(ServiceModel):
    level: int
    argument: Optional[int] = None
    message: str


class CallResponse(ServiceModel):
    outputs: list[VectorPayload]
    counters: CountersPayload
    diagnostics: list[DiagnosticPayload]
    elapsed_ns: int


class BenchRequest(ServiceModel):
    suite: Literal["overhead", "large", "write", "scaling"]
    library: str
    length: Optional[int] = Field(default=None, ge=1)
    lengths: Optional[list[int]] = None
    replicates: Optional[int] = Field(default=None, ge=1)
    threads: Optional[list[int]] = None


class ThreadConfig(ServiceModel):
    threads: int = Field(ge=1)


class ErrorPayload(ServiceModel):
    error: str
    kind: str
