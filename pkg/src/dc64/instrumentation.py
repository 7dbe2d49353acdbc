"""Per-call diagnostics and copy-ledger counters."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Diagnostic:
    """A leveled tuning (1) or debug (2) message tied to an argument."""

    level: int
    message: str
    arg_index: int | None = None  # 1-based, None when not argument-specific

    def __str__(self) -> str:
        where = f"argument {self.arg_index}: " if self.arg_index else ""
        return f"{where}{self.message}"


class DiagnosticSink:
    """Collects diagnostics up to the configured verbosity.

    Verbosity 0 collects nothing, 1 collects tuning messages, 2 adds
    debug messages.  Callers may skip detection work entirely when
    ``wants(level)`` is false.
    """

    def __init__(self, verbosity: int = 0):
        if verbosity not in (0, 1, 2):
            raise ValueError(f"verbosity must be 0, 1, or 2, got {verbosity!r}")
        self.verbosity = verbosity
        self.messages: list[Diagnostic] = []

    def wants(self, level: int) -> bool:
        return self.verbosity >= level

    def emit(self, level: int, message: str, arg_index: int | None = None) -> None:
        if self.verbosity >= level:
            self.messages.append(Diagnostic(level, message, arg_index))


@dataclass
class InstrumentationCounters:
    """Counts the buffer work one call performed; monotone within a call."""

    copies: int = 0
    casts: int = 0
    backcasts: int = 0
    scans: int = 0

    def as_dict(self) -> dict[str, int]:
        return {"copies": self.copies, "casts": self.casts,
                "backcasts": self.backcasts, "scans": self.scans}


__all__ = ["Diagnostic", "DiagnosticSink", "InstrumentationCounters"]
