"""Error taxonomy for the call engine.

Argument positions in messages are 1-based ("argument 1" is the first
argument); element indices are 0-based.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine failures."""

    def __init__(self, message: str, *, arg_index: int | None = None,
                 element_index: int | None = None):
        super().__init__(message)
        self.arg_index = arg_index
        self.element_index = element_index

    def at_argument(self, position: int) -> "EngineError":
        """Return a copy tagged with a 1-based argument position."""
        if self.arg_index is not None:
            return self
        err = type(self)(f"argument {position}: {self}",
                         arg_index=position, element_index=self.element_index)
        return err


class SpecError(EngineError):
    """Malformed signature, intent, or call declaration (usage error)."""


class CapacityError(EngineError):
    """Vector length beyond the element ceiling, or allocation failure."""


class RangeError(EngineError):
    """A value cannot be represented in the requested narrower type."""


class CastError(EngineError):
    """A double/int64 cast failed (non-finite or out-of-range element)."""


class MissingValueError(EngineError):
    """A missing or infinite value was found while the NAOK scan is active."""


class LoadError(EngineError):
    """A shared library could not be loaded or registered."""


class SymbolError(EngineError):
    """A symbol could not be resolved in the loaded libraries."""
