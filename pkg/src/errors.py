"""Exception hierarchy shared by solvers, correlation measures and the CLI."""

from typing import Any


class DiscordError(Exception):
    """Base class for all package errors."""

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details = details

    def __str__(self) -> str:
        base = super().__str__()
        if not self.details:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in self.details.items())
        return f"{base} ({extra})"


class StateValidationError(DiscordError, ValueError):
    """An input record violates its physical invariants."""


class NumericalError(DiscordError):
    """A numerical routine failed or produced an inconsistent result."""


class ConvergenceError(NumericalError):
    """Eigensolver stagnation or optimizer disagreement."""


class ParityViolationError(NumericalError):
    """Ground state lacks definite parity (⟨J+⟩ != 0)."""


class NonXFormError(NumericalError):
    """Pairwise state has non-vanishing x± entries."""


class ExtremumError(NumericalError):
    """No interior extremum inside the search bracket."""


class FitError(NumericalError):
    """Scaling fit input is unusable."""
