"""Exception hierarchy shared by the library and the CLI."""
from __future__ import annotations

from pathlib import Path
from typing import Optional


class UltrawalksError(Exception):
    """Base class for every error raised by ultrawalks."""


class DomainError(UltrawalksError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularParameterError(DomainError):
    """alpha hits the pole (0) or the zero (1) of Gamma(alpha)."""


class KernelInvalidError(DomainError):
    """A kernel profile violates nonnegativity or shape constraints."""


class MassViolationError(KernelInvalidError):
    def __init__(self, mass: float, tolerance: float) -> None:
        super().__init__(f"kernel mass {mass!r} differs from 1 by more than {tolerance:g}")
        self.mass = mass
        self.tolerance = tolerance


class NumericError(UltrawalksError, ArithmeticError):
    """A numerical routine failed to converge."""


class ConfigError(UltrawalksError, ValueError):
    """Invalid experiment configuration or input document."""

    def __init__(self, message: str, *, path: Optional[Path] = None, field: Optional[str] = None) -> None:
        where = []
        if path is not None:
            where.append(str(path))
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{': '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.path = path
        self.field = field
