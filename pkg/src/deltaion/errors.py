"""Exception hierarchy shared by the solvers and the CLI."""

from __future__ import annotations


class DeltaIonError(Exception):
    """Base class for all package errors."""


class DomainError(DeltaIonError, ValueError):
    """An argument lies outside the domain of the operation."""


class NumericalFailure(DeltaIonError, RuntimeError):
    """A numerical procedure failed; carries module/operation/parameters."""

    def __init__(self, message: str, *, module: str = "", operation: str = "", params=None):
        self.module = module
        self.operation = operation
        self.params = dict(params or {})
        where = f"{module}.{operation}" if module else operation
        detail = f" [{where}]" if where else ""
        if self.params:
            detail += " " + ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        super().__init__(message + detail)


class ConvergenceError(NumericalFailure):
    """An iteration or refinement did not converge."""


class SolverInstability(NumericalFailure):
    """The time-domain recursion blew up."""


class ConfigError(DeltaIonError, ValueError):
    """Invalid run configuration (maps to CLI exit status 2)."""
