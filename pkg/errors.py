"""
Description: Exception hierarchy shared by every zonovol module. Each class carries the
             process exit code the CLI reports when the error escapes a command.
Date created: October 19th, 2026
Date last modified: October 19th, 2026
"""


class ZonovolError(Exception):
    """Base class for all errors raised on purpose by zonovol."""

    exit_code = 1


class ContractError(ZonovolError, ValueError):
    """A precondition of an operation was violated (dimension mismatch, bad range)."""

    exit_code = 1


class DegenerateBodyError(ContractError):
    """The body is not full-dimensional (or not large enough) for the requested operation."""


class BudgetError(ZonovolError):
    """An enumeration would exceed the configured budget."""

    exit_code = 3


class ApplicabilityError(ZonovolError):
    """The hypotheses of a theorem or formula do not apply to the given instance."""

    exit_code = 2


class NumericalInconsistencyError(ZonovolError):
    """A quantity that must be nonnegative (or a proven bound) came out wrong beyond tolerance."""

    exit_code = 4


class ConvergenceError(ZonovolError):
    def __init__(self, message, residual=None):
        """
        Desc: Raised when an iterative solver stops without meeting its tolerance.
        Parameters:
            message (str): Human readable reason.
            residual (float): Largest constraint violation at the last iterate, if known.
        """
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class BodyFileError(ZonovolError):
    """Malformed body definition file; the message names the offending field or position."""

    exit_code = 1


class ConfigError(ZonovolError):
    """Malformed configuration, e.g. a non-integer ZONOVOL_BUDGET."""

    exit_code = 1
