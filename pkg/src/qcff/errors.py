"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: input problems (parse, integrity,
catalog) exit 2, domain and capacity problems exit 3.
"""


class QcffError(Exception):
    """Base class for all errors raised by this package."""


class InputError(QcffError):
    """Malformed or inconsistent user input."""


class ParseError(InputError):
    """A text file could not be parsed.

    Attributes:
        lineno: 1-based line number of the offending line, or None when the
            problem is not tied to one line (e.g. a missing header).
    """

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class IntegrityError(InputError):
    """Two entries of an input file disagree about the same quantity."""


class CatalogError(InputError):
    """Unknown element or basis set."""


class DomainError(QcffError):
    """Arguments are well-formed but outside the supported domain."""


class CapacityError(DomainError):
    """A problem is too large for the dense simulator or FCI oracle."""


class ContractViolation(QcffError):
    """A precondition on related arguments does not hold."""


class FitError(QcffError):
    """A least-squares fit is ill-posed (rank deficient)."""


class SingularityError(DomainError):
    """Two atoms coincide in a pair interaction that diverges at r=0."""
