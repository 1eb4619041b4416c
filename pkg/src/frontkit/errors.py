"""Exception hierarchy shared by the library, the service and the CLI.

The CLI maps these onto process exit codes: parse failures exit 2,
precondition violations exit 3, numerical failures exit 4.
"""


class FrontkitError(Exception):
    """Base class for all frontkit errors."""


class ParseError(FrontkitError):
    """Malformed input: bad JSON, missing fields, unreadable files."""

    exit_code = 2


class PreconditionError(FrontkitError):
    """An operation was called on data violating its contract."""

    exit_code = 3


class StructureError(PreconditionError):
    """A germ or series does not have the required monomial structure.

    Carries the offending monomial so reduction failures are debuggable.
    """

    def __init__(self, message, monomial=None, value=None):
        if monomial is not None:
            message = f"{message} (monomial u^{monomial[0]} v^{monomial[1]}, coefficient {value!r})"
        super().__init__(message)
        self.monomial = monomial
        self.value = value


class NumericalError(FrontkitError):
    """A computation failed to converge or hit a degenerate configuration."""

    exit_code = 4
