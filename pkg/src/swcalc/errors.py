"""Exception hierarchy shared by the library and the command line."""


class SwcalcError(Exception):
    """Base class. ``code`` is the machine-readable error kind."""

    code = "error"

    def __init__(self, message, param=None):
        super().__init__(message)
        self.message = message
        self.param = param


class UsageError(SwcalcError):
    code = "usage"


class DomainError(SwcalcError):
    code = "domain"


class WindowError(SwcalcError):
    """Requested coefficient lies outside the represented window."""

    code = "range"


class PrecisionFailure(SwcalcError):
    code = "precision"


class DerivationError(SwcalcError):
    """A derivation could not be carried out in the shape the proof requires."""

    code = "derivation"
