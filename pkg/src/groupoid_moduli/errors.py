"""Exception hierarchy shared by all modules."""


class GroupoidModuliError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(GroupoidModuliError, ValueError):
    """Malformed input: out-of-range ids, inconsistent tables, bad shapes."""


class AxiomError(GroupoidModuliError):
    """A table is well formed but violates the groupoid (or group/action) axioms."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NotASubgroupoid(GroupoidModuliError, ValueError):
    pass


class SizeLimitError(GroupoidModuliError):
    """An enumeration would exceed its configured size guard."""


class VerificationError(GroupoidModuliError):
    """A numerical or combinatorial cross-check failed.

    ``report`` carries the full report that exposed the failure so callers can
    still persist it.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InputError(GroupoidModuliError, ValueError):
    """A file or argument does not match its documented format."""
