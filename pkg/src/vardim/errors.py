"""Exception types shared across the library."""


class VardimError(Exception):
    """Base class for library-specific failures."""


class UnsupportedRepresentationError(VardimError):
    """The requested operation needs a different system representation."""


class DegenerateSystemError(VardimError):
    """The system is identically zero or otherwise degenerate."""


class WindowError(VardimError):
    """A signal does not cover the index window an operation needs."""


class BudgetExceededError(VardimError):
    """An enumeration would exceed the configured budget."""


class StructuralError(VardimError):
    """A decomposition or certificate assertion failed structurally."""


class ParseError(VardimError):
    """A system-definition file could not be parsed."""
