"""Shared exception types."""


class GuardError(ValueError):
    """A desk-scale enumeration guard was exceeded."""


class ConfigurationError(ValueError):
    """An experiment configuration is invalid (bad rates, missing seed, ...)."""


class TheoremViolationError(AssertionError):
    """A theorem-backed invariant failed; this is a build-stopping bug."""


class SearchInconclusive(RuntimeError):
    """A bounded search ran out of budget before settling the question."""
