"""Exception types shared across the package."""


class SubaddLabError(Exception):
    """Base class for all package-specific errors."""


class NotInLpError(SubaddLabError):
    """The sequence is not a member of the requested weighted l^p space."""


class NotSummableError(SubaddLabError):
    """A weighted series diverges, so no finite value can be certified."""


class ResourceLimitError(SubaddLabError):
    """A requested computation exceeds a configured size or depth ceiling."""


class HeavyTailUnreliableError(SubaddLabError):
    """Plain-mean Monte Carlo is unreliable for this heavy-tailed target."""


class EmptyGridError(SubaddLabError):
    """A probe grid contains no admissible points."""
