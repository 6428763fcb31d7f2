"""Exception types shared across the package."""


class DimerlabError(Exception):
    """Base class for all package-specific errors."""


class DomainError(DimerlabError, ValueError):
    """A numeric argument lies outside the mathematical domain of an operation."""


class SizeError(DimerlabError, ValueError):
    """A requested system size exceeds what the chosen algorithm supports."""


class BranchUndefinedError(DimerlabError, ValueError):
    """A solution branch was requested where it does not exist."""


class FitQualityError(DimerlabError, RuntimeError):
    """A regression failed to reach the required goodness-of-fit."""
