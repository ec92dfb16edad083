class DimensionMismatchError(ValueError):
    """Vectors, points or instances disagree on their dimension."""


class DomainTooLargeError(ValueError):
    """An explicit finite domain exceeds the configured enumeration cap."""


class RejectionBudgetError(ValueError):
    """An instance generator ran out of resampling attempts."""


class PrivacyParameterError(ValueError):
    """Privacy or utility parameters are outside their admissible range."""
