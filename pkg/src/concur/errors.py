class ConcurError(ValueError):
    """Base class for input errors raised by this package."""


class DimensionError(ConcurError):
    pass


class NormalizationError(ConcurError):
    pass


class StateFormatError(ConcurError):
    """Malformed state or density file."""


class SizeGuardError(ConcurError):
    pass
