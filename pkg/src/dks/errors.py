"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An operation received input outside its contract."""


class NotPSDError(InvalidInputError):
    """A matrix required to be positive semidefinite has a significantly
    negative eigenvalue."""


class CsvParseError(InvalidInputError):
    """A CSV cell could not be parsed; the message names the offending
    row and column."""
