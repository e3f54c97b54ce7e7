"""Exception types shared across the package."""


class GradalgError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GradalgError):
    """Malformed DSL text or JSON input."""


class DegreeOutOfRange(GradalgError):
    """An operation referenced a degree beyond the built range."""


class InconsistentBase(GradalgError):
    """The stored algebra fails its own consistency checks."""


class DimensionTooLarge(GradalgError):
    """A quotient requested more dimensions than the universal component has."""


class NotTwoGenerated(GradalgError):
    """The algebra does not have a two-dimensional degree-one component."""


class Inadmissible(GradalgError):
    """A prescribed centralizer sequence cannot be realized.

    The offending degree is stored in ``self.degree``.
    """

    def __init__(self, degree, message=""):
        self.degree = degree
        super().__init__(message or f"inadmissible prescription at degree {degree}")


class CapExceeded(GradalgError):
    """A configured degree or branch cap was exceeded."""


class NoSecondDiamond(GradalgError):
    """The algebra has no two-dimensional component past degree 1."""
