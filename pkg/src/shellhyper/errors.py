"""Exception hierarchy shared by all modules."""


class ShellHyperError(Exception):
    """Base class for errors raised by shellhyper."""


class DomainError(ShellHyperError, ValueError):
    """An argument lies outside the domain of the operation."""


class ParseError(ShellHyperError, ValueError):
    """A design, manifest or sample file could not be parsed."""


class GeometryError(ShellHyperError, ValueError):
    """A point set violates a geometric requirement (e.g. unit norm)."""


class CertificationError(ShellHyperError):
    """A quadrature rule failed its exactness certification."""


class PreconditionError(ShellHyperError):
    """A rule is too weak (or uncertified) for the requested operator."""


class NumericalError(ShellHyperError, ArithmeticError):
    """A computation produced non-finite or otherwise unusable numbers."""


class QuadratureError(NumericalError):
    """Numerical failure while constructing a quadrature rule."""
