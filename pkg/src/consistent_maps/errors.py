"""Exception hierarchy shared by every module."""


class CMapError(ValueError):
    """Base class for domain errors raised by this package."""


class InvalidD(CMapError):
    pass


class DivisionByZero(CMapError, ZeroDivisionError):
    pass


class NotRealField(CMapError):
    pass


class ZeroElement(CMapError):
    pass


class ZeroArgument(CMapError):
    pass


class FactorTooLarge(CMapError):
    pass


class GeneratorNotFound(CMapError):
    pass


class UnsupportedFieldPair(CMapError):
    pass


class IncompleteArchValues(CMapError):
    pass


class SingularSystem(CMapError):
    pass


class ZeroDenominator(CMapError):
    pass


class NotSUnit(CMapError):
    pass


class NonIntegralExponent(CMapError):
    pass


class ParseError(CMapError):
    pass
