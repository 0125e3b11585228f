"""Exception hierarchy shared by every twistlab module."""


class TwistlabError(Exception):
    """Base class for all library errors."""


class NotInvertible(TwistlabError, ArithmeticError):
    pass


class NotPrime(TwistlabError, ValueError):
    pass


class NonCoprimeModuli(TwistlabError, ValueError):
    pass


class DegreeZero(TwistlabError, ValueError):
    pass


class ModulusMismatch(TwistlabError, ValueError):
    pass


class UnsupportedWeight(TwistlabError, ValueError):
    pass


class InsufficientSource(TwistlabError, ValueError):
    pass


class OutOfRange(TwistlabError, IndexError):
    pass


class HeckeRelationError(TwistlabError, AssertionError):
    """An exact Hecke relation failed on a freshly built table."""


class CoefficientRangeExceeded(TwistlabError, IndexError):
    pass


class NonPrimitiveClass(TwistlabError, ValueError):
    pass


class QuadratureFailure(TwistlabError, RuntimeError):
    pass


class TruncationNotConverged(TwistlabError, RuntimeError):
    pass


class RangeConstraintViolated(TwistlabError, ValueError):
    pass


class InvalidParams(TwistlabError, ValueError):
    pass


class DivisibilityViolated(InvalidParams):
    pass


class ConfigError(TwistlabError, ValueError):
    pass


class CacheError(TwistlabError):
    pass


class BadMagic(CacheError):
    pass


class ChecksumMismatch(CacheError):
    pass


class VersionUnsupported(CacheError):
    pass


class CacheMiss(CacheError):
    pass
