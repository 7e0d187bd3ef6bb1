"""Exception hierarchy shared by every module."""


class SplitcatError(Exception):
    """Base class for all library errors."""


class ShapeMismatch(SplitcatError, ValueError):
    pass


ShapeError = ShapeMismatch


class MismatchedTheory(SplitcatError, TypeError):
    pass


class NotEndomorphism(SplitcatError, ValueError):
    pass


class Unsupported(SplitcatError, NotImplementedError):
    pass


NotSupported = Unsupported


class NotPossibilistic(SplitcatError, ValueError):
    pass


class NotInHom(SplitcatError, ValueError):
    pass


class PreconditionFailed(SplitcatError, ValueError):
    pass


class ZeroIdempotent(SplitcatError, ValueError):
    pass


class BadState(SplitcatError, ValueError):
    pass


class NotIdempotent(SplitcatError, ValueError):
    pass


class NotCPTP(SplitcatError, ValueError):
    pass


class NotCausalIdempotent(SplitcatError, ValueError):
    pass


class NotSpecial(SplitcatError, ValueError):
    pass


class EmptySpec(SplitcatError, ValueError):
    pass


class NumericalFailure(SplitcatError, ArithmeticError):
    pass


class ParseError(SplitcatError, ValueError):
    pass


class ConventionError(ParseError):
    pass
