"""Exception hierarchy shared by every layer of the toolkit.

The CLI maps any :class:`MdsxError` to exit code 1 (validation failure);
verification failures are reported through return values, not exceptions.
"""


class MdsxError(Exception):
    """Base class for all toolkit errors."""


class NotPrime(MdsxError, ValueError):
    pass


class DivideByZero(MdsxError, ZeroDivisionError):
    pass


class Singular(MdsxError, ArithmeticError):
    pass


class FieldTooSmall(MdsxError, ValueError):
    pass


class FieldSearchFailed(MdsxError, RuntimeError):
    pass


class DeltaOutOfRange(MdsxError, ValueError):
    pass


class GoalPairInvalid(MdsxError, ValueError):
    pass


class NodeOutOfRange(MdsxError, IndexError):
    pass


class NotAccessOptimalPlan(MdsxError):
    """A selected parity-check row touches a helper symbol outside the plan."""


class BadHelperSet(MdsxError, ValueError):
    pass


class TooFewSurvivors(MdsxError):
    pass


class NodeHealthy(MdsxError):
    pass


class CodeMismatch(MdsxError, ValueError):
    pass


class ShardFormatError(MdsxError, ValueError):
    pass
