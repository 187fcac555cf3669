"""Exception types raised across ribelab."""


class RibeError(Exception):
    """Base class for all library errors."""


class InvalidParameter(RibeError, ValueError):
    pass


class InvalidMetric(RibeError, ValueError):
    pass


class DisconnectedGraph(RibeError, ValueError):
    pass


class UnknownName(RibeError, KeyError):
    pass


class GenerationTimeout(RibeError, RuntimeError):
    pass


class NonInjective(RibeError, ValueError):
    pass


class NotUltrametric(InvalidMetric):
    """Raised with the offending triple stored on ``.triple``."""

    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class UnknownPoint(RibeError, IndexError):
    pass


class IndexOutOfRange(RibeError, IndexError):
    pass


class InvalidMeasure(RibeError, ValueError):
    pass


class PreconditionViolated(RibeError, ValueError):
    """Raised with a witnessing pair (or triple) on ``.witness`` when available."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DegenerateChain(RibeError, ZeroDivisionError):
    pass


class EmptyInducedGraph(RibeError, ValueError):
    pass


class NotRegular(PreconditionViolated):
    pass


class DimensionTooLarge(RibeError, ValueError):
    pass


class NegativeTime(RibeError, ValueError):
    pass


class ParseError(RibeError, ValueError):
    """File parse failure; ``path`` and ``line`` locate the problem."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line
