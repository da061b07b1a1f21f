"""Exception hierarchy shared by every module of the package."""


class RegraphError(Exception):
    """Base class for all domain errors raised by regraph."""


# graph construction and switches
class NotRegular(RegraphError):
    pass


class DuplicateEdge(RegraphError):
    pass


class Loop(RegraphError):
    pass


class ParityError(RegraphError):
    pass


class DegreeTooLarge(RegraphError):
    pass


class MismatchedParameters(RegraphError):
    pass


class EdgeAbsent(RegraphError):
    pass


class IncidentEdges(RegraphError):
    pass


class WouldCreateMultiEdge(RegraphError):
    pass


class ParseError(RegraphError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# state spaces and mixing
class StateSpaceTooLarge(RegraphError):
    pass


class NotConnected(RegraphError):
    pass


class NumericalFailure(RegraphError):
    pass


# pairings
class Unbalanced(RegraphError):
    pass


class TooLarge(RegraphError):
    pass


class LimitViolation(RegraphError):
    pass


# scripted trajectory
class ScriptInvalid(RegraphError):
    pass


class VertexOutOfRange(RegraphError):
    pass
