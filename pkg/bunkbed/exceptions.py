class BunkbedError(Exception):
    pass


class GraphError(BunkbedError, ValueError):
    """ Malformed graph, weight, class spec or event input. """


class PreconditionError(BunkbedError):
    """ A stated precondition of an operation does not hold for the given input. """


class HypothesisError(PreconditionError):
    """ A verifier was asked to check an instance that does not satisfy its hypothesis. """


class CapExceededError(BunkbedError):
    """
    Raised before enumerating when the number of free edges is above the configured cap.

    Exact enumeration is `2 ** needed` configurations; callers that can fall back to
    Monte Carlo (ie: `bunkbed.search`) catch this and switch engines.
    """

    def __init__(self, message: str, *, needed: int, cap: int):
        super().__init__(message)
        self.needed = needed
        self.cap = cap


class SymmetryCollapseError(BunkbedError):
    """ Attach probabilities of `v` and `w` differ on a cluster where they are required equal. """


class IdentityMismatchError(BunkbedError):
    """ Two independently computed sides of an exact identity disagree. """
