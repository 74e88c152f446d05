"""Exception hierarchy shared by every module."""


class LLLError(Exception):
    """Base class for all errors raised by lllkit."""


class ParseError(LLLError):
    """Malformed DIMACS or native model text."""


class InvalidModel(LLLError):
    """A model violates a structural invariant (probabilities, scopes, ids)."""


class CapExceeded(LLLError):
    """A configured safety cap (steps, rounds, table columns, family size) was hit.

    ``partial`` carries whatever diagnostic state the raiser had at hand,
    e.g. the execution log so far.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class CriterionUnsatisfied(LLLError):
    """An LLL criterion required by the operation does not hold."""


class InconsistentMerge(LLLError):
    """Attempted to merge two witness DAGs that are not consistent."""


class UnsupportedDistribution(LLLError):
    """A variable distribution cannot be represented in the requested sample space."""
