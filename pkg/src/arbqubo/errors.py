"""Exception types raised across the package."""


class ArbQuboError(Exception):
    """Base class for all arbqubo errors."""


# -- rate data -------------------------------------------------------------

class IncompleteMatrix(ArbQuboError):
    """A required directed currency pair is missing from the input."""


class InvalidRate(ArbQuboError):
    """An exchange rate is non-positive, non-finite, or a self-rate != 1."""


class DuplicateEntry(ArbQuboError):
    """The same directed currency pair (or label) appears more than once."""


class InvalidSize(ArbQuboError):
    """Requested matrix size is too small to be meaningful."""


class InvalidCycle(ArbQuboError):
    """A cycle specification repeats an index, is too short, or is out of range."""


class InvalidStrength(ArbQuboError):
    """A planted-cycle strength is not strictly greater than 1."""


# -- QUBO / model ------------------------------------------------------------

class DimensionError(ArbQuboError):
    """A vector or loop has the wrong length for the problem at hand."""


class ModelError(ArbQuboError):
    """Problem shape or Hamiltonian weights violate their invariants."""


class NotFeasible(ArbQuboError):
    """An operation requiring a feasible decoded loop got an infeasible one."""


# -- solvers / bench -----------------------------------------------------

class TooLarge(ArbQuboError):
    """The instance exceeds the brute-force enumeration guard."""


class ParamError(ArbQuboError):
    """Sampler parameters violate their invariants."""


class WrongOrdering(ArbQuboError):
    """A SampleSet is not in production order (e.g. energy-sorted exact output)."""
