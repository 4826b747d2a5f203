"""Exception hierarchy.

Every error carries an ``exit_code`` so the command-line front end can map
failures onto stable process exit statuses.
"""


class PlacementError(Exception):
    exit_code = 1


class InvalidInputError(PlacementError, ValueError):
    """Malformed matrices, descriptors or files."""
    exit_code = 3


class DimensionError(InvalidInputError):
    pass


class ParameterError(InvalidInputError):
    pass


class SizeError(InvalidInputError):
    """Problem too large for exhaustive enumeration."""


class StabilityError(PlacementError, ValueError):
    """State matrix is not Hurwitz where an infinite-horizon Gramian is needed."""
    exit_code = 3

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class ControllabilityError(PlacementError, ValueError):
    exit_code = 3


class InfeasibleError(PlacementError):
    """The energy bound is below what even full actuation achieves."""
    exit_code = 2

    def __init__(self, message, floor=None):
        super().__init__(message)
        self.floor = floor


class CertificationError(PlacementError, ArithmeticError):
    """A bisection could not certify its guarantee within floating point range."""
    exit_code = 4
