"""Exception hierarchy shared by all modules."""


class QubitCorrError(Exception):
    """Base class for every error raised by this package."""


class NonHermitianInput(QubitCorrError, ValueError):
    pass


class InvalidState(QubitCorrError, ValueError):
    """Operator is not a valid density matrix (negative or wrong trace)."""


class InvalidTest(QubitCorrError, ValueError):
    """Effect pair is not a valid two-outcome POVM."""


class DegenerateDirection(QubitCorrError, ArithmeticError):
    """A rank-one projector was requested along a vanishing Bloch direction."""


class DimensionMismatch(QubitCorrError, ValueError):
    pass


class DegenerateAlpha(QubitCorrError, ValueError):
    """Closed-form ellipse evaluated at an angle where it does not exist."""
