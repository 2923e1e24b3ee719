"""Exception hierarchy shared by all scatchan modules."""


class ScatchanError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(ScatchanError, ValueError):
    """Malformed or out-of-range input (dimensions, NaN/Inf, bad labels)."""


class NonUnitaryError(ScatchanError):
    """A matrix that must be unitary fails the tolerance check."""


class ConversionUnavailableError(ScatchanError):
    """S<->T conversion impossible: the required block is (near-)singular."""


class SeriesDivergentError(ScatchanError):
    """Geometric loop series cannot converge (operator norm >= 1)."""


class DecouplingViolationError(ScatchanError):
    """Fictitious and physical slots couple; indicates a wiring bug."""


class InternalConsistencyError(ScatchanError):
    """A result violates an invariant guaranteed for valid inputs."""
