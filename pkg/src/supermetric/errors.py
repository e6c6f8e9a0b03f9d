"""Exception types raised across the package."""


class IncompatibleVectors(ValueError):
    """Two vectors of different dimension were compared."""


class UndefinedDirection(ValueError):
    """A zero vector was given to a direction-based metric."""


class ZeroMass(ValueError):
    """A vector with zero sum was given to a divergence metric."""


class NonMetricInput(ValueError):
    """Distances that cannot belong to a metric space (triangle inequality broken)."""


class IllegalExclusion(ValueError):
    """Hilbert exclusion requested for a metric lacking the four-point property."""


class ParseError(ValueError):
    """Malformed vector file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateSpace(ValueError):
    """Sampled distances have zero variance."""
