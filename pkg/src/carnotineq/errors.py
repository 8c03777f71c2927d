"""Exception types shared across the library."""


class CarnotError(Exception):
    """Base class for all library-specific errors."""


class InvalidGroupSpec(CarnotError):
    """Group structure data violates the stratified-algebra axioms."""


class UnsupportedStep(CarnotError):
    """Group law requested for a step beyond the exact BCH truncation."""


class InvalidScale(CarnotError, ValueError):
    """Dilation parameter must be strictly positive."""


class DomainError(CarnotError, ValueError):
    """Argument outside the mathematical domain of a special function."""


class DegenerateSampler(CarnotError):
    """Rejection sampler acceptance rate collapsed; box is mis-scaled."""


class NonFiniteSample(CarnotError):
    """Integrand stayed non-finite after repeated resampling."""


class NonIntegrableWeight(CarnotError, ValueError):
    """Weight power is not integrable near its singular set."""


class SingularEvaluationPoint(CarnotError, ValueError):
    """Operator evaluated exactly on the singular set of its weight."""


class ZeroNorm(CarnotError):
    """A norm estimate is statistically indistinguishable from zero."""


class BadEpsilon(CarnotError, ValueError):
    """Epsilon outside the admissible window (0, Q - lambda)."""


class BadTau(CarnotError, ValueError):
    """Tau outside its admissible integrability window."""


class InadmissibleParams(CarnotError):
    """Exponent tuple fails the admissibility conditions of its theorem."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"inadmissible parameters: {report.violated}")
