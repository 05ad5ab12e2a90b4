"""Exception hierarchy shared across the library.

Two families matter to callers (and to the CLI exit codes): `ValidationError`
for rejected inputs and `NumericalError` for computations that started but
could not finish to tolerance.
"""


class HarmlabError(Exception):
    """Base class for all library-specific errors."""


class ValidationError(HarmlabError, ValueError):
    """Input rejected before any numerics ran (CLI exit code 2)."""


class NumericalError(HarmlabError, ArithmeticError):
    """A numerical procedure failed to converge or hit a gate (CLI exit code 3)."""


# --- validation failures -----------------------------------------------------

class NearIntegerAlpha(ValidationError):
    """Fractional-branch exponent within 1e-9 of an integer; cot(pi*alpha) blows up."""


class NonpositiveEpsilon(ValidationError):
    """Regularization parameter must be strictly positive."""


class StencilLeavesDomain(ValidationError):
    """Finite-difference stencil would sample points with y <= 0."""


class DegenerateDesign(ValidationError):
    """Regression abscissae are all identical; no line can be fitted."""


class GrowthViolation(ValidationError):
    """Boundary data grows too fast for the Poisson representation (alpha >= 1)."""


class DimensionMismatch(ValidationError):
    """Evaluation point dimension differs from the ensemble dimension."""


class AlphaTooLarge(ValidationError):
    """Lifting requires activation power alpha < 1 (Cauchy moment diverges otherwise)."""


class ZeroDirection(ValidationError):
    """Slicing direction vector must be nonzero."""


class KTooSmall(ValidationError):
    """Regularization-rate experiments require k >= 2."""


class InadmissiblePair(ValidationError):
    """(derivative order, integrability) pair outside the sampling theorem's range."""


class DegenerateAngle(ValidationError):
    """Slice angle with k*theta in pi*Z: the logarithmic coefficient vanishes."""


# --- numerical failures ------------------------------------------------------

class MaxSubdivisionsExceeded(NumericalError):
    """Adaptive quadrature ran out of subdivision budget.

    Carries the best estimate and the error bound reached so far, so callers
    can distinguish 'slow' from 'divergent'.
    """

    def __init__(self, message, estimate=None, err_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.err_bound = err_bound


class QuadratureFailure(NumericalError):
    """Poisson-kernel quadrature did not reach the requested tolerance."""


class NonFiniteSample(NumericalError):
    """A field evaluated to NaN/inf on a quadrature node."""


class DivergenceDetected(NumericalError):
    """Criterion integral diverges near a singular point (partial sums keep growing)."""


class GateFailed(NumericalError):
    """Quadrature-convergence gate failed: norms change too much under grid refinement."""
