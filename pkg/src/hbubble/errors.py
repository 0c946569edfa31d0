"""Exception types shared across the package."""


class HBubbleError(Exception):
    """Base class for package errors."""


class InvalidInputError(HBubbleError, ValueError):
    """An argument violates a documented precondition."""


class SingularInputError(InvalidInputError):
    """Coincident points (or another exact singularity) were supplied."""


class UnsupportedDomainError(HBubbleError):
    """The requested quantity is not available on this domain variant."""


class AccuracyError(HBubbleError):
    """A series or quadrature could not meet the requested tolerance.

    Carries the achieved error bound in ``bound``.
    """

    def __init__(self, message, bound):
        super().__init__(f"{message} (achieved bound {bound:.3e})")
        self.bound = bound


class InvalidConfigurationError(HBubbleError):
    """A bubble configuration violates a manifold constraint.

    ``constraint`` names the violated bound.
    """

    def __init__(self, constraint, detail=""):
        msg = f"configuration constraint violated: {constraint}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.constraint = constraint


class DegenerateDatumError(HBubbleError):
    """The boundary datum's gradient vanishes where it must not."""


class NoInteriorCriticalScaleError(HBubbleError):
    """The datum term is nonpositive, so no interior optimal scale exists."""


class InvalidFieldError(HBubbleError):
    """A sampled field violates the zero-boundary-trace requirement."""


class SearchFailureError(HBubbleError):
    """Newton search diverged or left its box.

    ``trajectory`` holds the iterates visited before failure.
    """

    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


class CertificateFailureError(HBubbleError):
    """A degree-certificate boundary sample failed positivity.

    ``block`` is the bubble index, ``sample`` the offending point.
    """

    def __init__(self, block, sample, value):
        super().__init__(
            f"boundary positivity failed on block {block}: "
            f"<grad, chi - anchor> = {value:.3e}"
        )
        self.block = block
        self.sample = sample
        self.value = value
