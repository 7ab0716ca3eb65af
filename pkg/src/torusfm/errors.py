"""Exception hierarchy.

Validation-type problems (bad input data) and numerical failures are kept
apart so the CLI can map them onto distinct exit codes.
"""


class TorusFMError(Exception):
    """Base class for every error raised by torusfm."""


class ValidationError(TorusFMError):
    """Input data violates a structural contract."""


class NumericalFailure(TorusFMError):
    """A floating-point decision could not be made reliably."""


class DimensionError(ValidationError):
    pass


class InvalidAutomorphism(ValidationError):
    pass


class InvalidPresentation(ValidationError):
    pass


class NotInvariant(ValidationError):
    pass


class NotInIsotropy(ValidationError):
    pass


class InvalidBaseRep(ValidationError):
    pass


class InvalidMonodromy(ValidationError):
    pass


class InfeasibleStratum(ValidationError):
    pass


class OrbitOverflow(NumericalFailure):
    pass


class NotCommuting(NumericalFailure):
    pass


class SnapFailure(NumericalFailure):
    pass


class AmbiguousSnap(NumericalFailure):
    pass


class NotLocallyConstant(NumericalFailure):
    pass


class SamplingFailure(NumericalFailure):
    pass
