"""Exception hierarchy for nhom_lab."""


class NhomLabError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(NhomLabError, ValueError):
    pass


class SupportViolation(InvalidInput):
    """Matrix entries fall outside the algebra's support pattern."""


class ShapeMismatch(InvalidInput):
    pass


class InvalidN(InvalidInput):
    pass


class IndexOutOfRange(InvalidInput, IndexError):
    pass


class UnsupportedStyle(InvalidInput):
    pass


class LambdaZero(InvalidInput):
    pass


class EvenN(InvalidInput):
    pass


class NonUnitalAlgebra(NhomLabError):
    pass


class NonUnitalDomain(NonUnitalAlgebra):
    pass


class NonDirectSumDomain(NhomLabError):
    pass


class BudgetExceeded(NhomLabError):
    """Exhaustive verification would exceed the tuple budget; use randomized mode."""


class NotNPotent(NhomLabError):
    pass


class NotSelfAdjoint(NhomLabError):
    pass


class NotInvolutive(NhomLabError):
    pass


class NotNHomomorphism(NhomLabError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotHomomorphism(NhomLabError):
    def __init__(self, message, index=None, witness=None):
        super().__init__(message)
        self.index = index
        self.witness = witness


class NotOrthogonal(NhomLabError):
    def __init__(self, message, indices=None, witness=None):
        super().__init__(message)
        self.indices = indices
        self.witness = witness


class ToleranceExceeded(NhomLabError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class VerificationFailed(ToleranceExceeded):
    pass
