"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes (input error 1, inconclusive 2,
singularity 3); the HTTP service maps them onto status codes.
"""


class InputError(ValueError):
    """Malformed user input: bad expression text, bad spec file, bad field."""


class ExprSyntaxError(InputError):
    """Expression text failed to parse.  Carries a byte offset into the text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ExprSyntaxError):
    pass


class UnknownFunctionError(ExprSyntaxError):
    pass


class EvaluationError(ArithmeticError):
    """Evaluation hit a domain violation (division by zero, log of a
    nonpositive value, sqrt of a negative, fractional power of a negative)."""


class ContextMismatchError(InputError):
    """Operands built over different variable lists."""


class DegreeError(InputError):
    """Operation applied to a form of an unsupported degree."""


class InconclusiveZeroTest(RuntimeError):
    """Every sample point was excluded, so the zero test decided nothing."""


class SingularIntegrandError(ArithmeticError):
    """A quadrature node produced a non-finite integrand value."""

    def __init__(self, message: str, at_parameter=None):
        super().__init__(message)
        self.at_parameter = at_parameter


class CurveProximityError(SingularIntegrandError):
    """Two chains pass too close together for the linking integrand."""

    def __init__(self, message: str, min_distance: float):
        super().__init__(message)
        self.min_distance = min_distance
