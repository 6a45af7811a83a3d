"""Exceções do verificador."""


class VerificationError(Exception):
    """Base class of every error raised by the verification engine."""


class TrigClash(VerificationError):
    """Both factors of a product carry a cos/sin factor."""

    def __init__(self, left, right):
        self.left = left
        self.right = right
        super().__init__(f"both factors carry a trig part: {left} and {right}")


class Unclassifiable(VerificationError):
    """A monomial outside the ten basis families."""

    def __init__(self, monomial, rendering: str):
        self.monomial = monomial
        self.rendering = rendering
        super().__init__(f"monomial {rendering} is not the integrand of any basis family")


class UnknownClaim(VerificationError, KeyError):

    def __init__(self, claim_id: str):
        self.claim_id = claim_id
        super().__init__(claim_id)

    def __str__(self):
        return f"unknown claim id: {self.claim_id!r}"


class CancellationFailure(VerificationError):
    """The reduced constant is not exactly (1/sqrt2)*p1."""

    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"cancellation failed, residual: {residual}")


class NonConvergence(VerificationError):

    def __init__(self, message: str, estimate: float = float("nan"), depth: int = 0):
        self.estimate = estimate
        self.depth = depth
        super().__init__(f"{message} (depth {depth}, last difference {estimate:.3e})")


class ExpressionSyntaxError(VerificationError, ValueError):

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownFamily(ExpressionSyntaxError):
    pass


class NonPositiveIndex(ExpressionSyntaxError):
    pass


class FixtureError(VerificationError):
    pass


class AnomalyError(VerificationError):
    """A coefficient of log2-degree >= 2 showed up inside the computation."""
