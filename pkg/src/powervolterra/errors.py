class SolverError(ArithmeticError):
    """The explicit iteration produced a nonpositive or non-finite right-hand side."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class IntegrationError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""
