"""Exception hierarchy shared across the package.

Two branches matter to callers: ``ValidationFailure`` (bad inputs, CLI exit
code 2) and ``NumericalFailure`` (a fit or estimator broke down, exit code 3).
"""


class EcaugError(Exception):
    """Base class for all package errors."""


class ValidationFailure(EcaugError):
    """Input data or configuration is invalid."""


class NumericalFailure(EcaugError):
    """A numerical procedure failed or hit a degeneracy."""


class InvalidRow(ValidationFailure):
    def __init__(self, index, reason):
        self.index = index
        self.reason = reason
        super().__init__(f"row {index}: {reason}")


class ParseError(ValidationFailure):
    def __init__(self, line, column, reason=""):
        self.line = line
        self.column = column
        msg = f"line {line}, column {column!r}"
        super().__init__(f"{msg}: {reason}" if reason else msg)


class RankDeficient(NumericalFailure):
    def __init__(self, smallest_singular_value):
        self.smallest_singular_value = smallest_singular_value
        super().__init__(
            f"design is rank deficient (smallest singular value {smallest_singular_value:.3e})"
        )


class Separation(NumericalFailure):
    def __init__(self, detail="fitted probabilities degenerate"):
        super().__init__(f"logistic fit separated: {detail}")


class NoConvergence(NumericalFailure):
    def __init__(self, max_iter):
        self.max_iter = max_iter
        super().__init__(f"IRLS did not converge in {max_iter} iterations")


class DimensionMismatch(ValidationFailure):
    pass


class OverlapViolation(NumericalFailure):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"propensity {value:.3e} outside tolerated range at row {index}")


class DegenerateResiduals(NumericalFailure):
    pass


class EmptyCell(ValidationFailure):
    def __init__(self, z, a):
        self.z = z
        self.a = a
        super().__init__(f"no subjects in cell (z={z}, a={a})")


class DegenerateDenominator(NumericalFailure):
    pass


class TooManyFailures(NumericalFailure):
    def __init__(self, failed, total):
        self.failed = failed
        self.total = total
        super().__init__(f"{failed} of {total} bootstrap replicates failed")


class BracketFailure(NumericalFailure):
    pass
