"""Exception types shared across the library."""


class ParameterError(ValueError):
    """Invalid parameter or structural constraint violation."""


class RankDeficiencyError(ParameterError):
    """Input matrix is numerically rank deficient.

    Carries the measured numerical rank in ``numerical_rank``.
    """

    def __init__(self, message, numerical_rank):
        super().__init__(message)
        self.numerical_rank = numerical_rank


class FormatError(ValueError):
    """Malformed file content (sketch files, Matrix Market, JSON configs)."""
