class DomainError(ValueError):
    """An input outside the studied family of spaces.

    ``code`` is one of OUT_OF_RANGE, NON_GENERIC, K_ONE_UNSUPPORTED,
    K_TOO_LARGE, DEGREE, FUNCTIONAL.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class BudgetExceeded(RuntimeError):
    """A brute-force computation was asked to run past its size guard."""
