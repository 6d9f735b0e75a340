"""Exception hierarchy.  Each class maps to its own CLI exit code."""


class GameLabError(Exception):
    exit_code = 1


class ValidationError(GameLabError, ValueError):
    exit_code = 3


class SchemaMismatch(ValidationError):
    exit_code = 3


class BudgetExceeded(GameLabError):
    exit_code = 4

    def __init__(self, what: str, required: int, budget: int):
        super().__init__(f"{what}: requires {required} but budget is {budget} "
                         f"(set GAMELAB_BUDGET to raise it)")
        self.required = required
        self.budget = budget


class ZeroProbabilityError(GameLabError, ValueError):
    exit_code = 5


class CrossRatioError(GameLabError):
    """The channel violates the cross-ratio condition, so no product factorization exists."""

    exit_code = 6

    def __init__(self, z, a, a2, b, b2):
        super().__init__(f"cross-ratio violated at z={z!r}, a={a!r}, a'={a2!r}, b={b!r}, b'={b2!r}")
        self.witness = (z, a, a2, b, b2)


class SamplingError(GameLabError, RuntimeError):
    exit_code = 7
