"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: configuration problems
exit with 2, numerical failures with 3, I/O failures with 4.
"""


class ConfigError(ValueError):
    """Invalid configuration value or malformed config file."""


class NumericalError(RuntimeError):
    """A numerical contract was violated (non-Hermitian result, failed
    eigendecomposition, non-real expectation value)."""


class PropagationError(NumericalError):
    """Time propagation produced a non-finite state.

    Carries the index of the offending step.
    """

    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step
