"""Exception types shared across the simulator.

Exit-code mapping used by the CLI: ConfigError -> 2, InvariantViolation -> 3.
"""


class ConfigError(ValueError):
    """Raised when an experiment configuration is malformed or inconsistent."""


class InvariantViolation(RuntimeError):
    """Raised when a runtime contract is broken (non-simplex state, dropped-base
    selection, restart-count cap exceeded, ...)."""
