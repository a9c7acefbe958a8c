"""Exception taxonomy shared by the library and the command line front end.

Exit-code mapping used by the CLI:
  2 -> ValidationError, ParameterError, GenerationError (bad input / config)
  3 -> BudgetExceededError (instance too large for an exhaustive oracle)
  4 -> ContractViolationError (an internal guarantee failed; indicates a bug)
"""


class CongestionGameError(Exception):
    """Base class for all library errors."""


class ValidationError(CongestionGameError):
    """Malformed game, state, strategy index, or latency input."""


class ParameterError(CongestionGameError):
    """Solver parameters cannot be formed (e.g. instance too small for psi)."""


class BudgetExceededError(CongestionGameError):
    """An exhaustive enumeration would exceed the configured state budget."""


class ContractViolationError(CongestionGameError):
    """A bound that is supposed to be a theorem was breached at runtime."""


class GenerationError(CongestionGameError):
    """Random instance generation could not satisfy the requested shape."""
