"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: validation problems (bad channel
files, bad parameters) exit 2, I/O problems exit 3, evaluation failures
(non-convergence, infeasible searches, impossible decodes) exit 4.
"""


class TwrcError(Exception):
    """Base class for all package-specific errors."""


class SpecError(TwrcError, ValueError):
    """Base class for channel-specification problems."""


class SpecParseError(SpecError):
    """The channel document is not well-formed (syntax, missing keys)."""


class SpecValidationError(SpecError):
    """The channel document parses but violates a stochasticity or
    dimension constraint.  The message names the offending row/field."""


class EnumerationRefusedError(SpecError):
    """Alphabets too large for exhaustive restriction enumeration."""


class FieldConstructionError(SpecError):
    """Invalid finite-field parameters (non-prime p, order above cap)."""


class CandidateCapError(TwrcError, ValueError):
    """A requested exhaustive search exceeds the candidate-space cap."""


class InsufficientTrialsError(TwrcError, ValueError):
    """Too few samples for a valid chi-squared test (expected cell < 5)."""


class EvaluationError(TwrcError, RuntimeError):
    """Base class for runtime evaluation failures."""


class NonConvergenceError(EvaluationError):
    """An iterative optimizer hit its iteration cap before reaching tol."""


class NoFeasiblePointError(EvaluationError):
    """A constrained search found no feasible point in any restart."""


class DecodeImpossibleError(EvaluationError):
    """Every candidate codeword has zero likelihood for the received
    sequence."""
