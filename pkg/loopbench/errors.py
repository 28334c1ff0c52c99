"""Custom exceptions and CLI error mapping for loopbench."""

import logging
from typing import Optional

logger = logging.getLogger("loopbench")


class InvalidInput(Exception):
    """Raised when an argument violates an operation's precondition."""

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(f"Invalid input: {detail}")


class BudgetExceeded(Exception):
    """Raised when a computation would exceed a configured size budget."""

    def __init__(self, kind: str, required: int, limit: int, frontier: Optional[int] = None):
        self.kind = kind
        self.required = required
        self.limit = limit
        self.frontier = frontier
        message = f"{kind} budget exceeded: need {required}, limit {limit}"
        if frontier is not None:
            message += f" (frontier size {frontier})"
        super().__init__(message)


class HypothesisError(Exception):
    """Raised when a named hypothesis of a loop theorem does not hold."""

    def __init__(self, hypothesis: str, detail: str):
        self.hypothesis = hypothesis
        self.detail = detail
        super().__init__(f"Hypothesis '{hypothesis}' failed: {detail}")


class CorollaryViolation(Exception):
    """Raised when eval_f cannot find the local maxima the construction promises.

    Only reachable with reduced parameters.
    """

    def __init__(self, corollary: str, word: tuple, detail: str):
        self.corollary = corollary
        self.word = tuple(word)
        self.detail = detail
        super().__init__(f"Corollary '{corollary}' violated: {detail}")


class VerificationFailed(Exception):
    """Raised when an internal identity or re-evaluation does not hold."""

    def __init__(self, check: str, detail: str):
        self.check = check
        self.detail = detail
        super().__init__(f"Verification '{check}' failed: {detail}")


class ParseError(Exception):
    """Raised when an input file is malformed."""

    def __init__(self, path: str, position: str, detail: str):
        self.path = path
        self.position = position
        self.detail = detail
        super().__init__(f"{path}:{position}: {detail}")


_ERROR_CODES = [
    (InvalidInput, "INVALID_INPUT", 1),
    (BudgetExceeded, "BUDGET_EXCEEDED", 1),
    (HypothesisError, "HYPOTHESIS_FAILED", 1),
    (CorollaryViolation, "COROLLARY_VIOLATION", 2),
    (VerificationFailed, "VERIFICATION_FAILED", 2),
    (ParseError, "PARSE_ERROR", 1),
]


def error_code(exc: BaseException) -> str:
    for cls, code, _ in _ERROR_CODES:
        if isinstance(exc, cls):
            return code
    return "INTERNAL_ERROR"


def exit_status(exc: BaseException) -> int:
    """CLI exit status for an exception: 2 for property violations, 1 otherwise."""
    for cls, _, status in _ERROR_CODES:
        if isinstance(exc, cls):
            return status
    logger.error("Unhandled error: %r", exc)
    return 1
