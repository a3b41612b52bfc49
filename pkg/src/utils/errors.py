"""
Exception hierarchy for the percolation lab.

Every error carries a short ``code`` that the command-line front end and the
reports use verbatim. Subclasses also derive from the builtin the rest of the
code base raises (ValueError / RuntimeError), so callers catching builtins keep
working.
"""

from typing import List, Optional, Tuple


class CoxPercError(Exception):
    """Base class for all coxperc errors."""

    code = "ERROR"

    def __init__(self, message: str, code: Optional[str] = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def __str__(self) -> str:
        return f"[{self.code}] {super().__str__()}"


class ConfigError(CoxPercError, ValueError):
    """Invalid or unknown configuration key."""

    code = "CONFIG"

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class ParameterValidationError(CoxPercError, ValueError):
    """
    Model parameters violate one or more validity rules.

    Attributes:
        violations: List of ``(code, message)`` pairs, one per violated rule
    """

    code = "INVALID_PARAMS"

    def __init__(self, violations: List[Tuple[str, str]]):
        self.violations = list(violations)
        message = "; ".join(f"{code}: {msg}" for code, msg in self.violations)
        super().__init__(message, code=self.violations[0][0] if self.violations else None)

    @property
    def codes(self) -> List[str]:
        return [code for code, _ in self.violations]


class DegenerateInputError(CoxPercError, ValueError):
    code = "DEGENERATE_INPUT"


class EmptySetError(CoxPercError, ValueError):
    code = "EMPTY_SET"


class EmptySupportError(CoxPercError, ValueError):
    code = "EMPTY_SUPPORT"


class VariantMismatchError(CoxPercError, ValueError):
    code = "VARIANT_MISMATCH"


class ScaleMismatchError(CoxPercError, ValueError):
    code = "SCALE_MISMATCH"


class MarkRangeError(CoxPercError, ValueError):
    code = "RANGE"


class OutOfWindowError(CoxPercError, ValueError):
    code = "OUT_OF_WINDOW"


class WindowTooSmallError(CoxPercError, ValueError):
    code = "WINDOW_TOO_SMALL"


class RegionsOverlapError(CoxPercError, ValueError):
    code = "REGIONS_OVERLAP"


class CrossingIndexError(CoxPercError, ValueError):
    """Crossing index below the smallest evaluated scale."""

    code = "BAD_N"


class BadExplorationIndexError(CoxPercError, ValueError):
    code = "BAD_M"


class NoSignChangeError(CoxPercError, RuntimeError):
    code = "NO_SIGN_CHANGE"


class SampleSizeError(CoxPercError, ValueError):
    code = "N_TOO_SMALL"


class BadHeaderError(CoxPercError, ValueError):
    code = "BAD_HEADER"
