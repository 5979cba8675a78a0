"""Error types raised by ncft services.

Validation operations never raise these; they return reports instead.
"""


class NcftError(Exception):
    """Base class for every error the library raises on purpose"""


class InvalidSpec(NcftError):
    """Unsupported group family, parameter out of range or malformed descriptor"""


class InvalidTable(NcftError):
    """Multiplication table failed a group axiom"""

    def __init__(self, message: str, failures: list[str] | None = None):
        super().__init__(message)
        self.failures = failures or []


class UnsupportedFamily(NcftError):
    """No closed-form irreps for this group; use the numeric decomposition"""


class DecompositionStalled(NcftError):
    """Regular representation could not be split at the requested tolerance"""


class ToleranceInvalid(NcftError):
    pass


class NonFiniteEntries(NcftError):
    pass


class ShapeMismatch(NcftError):
    pass


class UnsupportedSpace(NcftError):
    """Operator space or exponent combination outside the norm engine's tiers"""


class OptimizerBudgetExhausted(NcftError):
    """Raised only in strict mode; otherwise sandwiches carry a flag"""


class GroupMismatch(NcftError):
    pass


class BudgetExhausted(NcftError):
    """Raised only in strict mode; otherwise estimates carry a flag"""


class UsageError(NcftError):
    """Command line could not be parsed"""


class InvalidFile(NcftError):
    """Input file is not valid JSON or lacks a required field"""


class SandwichInverted(NcftError):
    """A certified lower bound exceeded the upper bound beyond SANDWICH_SLACK"""
