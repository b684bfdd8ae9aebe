from typing import Any, Optional


class TakagiError(Exception):
    """Base class for all errors raised by the library"""


class DomainError(TakagiError, ValueError):
    """Invalid parameter, argument outside a theorem's range, or empty input"""


class PrecisionError(TakagiError):
    """Requested accuracy cannot be certified at the working mantissa width"""

    def __init__(self, message: str, mantissa_bits: Optional[int] = None):
        super().__init__(message)
        self.mantissa_bits = mantissa_bits


class ResourceError(TakagiError):
    """
    Search budget exhausted before the requested tolerance was met

    Args:
        message: Human readable reason
        best_so_far: Partial result available when the budget ran out
    """

    def __init__(self, message: str, best_so_far: Any = None):
        super().__init__(message)
        self.best_so_far = best_so_far


class ConsistencyError(TakagiError):
    """An observed sign or residual contradicts a proven lemma"""
