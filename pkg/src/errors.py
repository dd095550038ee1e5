"""Exception hierarchy for fbm-variations."""

from typing import Any, Dict, Optional


class FbmVarError(Exception):
    """Base error. Subclasses add structured context for JSON reporting."""

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, **self.context}


class ConfigError(FbmVarError):
    """Invalid user configuration; names the offending flag."""

    def __init__(self, message: str, flag: Optional[str] = None):
        super().__init__(message, flag=flag)
        self.flag = flag


class RegimeError(FbmVarError):
    """Operation requested outside its (q, H) regime, or at the boundary H = 1 - 1/(2q)."""


class SynthesisError(FbmVarError):
    """Exact Gaussian synthesis failed (covariance not numerically PSD)."""


class DegenerateFit(FbmVarError):
    """Log-log slope fit impossible (zero distances or too few points)."""


class NoConvergence(FbmVarError):
    """No admissible moment order yields a finite truncation bound."""


class BudgetExceeded(FbmVarError):
    """Requested epsilon is too small for the configured desk-scale budget."""

    def __init__(self, message: str, n_trunc: int, replicas_needed: int, budget: int):
        super().__init__(
            message, n_trunc=n_trunc, replicas_needed=replicas_needed, budget=budget
        )
        self.n_trunc = n_trunc
        self.replicas_needed = replicas_needed
        self.budget = budget


class ReferenceSampleError(FbmVarError):
    """Reference sample file is corrupt or does not match the request."""
