from pydantic import BaseModel, model_validator
from enum import Enum

from ncft.core.config import settings

class NormMethod(str, Enum):
    exact = "exact"
    fubini = "fubini"
    factorization_dual = "factorization+dual"

METHOD_RANK = {NormMethod.exact: 0, NormMethod.fubini: 1, NormMethod.factorization_dual: 2}

class NormSandwich(BaseModel):
    """Certified bracket lower <= true norm <= upper, with a point estimate inside"""
    lower: float
    estimate: float
    upper: float
    method: NormMethod
    restarts_used: int = 0
    budget_exhausted: bool = False

    @model_validator(mode="after")
    def _ordered(self):
        slack = settings.SANDWICH_SLACK * max(1.0, abs(self.upper))
        if self.lower < 0 or not (self.lower - slack <= self.estimate <= self.upper + slack):
            raise ValueError(f"unordered sandwich {self.lower} <= {self.estimate} <= {self.upper}")
        return self

    @classmethod
    def exact(cls, value: float, method: NormMethod = NormMethod.exact) -> "NormSandwich":
        value = float(value)
        return cls(lower=value, estimate=value, upper=value, method=method)

    @property
    def is_exact(self) -> bool:
        return self.method != NormMethod.factorization_dual
