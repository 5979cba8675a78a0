from pydantic import BaseModel
from typing import Any, List, Optional
from enum import Enum

from ncft.models.norms import NormSandwich
from ncft.models.space import Exponent

class VerdictStatus(str, Enum):
    verified = "verified"
    consistent = "consistent"
    violated = "violated"

class Verdict(BaseModel):
    """Sound reading of lhs <= rhs when both sides are only bracketed"""
    status: VerdictStatus
    lhs: NormSandwich
    rhs: NormSandwich
    margin: float

    @classmethod
    def compare(cls, lhs: NormSandwich, rhs: NormSandwich, slack: float = 1e-9) -> "Verdict":
        if lhs.upper <= rhs.lower * (1 + slack):
            status = VerdictStatus.verified
        elif lhs.lower > rhs.upper * (1 + slack):
            status = VerdictStatus.violated
        else:
            status = VerdictStatus.consistent
        return cls(status=status, lhs=lhs, rhs=rhs, margin=rhs.lower - lhs.upper)

    @classmethod
    def equality(cls, lhs: NormSandwich, rhs: NormSandwich, slack: float = 1e-9) -> "Verdict":
        """Both lhs <= rhs and rhs <= lhs; verified only when both directions are"""
        forward = cls.compare(lhs, rhs, slack)
        backward = cls.compare(rhs, lhs, slack)
        statuses = {forward.status, backward.status}
        if VerdictStatus.violated in statuses:
            status = VerdictStatus.violated
        elif statuses == {VerdictStatus.verified}:
            status = VerdictStatus.verified
        else:
            status = VerdictStatus.consistent
        return cls(status=status, lhs=lhs, rhs=rhs, margin=min(forward.margin, backward.margin))

class CheckResult(BaseModel):
    check: str
    group: Optional[str] = None
    space: Optional[str] = None
    p: Optional[Exponent] = None
    trials: int
    counts: dict[str, int]
    worst_margin: Optional[float] = None
    worst: Optional[Verdict] = None
    witness: Optional[Any] = None

    @property
    def violated(self) -> int:
        return self.counts.get(VerdictStatus.violated.value, 0)

class EstimateKind(str, Enum):
    type = "type"
    cotype = "cotype"

class ConstantEstimate(BaseModel):
    """Certified lower bound on a truncated Fourier type or cotype constant"""
    kind: EstimateKind
    group: str
    space: str
    p: Exponent
    value: float
    level: int
    trials: int
    per_level: List[float] = []
    evaluations: int = 0
    budget_exhausted: bool = False
    witness: Optional[Any] = None

class BoundFinding(BaseModel):
    estimate: int
    rule: str
    bound: float
    value: float
    flagged: bool
    conditional: bool = False

class DualityPair(BaseModel):
    group: str
    p: Exponent
    type_space: str
    type_value: float
    cotype_space: str
    cotype_value: float

class BoundsReport(BaseModel):
    findings: List[BoundFinding] = []
    duality_pairs: List[DualityPair] = []
    flagged: int = 0
