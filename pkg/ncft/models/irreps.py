from pydantic import BaseModel
from typing import List

class IrrepValidationReport(BaseModel):
    """Worst-case residual per IrrepTable invariant, with pass/fail at its tolerance"""
    group: str
    degrees: List[int]
    residuals: dict[str, float]
    tolerances: dict[str, float]
    checks: dict[str, bool]
    failures: List[str] = []
    passed: bool
