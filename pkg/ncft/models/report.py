from pydantic import BaseModel
from typing import Any, Dict, List, Optional

from ncft.models.space import Exponent
from ncft.models.verdict import BoundsReport, CheckResult, ConstantEstimate, EstimateKind

ALL_CHECKS = ["plancherel", "parseval", "hy", "invhy", "linf-l1", "holder", "minkowski"]

class RunConfig(BaseModel):
    command: str
    flags: Dict[str, Any] = {}
    seed: int = 0
    threads: int = 1
    tolerances: Dict[str, float] = {}
    outputs: Dict[str, Optional[str]] = {}

class SuiteConfig(BaseModel):
    """Grid driven by suite_all; an empty group list gives an empty report"""
    groups: List[str] = ["Z4", "S3", "D4", "Q8"]
    exponents: List[Exponent] = [1.0, 4 / 3, 2.0]
    spaces: List[str] = ["scalar", "schatten:2:2"]
    checks: List[str] = ALL_CHECKS
    estimates: List[EstimateKind] = [EstimateKind.type, EstimateKind.cotype]
    trials: int = 100
    estimate_trials: int = 8
    level: int = 1
    budget: int = 40
    seed: int = 0

class Report(BaseModel):
    version: str
    config: RunConfig
    checks: List[CheckResult] = []
    estimates: List[ConstantEstimate] = []
    bounds: Optional[BoundsReport] = None
    errors: List[str] = []
    timing: Dict[str, float] = {}

    @property
    def violated(self) -> int:
        return sum(check.violated for check in self.checks)

    def exit_code(self) -> int:
        if self.violated or (self.bounds and self.bounds.flagged):
            return 2
        if self.errors:
            return 1
        return 0
