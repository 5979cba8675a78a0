from pydantic import BaseModel, ConfigDict, model_validator
from typing import List, Optional, Tuple
from enum import Enum

MAX_CYCLIC = 120
MAX_DIHEDRAL = 60
MAX_SYMMETRIC = 5
MAX_ORDER = 1024

class GroupFamily(str, Enum):
    cyclic = "cyclic"
    dihedral = "dihedral"
    quaternion8 = "quaternion8"
    symmetric = "symmetric"
    product = "product"
    table = "table"

class GroupSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: GroupFamily
    n: Optional[int] = None
    factors: Tuple["GroupSpec", ...] = ()
    path: Optional[str] = None

    @model_validator(mode="after")
    def _check_parameters(self):
        family = self.family
        if family == GroupFamily.cyclic and not (self.n and 1 <= self.n <= MAX_CYCLIC):
            raise ValueError(f"cyclic(n) needs 1 <= n <= {MAX_CYCLIC}")
        if family == GroupFamily.dihedral and not (self.n and 1 <= self.n <= MAX_DIHEDRAL):
            raise ValueError(f"dihedral(n) needs 1 <= n <= {MAX_DIHEDRAL}")
        if family == GroupFamily.symmetric and not (self.n and 1 <= self.n <= MAX_SYMMETRIC):
            raise ValueError(f"symmetric(n) needs 1 <= n <= {MAX_SYMMETRIC}")
        if family == GroupFamily.product:
            if len(self.factors) != 2:
                raise ValueError("product needs exactly two factors")
            if self.expected_order and self.expected_order > MAX_ORDER:
                raise ValueError(f"product order exceeds {MAX_ORDER}")
        if family == GroupFamily.table and not self.path:
            raise ValueError("table source needs a file path")
        return self

    @property
    def expected_order(self) -> Optional[int]:
        """Order implied by the spec; None for table sources."""
        if self.family == GroupFamily.cyclic:
            return self.n
        if self.family == GroupFamily.dihedral:
            return 2 * self.n
        if self.family == GroupFamily.quaternion8:
            return 8
        if self.family == GroupFamily.symmetric:
            order = 1
            for k in range(2, self.n + 1):
                order *= k
            return order
        if self.family == GroupFamily.product:
            left, right = (factor.expected_order for factor in self.factors)
            return left * right if left and right else None
        return None

    @property
    def label(self) -> str:
        if self.family == GroupFamily.cyclic:
            return f"Z{self.n}"
        if self.family == GroupFamily.dihedral:
            return f"D{self.n}"
        if self.family == GroupFamily.quaternion8:
            return "Q8"
        if self.family == GroupFamily.symmetric:
            return f"S{self.n}"
        if self.family == GroupFamily.product:
            return f"product({self.factors[0].label},{self.factors[1].label})"
        return f"table:{self.path}"

class TableValidationReport(BaseModel):
    passed: bool
    checks: dict[str, bool]
    failures: List[str] = []
    identity: Optional[int] = None
