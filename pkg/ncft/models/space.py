import math
from enum import Enum
from fractions import Fraction
from typing import Annotated, Optional, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, PlainSerializer, model_validator

from ncft.core.exceptions import InvalidSpec

INF = math.inf


def parse_exponent(value: Union[str, float, int]) -> float:
    """Parse an exponent in [1, inf]; accepts "inf", "∞", "4/3" and numbers."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "∞"):
            p = INF
        else:
            try:
                p = float(Fraction(text))
            except (ValueError, ZeroDivisionError) as e:
                raise ValueError(f"exponent '{value}' is not a number") from e
    else:
        p = float(value)
    if math.isnan(p) or p < 1:
        raise ValueError(f"exponent {value} must lie in [1, inf]")
    return p


def format_exponent(p: float) -> str:
    if math.isinf(p):
        return "inf"
    frac = Fraction(p).limit_denominator(64)
    if float(frac) == p and frac.denominator != 1:
        return f"{frac.numerator}/{frac.denominator}"
    if p == int(p):
        return str(int(p))
    return repr(p)


def conjugate_exponent(p: float) -> float:
    """p' with 1/p + 1/p' = 1; the endpoints are swapped exactly."""
    if p == 1:
        return INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def inverse_exponent(p: float) -> float:
    """1/p with 1/inf = 0."""
    return 0.0 if math.isinf(p) else 1.0 / p


def _serialize_exponent(p: float) -> Union[float, str]:
    return "inf" if math.isinf(p) else p


Exponent = Annotated[float, BeforeValidator(parse_exponent), PlainSerializer(_serialize_exponent)]


class SpaceKind(str, Enum):
    SCALAR = "scalar"
    SCHATTEN = "schatten"
    DIAGLP = "diaglp"


class OperatorSpaceDesc(BaseModel):
    """Value space E of functions and spectra.

    Schatten(m, q) is the m x m Schatten class; DiagLp(n, r) is the diagonal
    of Schatten(n, r) with the inherited matrix norms.
    """
    model_config = ConfigDict(frozen=True)

    kind: SpaceKind
    dim: int = 1
    exponent: Optional[Exponent] = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind == SpaceKind.SCALAR:
            if self.dim != 1:
                raise ValueError("scalar space has dim 1")
        else:
            if self.dim < 1:
                raise ValueError("dimension must be >= 1")
            if self.exponent is None:
                raise ValueError(f"{self.kind.value} space needs an exponent")
        return self

    @classmethod
    def scalar(cls) -> "OperatorSpaceDesc":
        return cls(kind=SpaceKind.SCALAR)

    @classmethod
    def schatten(cls, m: int, q: Union[float, str]) -> "OperatorSpaceDesc":
        return cls(kind=SpaceKind.SCHATTEN, dim=m, exponent=q)

    @classmethod
    def diag_lp(cls, n: int, r: Union[float, str]) -> "OperatorSpaceDesc":
        return cls(kind=SpaceKind.DIAGLP, dim=n, exponent=r)

    @classmethod
    def parse(cls, text: str) -> "OperatorSpaceDesc":
        """Parse "scalar", "schatten:m:q" or "diaglp:n:r"."""
        parts = [part.strip() for part in text.strip().lower().split(":")]
        try:
            if parts == ["scalar"]:
                return cls.scalar()
            if len(parts) == 3 and parts[0] in ("schatten", "diaglp"):
                return cls(kind=SpaceKind(parts[0]), dim=int(parts[1]), exponent=parts[2])
        except ValueError as e:
            raise InvalidSpec(f"bad space descriptor '{text}': {e}") from e
        raise InvalidSpec(
            f"bad space descriptor '{text}'; expected scalar, schatten:m:q or diaglp:n:r"
        )

    @property
    def label(self) -> str:
        if self.kind == SpaceKind.SCALAR:
            return "scalar"
        return f"{self.kind.value}:{self.dim}:{format_exponent(self.exponent)}"

    def dual(self) -> "OperatorSpaceDesc":
        if self.kind == SpaceKind.SCALAR:
            return self
        return OperatorSpaceDesc(kind=self.kind, dim=self.dim, exponent=conjugate_exponent(self.exponent))

    @property
    def value_shape(self) -> tuple[int, ...]:
        if self.kind == SpaceKind.SCALAR:
            return ()
        if self.kind == SpaceKind.SCHATTEN:
            return (self.dim, self.dim)
        return (self.dim,)

    @property
    def matrix_dim(self) -> int:
        """Side length of the matrix an E-value occupies in a flattened block."""
        return self.dim

    @property
    def vector_dim(self) -> int:
        """Dimension of E as a complex vector space."""
        if self.kind == SpaceKind.SCHATTEN:
            return self.dim * self.dim
        return self.dim
