from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not-applicable"
    INCONCLUSIVE = "inconclusive"


class EntropyReport(BaseModel):
    """
    Length sequence of one dynamical system and its entropy estimates.
    The serialized keys are the documented JSON report schema of `lad entropy`;
    the base length (n = 0) is kept for inspection but not serialized.
    """

    ideal: str = Field(..., description="Generators of the primary ideal q")
    n: List[int] = Field(..., description="Iterate indices 1..n_max")
    length: List[int] = Field(..., description="lambda_n = colength of I + phi^n(q)")
    naive: List[float] = Field(..., description="(1/n) log lambda_n")
    fekete: List[float] = Field(..., description="Running minimum of the naive estimates")
    ratio: List[float] = Field(..., description="log(lambda_{n+1} / lambda_n)")
    headline: float = Field(..., description="Last ratio estimate, or the naive one when n_max = 1")
    exact_ratio: Optional[int] = Field(
        default=None, description="k when every observed ratio lambda_{n+1}/lambda_n equals k"
    )
    base_length: Optional[int] = Field(default=None, exclude=True, description="lambda_0")

    @property
    def exact_form(self) -> Optional[str]:
        if self.exact_ratio is None:
            return None
        if self.exact_ratio == 1:
            return "0"
        return f"log {self.exact_ratio}"


class EntropyDecomposition(BaseModel):
    """h(psi) against h(phi) + h(psi-bar), each from its headline estimate."""

    target: float = Field(..., description="Headline estimate for the target endomorphism")
    source: float = Field(..., description="Headline estimate for the source endomorphism")
    fiber: float = Field(..., description="Headline estimate for the induced fiber endomorphism")
    total: float = Field(..., description="source + fiber")
    gap: float = Field(..., description="target - total")


class FlatnessReport(BaseModel):
    """Advisory flatness checks; never a flatness certificate."""

    map: str
    d: int = Field(..., ge=0, description="dim R")
    d_prime: int = Field(..., ge=0, description="dim S/f(m)S")
    target_dim: int = Field(..., ge=0, description="dim S")
    dimension_check: CheckStatus
    pattern_check: CheckStatus
    method: Optional[str] = Field(default=None, description="regular-sequence or dimension-drop")
    detail: Optional[str] = None


class AdditivityRow(BaseModel):
    n: int = Field(..., ge=0)
    lhs: int = Field(..., ge=0, description="length S/psi^n(Q)S")
    rhs_factor_r: int = Field(..., ge=0, description="length R/phi^n(q)R")
    rhs_factor_fiber: int = Field(..., ge=0, description="length S/[f(m)S + psi^n(q')S]")
    passed: bool


class AdditivityCheck(BaseModel):
    map: str
    q: str
    q_prime: str
    big_q: str = Field(..., description="Generators of q' together with f(q)")
    n_max: int = Field(..., gt=0)
    rows: List[AdditivityRow]
    flatness: FlatnessReport
    target_entropy: EntropyReport
    source_entropy: EntropyReport
    fiber_entropy: EntropyReport
    decomposition: EntropyDecomposition

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)


class InequalityRow(BaseModel):
    n: int = Field(..., ge=1)
    lhs: int = Field(..., ge=0, description="lambda_n(S, m_S)")
    source_length: int = Field(..., ge=0, description="lambda_n(R, m_R)")
    fiber_factor: int = Field(..., ge=0, description="length S/[f(m)S + psi^n(m_S)S]")
    bound: int = Field(..., ge=0, description="source_length * fiber_factor")
    passed: bool


class InequalityReport(BaseModel):
    map: str
    n_max: int = Field(..., gt=0)
    rows: List[InequalityRow]
    target_entropy: EntropyReport
    source_entropy: EntropyReport
    fiber_entropy: EntropyReport
    decomposition: EntropyDecomposition

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)


class CheckItem(BaseModel):
    kind: str = Field(..., description="ring, endo or map")
    name: str
    status: CheckStatus
    detail: Optional[str] = None


class CheckReport(BaseModel):
    fixture: str
    items: List[CheckItem] = Field(default_factory=list)
    flatness: List[FlatnessReport] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(item.status != CheckStatus.FAIL for item in self.items)


class LengthReport(BaseModel):
    ring: str
    ideal: str
    length: int = Field(..., ge=0)
    method: str = Field(default="groebner", description="groebner or oracle")


class DimensionReport(BaseModel):
    ring: str
    dimension: int = Field(..., ge=0)
