from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator, model_validator

SCHEMA_VERSION = 1

Status = Literal["PASS", "FAIL"]
CheckStatus = Literal["PASS", "FAIL", "SKIP"]


class SlopeModel(BaseModel):
    num: int = Field(description="Numerator of the slope")
    den: int = Field(default=1, description="Denominator of the slope")
    mult: int = Field(description="Multiplicity")

    @field_validator("den")
    @classmethod
    def _positive_den(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("denominator must be positive")
        return v


class FieldElementModel(BaseModel):
    valuation: str = Field(description='Valuation as "a/b", or "inf" for zero')
    unit: list[list[int]] = Field(
        default_factory=list,
        description="Unit part: outer index is the pi-digit, inner the z-coefficients",
    )


# A matrix entry is an int, a string ("p^k", "2*z + 1", "1/3") or a field element dict.
MatrixEntry = int | str | FieldElementModel


class IsocrystalModel(BaseModel):
    p: int = Field(description="The prime")
    s: int = Field(default=1, description="Definition degree of b")
    m: int | None = Field(default=None, description="Degree of the working field")
    N: int | None = Field(default=None, description="Precision in p-digits")
    n: int | None = Field(default=None, description="Dimension")
    b: list[list[MatrixEntry]] | None = Field(default=None, description="The matrix b")
    slopes: list[SlopeModel] | None = Field(
        default=None, description="Build the standard form of this Newton point instead of b"
    )
    frame: list[list[MatrixEntry]] | None = Field(
        default=None, description="Optional g with b = g b_std sigma(g)^-1"
    )

    @model_validator(mode="after")
    def _b_or_slopes(self) -> IsocrystalModel:
        if (self.b is None) == (self.slopes is None):
            raise ValueError('exactly one of "b" and "slopes" must be given')
        if self.b is not None:
            if not self.b or any(len(row) != len(self.b) for row in self.b):
                raise ValueError("b must be a non-empty square matrix")
            if self.n is not None and self.n != len(self.b):
                raise ValueError(f"n={self.n} does not match b of size {len(self.b)}")
        return self


class NormModel(BaseModel):
    basis: list[list[MatrixEntry]] | None = Field(
        default=None, description="Basis matrix, columns are the basis vectors (default identity)"
    )
    exponents: list[str | int] = Field(description="Exponents c_i with alpha(B_i) = p^-c_i")


class LatticeModel(BaseModel):
    basis: list[list[MatrixEntry]] = Field(description="Basis matrix, columns span the lattice")
    provenance: str | None = Field(default=None, description="How the lattice was produced")


class MinPointModel(BaseModel):
    offsets: list[str | int] = Field(description="Base exponent t for each simple block")


class InstanceModel(BaseModel):
    """An input file: the isocrystal plus optional operands."""

    isocrystal: IsocrystalModel
    norm: NormModel | None = None
    params: MinPointModel | None = None
    lattices: list[LatticeModel] | None = None


class RunConfig(BaseModel):
    prime: int | None = Field(default=None, description="Override the instance prime")
    degree: int | None = Field(default=None, description="Degree m of the working field")
    precision: int = Field(default=40, description="Precision N in p-digits")
    seed: int = Field(default=0, description="Seed of the sample streams")
    denominator_cap: int = Field(default=12, description="Largest exponent denominator")
    samples: int = Field(default=200, description="Samples per scan")
    radius: int = Field(default=1, description="Enumeration radius for crystals")
    suite: str | None = Field(default=None, description="Verification suite")
    workers: int = Field(default=4, description="Concurrent scan workers")
    input: str | None = Field(default=None, description="Input JSON path, '-' for stdin")
    output: str | None = Field(default=None, description="Output JSON path, stdout if unset")
    level: str = Field(default="WARNING", description="Logging level")
    filter: str = Field(default=".", description="jq filter applied to the output")

    @field_validator("precision")
    @classmethod
    def _min_precision(cls, v: int) -> int:
        if v < 4:
            raise ValueError(f"precision {v} is below the minimum of 4")
        return v

    @field_validator("denominator_cap", "workers", "degree")
    @classmethod
    def _positive(cls, v: int | None) -> int | None:
        if v is not None and v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("samples", "radius")
    @classmethod
    def _non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("must be >= 0")
        return v


class CheckResult(BaseModel):
    name: str = Field(description="Check name")
    status: CheckStatus = Field(description="PASS, FAIL, or SKIP when there is nothing to check")
    detail: str = Field(default="", description="Human-readable summary")
    witness: Any = Field(default=None, description="Serialized counterexample for a FAIL")

    @property
    def passed(self) -> bool:
        """PASS or SKIP."""
        return self.status != "FAIL"


class ScanRecord(BaseModel):
    index: int
    exponents: list[str]
    jittered: bool
    displacement_sq: str
    in_min: bool
    bound_sq: str | None = None
    ratio: str | None = None


class ScanReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    seed: int
    samples: int
    min_nu_sq: str = Field(description="Squared length of the Newton vector")
    min_displacement_sq: str = Field(description="Smallest observed displacement squared")
    kappa_sq: str | None = Field(
        default=None,
        description="Empirical kappa squared: least displacement^2 / dist^2-upper-bound",
    )
    metric_convention: str
    status: Status
    checks: list[CheckResult] = Field(default_factory=list)
    records: list[ScanRecord] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


class VerificationReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    suite: str
    instance: dict = Field(default_factory=dict, description="Instance summary and hash")
    seed: int
    metric_convention: str
    checks: list[CheckResult] = Field(default_factory=list)
    status: Status

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    @classmethod
    def from_checks(cls, checks: list[CheckResult], **kwargs) -> VerificationReport:
        status: Status = "PASS" if all(c.passed for c in checks) else "FAIL"
        return cls(checks=checks, status=status, **kwargs)
