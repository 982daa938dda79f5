# quotatope/schemas/requests.py

from math import log
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator


class OutputOptions(BaseModel):
    """Where and how a command writes its datasets."""
    out: Path = Path("results")
    format: Literal["csv", "json"] = "csv"
    svg: bool = False


class SeqRequest(OutputOptions):
    """Request model for sequence complex tables."""
    kind: Literal["primes", "squares", "cubes"]
    q_max: int = Field(ge=3, le=200_000)
    i_max: int = Field(ge=0, le=64)
    fit_q_max: Optional[int] = Field(default=None, ge=3)


class EulerRequest(OutputOptions):
    """Request model for χ(Prime(q)) sweeps."""
    q_max: int = Field(ge=3, le=50_000)
    method: Literal["dp", "enumerate"] = "dp"


class LogPrimeRequest(OutputOptions):
    """Request model for the LogPrime growth diagnostic."""
    q_lo: float = Field(gt=0)
    q_hi: Optional[float] = Field(default=None, gt=0)
    n_max: Optional[int] = Field(default=None, ge=2)
    samples: int = Field(default=6276, ge=2, le=10_000_000)
    slope: float = Field(default=0.55, gt=0)
    anchor: Literal["first", "calibrated"] = "first"
    full_range: bool = False

    @model_validator(mode="after")
    def check_range(self) -> "LogPrimeRequest":
        if self.q_hi is not None and self.q_hi <= self.q_lo:
            raise ValueError(f"q_hi = {self.q_hi} must exceed q_lo = {self.q_lo}")
        if self.q_hi is None and self.n_max is not None and log(self.n_max + 1) <= self.q_lo:
            raise ValueError(f"n_max = {self.n_max} leaves no quota above q_lo = {self.q_lo}")
        return self


class DivisorRequest(OutputOptions):
    """Request model for the divisor complex scan."""
    n_min: int = Field(default=2, ge=2)
    n_max: int = Field(ge=3)
    parity: Literal["all", "odd", "even"] = "all"
    signatures: bool = True
    all_n: bool = False

    @model_validator(mode="after")
    def check_range(self) -> "DivisorRequest":
        if self.n_max <= self.n_min:
            raise ValueError(f"n_max = {self.n_max} must exceed n_min = {self.n_min}")
        return self


class SeriesRequest(OutputOptions):
    """Request model for power series examples."""
    example: Literal["count", "lehmer", "prime", "partitions", "tau"]
    degree: int = Field(ge=3, le=20_000)
    copies: int = Field(default=1, ge=1, le=1_000)


class DensityDescriptor(BaseModel):
    kind: Literal["uniform", "triangular", "table"]
    params: Dict[str, Any]


class RandomSpecFile(BaseModel):
    """Contents of a random quota complex spec file."""
    m: float = Field(gt=0)
    densities: List[DensityDescriptor] = Field(min_length=1)
    q_grid: List[float] = Field(min_length=1)
    trials: int = Field(default=10_000, ge=1)
    seed: int = Field(default=0, ge=0)


class RandomRequest(OutputOptions):
    """Request model for random quota complexes."""
    spec_file: Path
    trials: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = Field(default=None, ge=0)
    method: Literal["auto", "subset", "product"] = "auto"


SUITE_NAMES = (
    "shell-theorem", "realization", "prime-complex", "euler-identity", "mertens",
    "generating-function", "lehmer", "partitions", "divisor", "random", "heuristic", "all",
)


class VerifyRequest(OutputOptions):
    """Request model for verification suites."""
    suite: Literal[SUITE_NAMES]
    trials: int = Field(default=1000, ge=1)
    seed: int = Field(default=7, ge=0)
    scale: Literal["quick", "full"] = "quick"
