# quotatope/schemas/responses.py

from typing import List

from pydantic import BaseModel, computed_field


class CheckResult(BaseModel):
    """Outcome of one check inside a verification suite."""
    name: str
    passed: bool
    detail: str
    informational: bool = False


class VerificationReport(BaseModel):
    """Response model for a verification suite run."""
    suite: str
    seed: int
    scale: str
    checks: List[CheckResult]

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    @computed_field
    @property
    def failed_checks(self) -> int:
        return sum(1 for c in self.checks if not c.passed and not c.informational)


class CommandSummary(BaseModel):
    """What a command wrote."""
    command: str
    outputs: List[str]
    rows: int
