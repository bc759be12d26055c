"""Failure verdict domain model."""

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, model_validator


class FailureReason(StrEnum):
    HEIGHT = "height"
    ATTITUDE = "attitude"
    NON_FINITE = "non_finite"
    SOLVER = "solver"


class FailureVerdict(BaseModel):
    """Outcome of the failure detector; ``time`` is when the failure condition was first met."""

    model_config = ConfigDict(frozen=True)

    failed: bool = False
    reason: FailureReason | None = None
    time: float | None = None
    detail: str = ""

    @model_validator(mode="after")
    def _reason_matches_flag(self) -> "FailureVerdict":
        if self.failed != (self.reason is not None):
            raise ValueError("a failed verdict needs a reason and an ok verdict must not have one")
        return self

    @classmethod
    def ok(cls) -> "FailureVerdict":
        return cls()

    @classmethod
    def failure(cls, reason: FailureReason, time: float, detail: str = "") -> "FailureVerdict":
        return cls(failed=True, reason=reason, time=time, detail=detail)
