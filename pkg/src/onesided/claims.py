"""Result record for machine-checked inequalities.

Every quantitative check in this package reduces to "lhs <= rhs up to a
relative tolerance". A ClaimResult captures one such comparison together
with enough instance data to replay it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict


@dataclass(frozen=True)
class ClaimResult:
    claim_id: str
    instance: str
    lhs: float
    rhs: float
    tolerance: float = 1e-9
    extra: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        # builtin floats keep reprs (and the CSV) backend-independent
        object.__setattr__(self, "lhs", float(self.lhs))
        object.__setattr__(self, "rhs", float(self.rhs))
        object.__setattr__(self, "tolerance", float(self.tolerance))

    @property
    def ratio(self) -> float:
        if self.rhs == 0.0:
            return 0.0 if self.lhs == 0.0 else float("inf")
        return self.lhs / self.rhs

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + self.tolerance)

    def to_jsonable(self) -> Dict[str, Any]:
        return {
            "claim_id": self.claim_id,
            "instance": self.instance,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }

    def csv_row(self) -> str:
        return "%s,%s,%r,%r,%r,%s" % (
            self.claim_id,
            self.instance,
            self.lhs,
            self.rhs,
            self.ratio,
            self.passed,
        )


CSV_HEADER = "claim_id,instance,lhs,rhs,ratio,pass"


class ClaimFailure(AssertionError):
    """Raised when a suite encounters a failing claim; carries the replay data."""

    def __init__(self, claim: ClaimResult, replay: Dict[str, Any]):
        self.claim = claim
        self.replay = replay
        super().__init__(
            "claim %s failed on %s: lhs=%r rhs=%r ratio=%r"
            % (claim.claim_id, claim.instance, claim.lhs, claim.rhs, claim.ratio)
        )
