"""
Verification Results
The record every identity or inequality check returns
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict

from src.core.events import EventType, publish


class CheckStatus(Enum):
    """Verdict of a check"""
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass
class VerificationResult:
    """
    A named identity or inequality with both sides evaluated.

    Slack is rhs - lhs for inequalities (lhs <= rhs) and -|lhs - rhs| for
    identities, so a check passes iff slack >= -tolerance.
    """
    name: str
    lhs: float
    rhs: float
    slack: float
    tolerance: float
    status: CheckStatus
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'lhs': _jsonable(self.lhs),
            'rhs': _jsonable(self.rhs),
            'slack': _jsonable(self.slack),
            'tolerance': self.tolerance,
            'status': self.status.value,
            'passed': self.passed,
            'details': {k: _jsonable(v) for k, v in self.details.items()},
        }

    def __repr__(self):
        return (f"VerificationResult({self.name}: lhs={self.lhs:.6g}, rhs={self.rhs:.6g}, "
                f"slack={self.slack:.3g}, {self.status.value})")


def _jsonable(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if hasattr(value, 'tolist'):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def inequality_result(name: str, lhs: float, rhs: float, tolerance: float,
                      on_fail: CheckStatus = CheckStatus.FAIL, **details) -> VerificationResult:
    """
    Build and publish the result of checking lhs <= rhs

    on_fail replaces FAIL for searches that can miss a witness.
    """
    lhs, rhs = float(lhs), float(rhs)
    slack = rhs - lhs
    if math.isnan(slack):
        # inf - inf: equal infinities count as tight
        slack = 0.0 if lhs == rhs else -math.inf
    status = CheckStatus.PASS if slack >= -tolerance else on_fail
    return _emit(VerificationResult(name, lhs, rhs, slack, tolerance, status, dict(details)))


def identity_result(name: str, lhs: float, rhs: float, tolerance: float,
                    **details) -> VerificationResult:
    """Build and publish the result of checking lhs == rhs"""
    lhs, rhs = float(lhs), float(rhs)
    slack = -abs(lhs - rhs)
    if math.isnan(slack):
        slack = -math.inf
    status = CheckStatus.PASS if slack >= -tolerance else CheckStatus.FAIL
    return _emit(VerificationResult(name, lhs, rhs, slack, tolerance, status, dict(details)))


def combine_results(name: str, parts, tolerance: float, **details) -> VerificationResult:
    """
    Fold several results into one: the worst slack decides, any failure fails,
    otherwise any inconclusive part makes the whole inconclusive.
    """
    parts = list(parts)
    if not parts:
        return _emit(VerificationResult(name, 0.0, 0.0, 0.0, tolerance, CheckStatus.PASS, dict(details)))
    worst = min(parts, key=lambda r: r.slack)
    statuses = {p.status for p in parts}
    if CheckStatus.FAIL in statuses:
        status = CheckStatus.FAIL
    elif CheckStatus.INCONCLUSIVE in statuses:
        status = CheckStatus.INCONCLUSIVE
    else:
        status = CheckStatus.PASS
    details = dict(details)
    details.setdefault('parts', len(parts))
    details.setdefault('worst', worst.name)
    return _emit(VerificationResult(name, worst.lhs, worst.rhs, worst.slack, tolerance, status, details))


def _emit(result: VerificationResult) -> VerificationResult:
    publish(EventType.CHECK_COMPLETED, result=result)
    return result
