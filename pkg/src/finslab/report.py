"""Machine-readable verification reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class VerificationReport:
    """One named check: sample count, deviations, tolerance, pass flag.

    ``passed`` is true iff ``max_deviation < tolerance``; the tolerance is
    echoed inside ``config``.  JSON field order follows the declaration
    order below (the ``passed`` attribute serializes as ``"pass"``).
    """

    check: str
    config: dict
    n_samples: int
    max_deviation: float
    per_level: list = field(default_factory=list)
    passed: bool = False
    wall_time_ms: int = 0

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "config": self.config,
            "n_samples": self.n_samples,
            "max_deviation": self.max_deviation,
            "per_level": self.per_level,
            "pass": self.passed,
            "wall_time_ms": self.wall_time_ms,
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)
