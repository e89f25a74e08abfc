"""Result records for the numerical checks.

A report carries everything needed to rerun and audit a check: the id,
the measured quantities in bits, the tolerances they were held to, the
construction parameters and the seed.  Failed checks must include the
violating instance so the failure is reproducible from the report alone.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


@dataclass
class TheoremReport:
    theorem_id: str
    passed: bool
    description: str
    quantities: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    seed: Optional[int] = None
    failure: Optional[dict] = None

    def __post_init__(self):
        if not self.passed and self.failure is None:
            raise ValueError("a failing report must carry the violating instance")

    def to_json(self) -> str:
        return json.dumps(_jsonable(asdict(self)), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TheoremReport":
        return cls(**json.loads(text))

    def summary_line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"{self.theorem_id:<4s} {status:<5s} {self.description}"
