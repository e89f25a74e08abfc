"""Run the numerical checks and collect their reports."""

from __future__ import annotations

import json
from typing import Iterable, Optional, Sequence

from .convergence import check_convergence_mi, check_convergence_v_info
from .description_length import check_mdl_sdl
from .dpi import check_dpi_violation
from .identities import check_decomposition, check_upper_bound
from .ill_formed import check_illformed_loss
from .report import TheoremReport
from .symmetry import check_symmetry_consistent, check_symmetry_violated_inconsistent

CHECKS = {
    "t1": lambda seed: check_symmetry_consistent(seed=seed),
    "t1x": lambda seed: check_symmetry_violated_inconsistent(),
    "t2": lambda seed: check_dpi_violation(seed=seed),
    "t3": lambda seed: check_upper_bound(seed=seed),
    "t4": lambda seed: check_convergence_mi(seed=seed),
    "t5": lambda seed: check_convergence_v_info(seed=seed),
    "t6": lambda seed: check_decomposition(seed=seed),
    "t7": lambda seed: check_illformed_loss(seed=seed),
    "mdl": lambda seed: check_mdl_sdl(seed=seed),
}


def run_checks(ids: Optional[Iterable[str]] = None, seed: int = 0) -> list:
    """Run the selected checks (all by default) in declaration order."""
    selected = list(CHECKS) if ids is None else list(ids)
    unknown = [i for i in selected if i not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check ids: {unknown}; valid ids are {list(CHECKS)}")
    return [CHECKS[i](seed) for i in list(CHECKS) if i in selected]


def summary_table(reports: Sequence[TheoremReport]) -> str:
    lines = [r.summary_line() for r in reports]
    passed = sum(r.passed for r in reports)
    lines.append(f"{passed}/{len(reports)} checks passed")
    return "\n".join(lines)


def write_reports(reports: Sequence[TheoremReport], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("[\n" + ",\n".join(r.to_json() for r in reports) + "\n]\n")


def read_reports(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [TheoremReport(**record) for record in json.load(fh)]
