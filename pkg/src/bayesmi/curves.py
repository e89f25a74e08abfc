"""Learning-curve experiments: probes trained at log-spaced data sizes.

A plan fixes everything random ahead of time: the size grid, one data
order per trial, and one architecture and training seed per (size,
trial) cell, all derived from the master seed.  Running the same plan
against several representations therefore pairs the curves cell by
cell, and running cells in parallel cannot change any output.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .dataio.datasets import TokenDataset
from .probe import MlpArchitecture, ProbeAgent, TrainConfig, estimate_bayesian_mi, map_train, sample_architecture
from .seeding import derive_rng, derive_seed

CSV_HEADER = ("repr", "task", "n", "trial", "layers", "hidden", "dropout", "seed", "bayesian_mi_bits")


@dataclass(frozen=True)
class CellPlan:
    """One trainable cell: a size, a trial slot, and its sampled draw."""

    size: int
    trial: int
    architecture: MlpArchitecture
    train_seed: int


@dataclass(frozen=True)
class ExperimentPlan:
    """Every random choice for a curve, fixed before any training runs."""

    sizes: Tuple[int, ...]
    n_trials: int
    cells: Tuple[CellPlan, ...]
    master_seed: int

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError(f"sizes must be strictly increasing, got {sizes}")
        if len(self.cells) != len(sizes) * self.n_trials:
            raise ValueError("plan must hold one cell per (size, trial)")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "cells", tuple(self.cells))

    def order_seed(self, trial: int) -> int:
        return derive_seed(self.master_seed, "data-order", trial)


def size_grid(n_train: int, n_points: int) -> Tuple[int, ...]:
    """Log-spaced from one token to the whole training side, deduplicated."""
    if n_train < 1:
        raise ValueError(f"need at least one training example, got {n_train}")
    if n_points < 2:
        raise ValueError(f"need at least 2 curve points, got {n_points}")
    raw = np.round(np.logspace(0.0, np.log10(n_train), n_points)).astype(int)
    return tuple(int(s) for s in np.unique(raw))


def build_plan(
    n_train: int,
    n_points: int = 50,
    trials: int = 5,
    seed: int = 0,
    include_anchor: bool = True,
) -> ExperimentPlan:
    """Sample the full experiment layout from one master seed.

    The zero-size anchor row evaluates the untouched prior agent, whose
    estimate is zero by construction, so it needs no training cell
    randomness beyond a placeholder architecture kept for pairing.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    sizes = size_grid(n_train, n_points)
    if include_anchor:
        sizes = (0,) + sizes
    cells = []
    for size in sizes:
        for trial in range(trials):
            arch = sample_architecture(derive_rng(seed, "architecture", trial, size))
            cells.append(
                CellPlan(
                    size=size,
                    trial=trial,
                    architecture=arch,
                    train_seed=derive_seed(seed, "train", trial, size),
                )
            )
    return ExperimentPlan(sizes=sizes, n_trials=trials, cells=tuple(cells), master_seed=seed)


@dataclass(frozen=True)
class CurvePoint:
    n: int
    trial: int
    architecture: MlpArchitecture
    seed: int
    mi_bits: float
    n_test: int


@dataclass(frozen=True)
class LearningCurve:
    """Every trial of one representation's curve, anchor included."""

    repr_id: str
    task: str
    points: Tuple[CurvePoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        for pt in self.points:
            if pt.n == 0 and pt.mi_bits != 0.0:
                raise ValueError("the zero-data point must carry exactly zero information")

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(sorted({pt.n for pt in self.points}))

    def at_size(self, n: int) -> Tuple[CurvePoint, ...]:
        return tuple(pt for pt in self.points if pt.n == n)


def pareto_aggregate(curve: LearningCurve) -> Tuple[Tuple[int, float], ...]:
    """Upper envelope: the best estimate among trials at each size."""
    if not curve.points:
        raise ValueError("cannot aggregate an empty curve")
    return tuple((n, max(pt.mi_bits for pt in curve.at_size(n))) for n in curve.sizes)


def envelope_at(curve: LearningCurve, n: int) -> float:
    points = curve.at_size(n)
    if not points:
        raise ValueError(f"curve has no points at size {n}")
    return max(pt.mi_bits for pt in points)


def _run_cell(args) -> float:
    dataset, cell, order_seed, config = args
    order = derive_rng(order_seed, "permutation").permutation(dataset.n_train)
    idx = order[: cell.size]
    agent = ProbeAgent.fresh(
        input_dim=dataset.input_dim,
        labels=dataset.labels,
        architecture=cell.architecture,
        rng=derive_rng(cell.train_seed, "init"),
    )
    trained, _ = map_train(
        agent,
        dataset.train_x[idx],
        dataset.train_y[idx],
        replace(config, seed=cell.train_seed),
    )
    return estimate_bayesian_mi(trained, dataset.test_x, dataset.test_y)


def run_learning_curve(
    dataset: TokenDataset,
    n_points: int = 50,
    trials: int = 5,
    seed: int = 0,
    config: Optional[TrainConfig] = None,
    plan: Optional[ExperimentPlan] = None,
    repr_id: str = "default",
    workers: int = 1,
) -> LearningCurve:
    """Train one probe per (size, trial) cell and score it on the test side.

    Within a trial the subsamples are nested prefixes of one shuffled
    order, so successive sizes see supersets of the same data.
    """
    if dataset.n_test == 0:
        raise ValueError("dataset has no test side to estimate information on")
    if plan is None:
        plan = build_plan(dataset.n_train, n_points=n_points, trials=trials, seed=seed)
    largest = max(plan.sizes)
    if largest > dataset.n_train:
        raise ValueError(f"plan asks for {largest} training tokens, dataset has {dataset.n_train}")
    config = config or TrainConfig()

    jobs = [
        (dataset, cell, plan.order_seed(cell.trial), config)
        for cell in plan.cells
        if cell.size > 0
    ]
    if workers > 1 and jobs:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, jobs))
    else:
        results = [_run_cell(job) for job in jobs]

    estimates = iter(results)
    points = []
    for cell in plan.cells:
        mi = 0.0 if cell.size == 0 else next(estimates)
        points.append(
            CurvePoint(
                n=cell.size,
                trial=cell.trial,
                architecture=cell.architecture,
                seed=cell.train_seed,
                mi_bits=float(mi),
                n_test=dataset.n_test,
            )
        )
    return LearningCurve(repr_id=repr_id, task=dataset.task, points=tuple(points))


def compare_representations(
    datasets: Mapping[str, TokenDataset],
    n_points: int = 50,
    trials: int = 5,
    seed: int = 0,
    config: Optional[TrainConfig] = None,
    workers: int = 1,
) -> Dict[str, LearningCurve]:
    """Run the same plan against every representation, pairing the curves."""
    if not datasets:
        raise ValueError("no representations to compare")
    items = list(datasets.items())
    first_id, first = items[0]
    for other_id, other in items[1:]:
        if other.labels != first.labels:
            raise ValueError(f"label sets differ: {first_id!r} vs {other_id!r}")
        if other.n_train != first.n_train:
            raise ValueError(f"training sizes differ: {first_id!r} vs {other_id!r}")
    plan = build_plan(first.n_train, n_points=n_points, trials=trials, seed=seed)
    return {
        repr_id: run_learning_curve(
            ds, config=config, plan=plan, repr_id=repr_id, workers=workers
        )
        for repr_id, ds in items
    }


def curve_rows(curve: LearningCurve) -> List[tuple]:
    rows = []
    for pt in curve.points:
        rows.append(
            (
                curve.repr_id,
                curve.task,
                pt.n,
                pt.trial,
                pt.architecture.n_layers,
                pt.architecture.hidden_size,
                repr(float(pt.architecture.dropout_rate)),
                pt.seed,
                repr(float(pt.mi_bits)),
            )
        )
    return rows


def write_curves_csv(
    curves: Union[LearningCurve, Iterable[LearningCurve], Mapping[str, LearningCurve]],
    path: Union[str, Path],
) -> None:
    """Canonical CSV: fixed header, rows sorted by (repr, n, trial)."""
    if isinstance(curves, LearningCurve):
        curve_list: Sequence[LearningCurve] = [curves]
    elif isinstance(curves, Mapping):
        curve_list = [curves[k] for k in sorted(curves)]
    else:
        curve_list = list(curves)
    rows = []
    for curve in curve_list:
        rows.extend(curve_rows(curve))
    rows.sort(key=lambda r: (r[0], r[2], r[3]))
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)


def read_curves_csv(path: Union[str, Path]) -> List[dict]:
    """Rows as dicts with numeric fields restored; the writer's inverse."""
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        rows = []
        for raw in reader:
            rows.append(
                {
                    "repr": raw["repr"],
                    "task": raw["task"],
                    "n": int(raw["n"]),
                    "trial": int(raw["trial"]),
                    "layers": int(raw["layers"]),
                    "hidden": int(raw["hidden"]),
                    "dropout": float(raw["dropout"]),
                    "seed": int(raw["seed"]),
                    "bayesian_mi_bits": float(raw["bayesian_mi_bits"]),
                }
            )
        return rows
