"""Shared helpers for the numerical checks: assertion recording and sampling."""

from __future__ import annotations

import numpy as np

from ..distributions import FiniteDistribution, JointDistribution


class Recorder:
    """Collects named assertions; keeps the first violating instance."""

    def __init__(self):
        self.failure = None

    def require(self, ok: bool, assertion: str, **instance):
        if not ok and self.failure is None:
            self.failure = {"assertion": assertion, **{k: _plain(v) for k, v in instance.items()}}

    @property
    def passed(self) -> bool:
        return self.failure is None


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def random_distribution(rng: np.random.Generator, n: int) -> FiniteDistribution:
    return FiniteDistribution(range(n), rng.dirichlet(np.ones(n)))


def random_joint(rng: np.random.Generator, nx: int, ny: int) -> JointDistribution:
    probs = rng.dirichlet(np.ones(nx * ny)).reshape(nx, ny)
    return JointDistribution(range(nx), range(ny), probs)


def sample_pair_counts(rng: np.random.Generator, joint: JointDistribution, n: int) -> np.ndarray:
    """Counts of n iid draws from the joint, shaped like its table."""
    flat = rng.multinomial(n, joint.probs.ravel())
    return flat.reshape(joint.probs.shape)


def sample_pair_stream(rng: np.random.Generator, joint: JointDistribution, n: int):
    """n iid (x_index, y_index) draws, order preserved."""
    flat = rng.choice(joint.probs.size, size=n, p=joint.probs.ravel())
    nx, ny = joint.probs.shape
    return np.stack([flat // ny, flat % ny], axis=1)
