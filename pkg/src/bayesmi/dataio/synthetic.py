"""Synthetic feature/label generators with known mutual information.

Three kinds, each with an oracle for the true information between the
feature vector and the label:

- ``informative``: the label's one-hot code plus isotropic Gaussian
  noise.  At zero noise the information is exactly the label entropy;
  otherwise it is estimated by seeded Monte Carlo integration of the
  Gaussian mixture.
- ``noise``: features independent of the label, information exactly 0.
- ``lossy-channel``: the label passes through a symmetric discrete
  channel (stay with probability 1 - eps, otherwise uniform over the
  other labels) and the output symbol's one-hot code is emitted.  The
  information is the exact discrete channel information.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ..distributions import JointDistribution
from ..info import mutual_information
from ..seeding import derive_rng, derive_seed
from .datasets import TokenDataset
from .embeddings import type_vector

KINDS = ("informative", "noise", "lossy-channel")

MC_ORACLE_SAMPLES = 200_000


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str
    n_labels: int = 4
    dim: int = 16
    noise_level: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}, expected one of {KINDS}")
        if self.n_labels < 2:
            raise ValueError(f"need at least 2 labels, got {self.n_labels}")
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")
        if self.kind in ("informative", "lossy-channel") and self.dim < self.n_labels:
            raise ValueError(
                f"one-hot codes for {self.n_labels} labels need dim >= {self.n_labels}, got {self.dim}"
            )
        if self.noise_level < 0.0:
            raise ValueError(f"noise level must be nonnegative, got {self.noise_level}")
        if self.kind == "lossy-channel" and self.noise_level > 1.0:
            raise ValueError(f"channel flip probability must sit in [0, 1], got {self.noise_level}")

    @property
    def label_names(self) -> Tuple[str, ...]:
        return tuple(f"c{i}" for i in range(self.n_labels))


def channel_matrix(n_labels: int, eps: float) -> np.ndarray:
    """Row-stochastic symmetric channel: stay 1 - eps, flip uniformly."""
    off = eps / (n_labels - 1)
    return np.full((n_labels, n_labels), off) + (1.0 - eps - off) * np.eye(n_labels)


def _one_hot(indices: np.ndarray, n_labels: int, dim: int) -> np.ndarray:
    x = np.zeros((indices.shape[0], dim))
    x[np.arange(indices.shape[0]), indices] = 1.0
    return x


def _mixture_information(spec: SyntheticSpec, n_samples: int = MC_ORACLE_SAMPLES) -> float:
    """Monte Carlo estimate of the one-hot-plus-noise information in bits."""
    sigma = spec.noise_level
    k, dim = spec.n_labels, spec.dim
    rng = derive_rng(spec.seed, "mi-oracle", n_samples)
    t = rng.integers(0, k, size=n_samples)
    x = _one_hot(t, k, dim) + sigma * rng.standard_normal((n_samples, dim))
    means = _one_hot(np.arange(k), k, dim)
    # squared distances to every component mean, without the m*k*dim tensor
    d2 = (x * x).sum(axis=1)[:, None] - 2.0 * x @ means.T + (means * means).sum(axis=1)[None, :]
    log_comp = -d2 / (2.0 * sigma * sigma)
    log_own = log_comp[np.arange(n_samples), t]
    shift = log_comp.max(axis=1)
    log_mix = shift + np.log(np.exp(log_comp - shift[:, None]).mean(axis=1))
    return float((log_own - log_mix).mean() / np.log(2.0))


def analytic_mi(spec: SyntheticSpec) -> float:
    """True information between feature and label, in bits."""
    if spec.kind == "noise":
        return 0.0
    if spec.kind == "lossy-channel":
        table = channel_matrix(spec.n_labels, spec.noise_level) / spec.n_labels
        joint = JointDistribution(
            x_labels=spec.label_names,
            y_labels=tuple(f"out-{name}" for name in spec.label_names),
            probs=table,
        )
        return mutual_information(joint)
    if spec.noise_level == 0.0:
        return float(np.log2(spec.n_labels))
    return _mixture_information(spec)


def _split_indices(n: int, test_fraction: float, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    if n < 2:
        raise ValueError(f"need at least 2 samples to split, got {n}")
    order = derive_rng(seed, "synthetic-split").permutation(n)
    n_test = min(max(int(round(test_fraction * n)), 1), n - 1)
    return np.sort(order[n_test:]), np.sort(order[:n_test])


def synthesize(spec: SyntheticSpec, n: int, test_fraction: float = 0.2) -> Tuple[TokenDataset, float]:
    """Draw n labelled feature vectors, split them, and report the truth."""
    rng = derive_rng(spec.seed, "synthetic-data", spec.kind)
    k, dim = spec.n_labels, spec.dim
    t = rng.integers(0, k, size=n)
    if spec.kind == "informative":
        x = _one_hot(t, k, dim) + spec.noise_level * rng.standard_normal((n, dim))
    elif spec.kind == "noise":
        x = rng.standard_normal((n, dim))
    else:
        chan = channel_matrix(k, spec.noise_level)
        received = (rng.random(n)[:, None] > chan.cumsum(axis=1)[t]).sum(axis=1)
        x = _one_hot(received, k, dim)
    train_idx, test_idx = _split_indices(n, test_fraction, spec.seed)
    dataset = TokenDataset(
        task=f"synthetic-{spec.kind}",
        labels=spec.label_names,
        train_x=x[train_idx],
        train_y=t[train_idx],
        test_x=x[test_idx],
        test_y=t[test_idx],
    )
    return dataset, analytic_mi(spec)


def make_lossless_pair(
    vocab_size: int,
    n_labels: int,
    d_random: int,
    n: int,
    seed: int = 0,
    test_fraction: float = 0.2,
) -> Tuple[Dict[str, TokenDataset], float]:
    """Two encodings of one signal: readable one-hots vs. random vectors.

    Each of ``vocab_size`` word forms carries a fixed label (form index
    modulo the label count).  The informative encoding emits the label's
    one-hot directly; the random encoding emits the form's type vector,
    which still determines the label exactly, so both carry the full
    label information and differ only in how hard it is to extract.
    """
    if vocab_size < n_labels:
        raise ValueError(f"vocabulary of {vocab_size} cannot cover {n_labels} labels")
    rng = derive_rng(seed, "lossless-pair")
    form_idx = rng.integers(0, vocab_size, size=n)
    t = form_idx % n_labels
    labels = tuple(f"c{i}" for i in range(n_labels))

    vec_seed = derive_seed(seed, "pair-vectors")
    form_vecs = np.stack(
        [type_vector(f"w{i:05d}", d_random, vec_seed).astype(np.float64) for i in range(vocab_size)]
    )
    x_random = form_vecs[form_idx]
    x_informative = _one_hot(t, n_labels, n_labels)

    train_idx, test_idx = _split_indices(n, test_fraction, seed)
    datasets = {}
    for name, x in (("informative", x_informative), ("random", x_random)):
        datasets[name] = TokenDataset(
            task=f"lossless-{name}",
            labels=labels,
            train_x=x[train_idx],
            train_y=t[train_idx],
            test_x=x[test_idx],
            test_y=t[test_idx],
        )
    label_marginal = np.bincount(np.arange(vocab_size) % n_labels, minlength=n_labels) / vocab_size
    h_label = float(-(label_marginal * np.log2(label_marginal)).sum())
    return datasets, h_label
