"""Neural probe agents: MLP conditional beliefs trained to a MAP point.

A probe agent holds two beliefs about task labels.  Its conditional
belief given a representation vector is a softmax MLP; its unconditional
belief is the add-one count estimator over the labels it has seen.  The
pair plugs into the empirical Bayesian MI estimator, which is what the
learning-curve experiments measure.

The MLP starts with a zero final layer, so an untrained agent believes
the uniform distribution no matter the input.  Together with zero label
counts this makes the no-data Bayesian MI exactly zero, which anchors
every learning curve at the origin.

Training maximizes the posterior: mean cross-entropy in bits plus a
Gaussian prior penalty on the weights, optimized with Adam plus
decoupled weight decay.  Biases carry no penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .distributions import DomainError, FiniteDistribution

LN2 = math.log(2.0)


class TrainingError(RuntimeError):
    """Raised when the objective becomes non-finite; carries the loss trace."""

    def __init__(self, message: str, trace):
        super().__init__(message)
        self.trace = list(trace)


@dataclass(frozen=True)
class MlpArchitecture:
    """Probe shape: hidden depth, width and training-time dropout."""

    n_layers: int
    hidden_size: int = 64
    dropout_rate: float = 0.0

    def __post_init__(self):
        if self.n_layers not in (0, 1, 2):
            raise ValueError("n_layers must be 0, 1 or 2")
        if not 32 <= self.hidden_size <= 1024:
            raise ValueError("hidden_size must lie in [32, 1024]")
        if not 0.0 <= self.dropout_rate <= 0.5:
            raise ValueError("dropout_rate must lie in [0, 0.5]")

    def layer_dims(self, input_dim: int, n_labels: int):
        return [input_dim] + [self.hidden_size] * self.n_layers + [n_labels]


def sample_architecture(rng: np.random.Generator) -> MlpArchitecture:
    """Depth uniform over {0,1,2}, width log-uniform over [32,1024], dropout uniform."""
    n_layers = int(rng.integers(0, 3))
    hidden = int(np.clip(round(math.exp(rng.uniform(math.log(32), math.log(1024)))), 32, 1024))
    dropout = float(rng.uniform(0.0, 0.5))
    return MlpArchitecture(n_layers=n_layers, hidden_size=hidden, dropout_rate=dropout)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    max_epochs: int = 500
    batch_size: Optional[int] = None
    early_stop_patience: int = 20
    improvement_tol: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.max_epochs <= 0 or self.early_stop_patience <= 0:
            raise ValueError("learning rate, epochs and patience must be positive")
        if self.batch_size is not None and self.batch_size <= 0:
            raise ValueError("batch size must be positive")

    def resolve_batch_size(self, n: int) -> int:
        return self.batch_size if self.batch_size is not None else min(64, n)


@dataclass(frozen=True)
class ProbeAgent:
    """MLP conditional belief plus counted unconditional belief over labels."""

    labels: tuple
    input_dim: int
    architecture: MlpArchitecture
    weights: tuple
    biases: tuple
    label_counts: np.ndarray
    sigma: float = 10.0
    alpha: float = 1.0

    @classmethod
    def fresh(cls, input_dim: int, labels: Sequence, architecture: MlpArchitecture,
              sigma: float = 10.0, alpha: float = 1.0,
              rng: Optional[np.random.Generator] = None) -> "ProbeAgent":
        """New agent: He-initialized hidden layers, zero final layer, zero counts."""
        rng = rng or np.random.default_rng(0)
        labels = tuple(labels)
        dims = architecture.layer_dims(input_dim, len(labels))
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            weights.append(rng.normal(0.0, math.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        weights[-1] = np.zeros_like(weights[-1])
        counts = np.zeros(len(labels), dtype=np.int64)
        return cls(labels, input_dim, architecture,
                   _freeze(weights), _freeze(biases), counts, sigma, alpha)

    @property
    def n(self) -> int:
        return int(self.label_counts.sum())

    def with_params(self, weights, biases) -> "ProbeAgent":
        return replace(self, weights=_freeze(weights), biases=_freeze(biases))

    def observe_labels(self, y: np.ndarray) -> "ProbeAgent":
        counts = self.label_counts + np.bincount(np.asarray(y), minlength=len(self.labels))
        return replace(self, label_counts=counts)

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.input_dim:
            raise DomainError(f"expected {self.input_dim}-dimensional input, got {x.shape[1]}")
        return x

    def conditional_probs(self, x: np.ndarray) -> np.ndarray:
        """(n, labels) softmax rows, dropout off."""
        logits, _ = _forward(self.weights, self.biases, self._check_input(x))
        return _softmax(logits)

    def forward(self, r) -> FiniteDistribution:
        return FiniteDistribution(self.labels, self.conditional_probs(r)[0])

    def unconditional_predictive(self) -> FiniteDistribution:
        numer = self.label_counts + self.alpha
        return FiniteDistribution(self.labels, numer / numer.sum())


def _freeze(arrays) -> tuple:
    out = []
    for a in arrays:
        a = np.array(a, dtype=np.float64)
        a.setflags(write=False)
        out.append(a)
    return tuple(out)


def _forward(weights, biases, x, dropout_rate=0.0, rng=None):
    """Logits plus per-layer caches (input, preactivation, dropout mask)."""
    h = x
    caches = []
    for w, b in zip(weights[:-1], biases[:-1]):
        z = h @ w + b
        a = np.maximum(z, 0.0)
        mask = None
        if dropout_rate > 0.0 and rng is not None:
            mask = (rng.random(a.shape) >= dropout_rate) / (1.0 - dropout_rate)
            a = a * mask
        caches.append((h, z, mask))
        h = a
    caches.append((h, None, None))
    return h @ weights[-1] + biases[-1], caches


def _softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _penalty_bits(weights, sigma, n):
    return sum(float((w**2).sum()) for w in weights) / (2.0 * sigma**2 * n * LN2)


def _objective_only(weights, biases, x, y, sigma, n_total):
    """Deterministic MAP objective in bits, no gradient work."""
    logits, _ = _forward(weights, biases, x)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    nll_bits = -(shifted[np.arange(x.shape[0]), y] - log_z).mean() / LN2
    return nll_bits + _penalty_bits(weights, sigma, n_total)


def _objective_and_grads(weights, biases, x, y, sigma, n_total,
                         dropout_rate=0.0, rng=None, include_penalty_grad=True):
    """Full MAP objective in bits and its gradients for one batch.

    The cross-entropy term is the batch mean; the prior penalty is scaled
    by the full training size so batches estimate the same objective.
    """
    logits, caches = _forward(weights, biases, x, dropout_rate, rng)
    n_batch = x.shape[0]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    log_probs = shifted - log_z[:, np.newaxis]
    nll_bits = -log_probs[np.arange(n_batch), y].mean() / LN2
    loss = nll_bits + _penalty_bits(weights, sigma, n_total)

    delta = _softmax(logits)
    delta[np.arange(n_batch), y] -= 1.0
    delta /= n_batch * LN2

    w_grads = [None] * len(weights)
    b_grads = [None] * len(biases)
    for layer in reversed(range(len(weights))):
        h, z, mask = caches[layer]
        w_grads[layer] = h.T @ delta
        b_grads[layer] = delta.sum(axis=0)
        if layer > 0:
            # the mask and relu kink belong to the previous layer's output
            delta = delta @ weights[layer].T
            _, prev_z, prev_mask = caches[layer - 1]
            if prev_mask is not None:
                delta = delta * prev_mask
            delta = delta * (prev_z > 0.0)
        if include_penalty_grad:
            w_grads[layer] = w_grads[layer] + weights[layer] / (sigma**2 * n_total * LN2)
    return loss, w_grads, b_grads


def loss_and_grad(agent: ProbeAgent, x: np.ndarray, y: np.ndarray):
    """Deterministic full-batch objective and gradients, for verification."""
    x = agent._check_input(x)
    y = np.asarray(y)
    loss, w_grads, b_grads = _objective_and_grads(
        agent.weights, agent.biases, x, y, agent.sigma, x.shape[0]
    )
    return loss, (w_grads, b_grads)


def map_train(agent: ProbeAgent, x: np.ndarray, y: np.ndarray,
              config: TrainConfig = None):
    """MAP-fit the MLP and absorb the label counts; returns (agent, loss trace).

    The trace holds the full deterministic objective per epoch (entry 0 is
    the starting value).  The returned parameters are the best seen, so the
    final trace value is never above the first.
    """
    config = config or TrainConfig()
    x = agent._check_input(x)
    y = np.asarray(y)
    if x.shape[0] == 0:
        raise ValueError("training data must be nonempty")
    n = x.shape[0]
    rng = np.random.default_rng(config.seed)
    dropout = agent.architecture.dropout_rate

    weights = [w.copy() for w in agent.weights]
    biases = [b.copy() for b in agent.biases]
    m_w = [np.zeros_like(w) for w in weights]
    v_w = [np.zeros_like(w) for w in weights]
    m_b = [np.zeros_like(b) for b in biases]
    v_b = [np.zeros_like(b) for b in biases]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    decay = 1.0 / (agent.sigma**2 * n * LN2)
    step = 0

    def full_objective():
        return _objective_only(weights, biases, x, y, agent.sigma, n)

    trace = [full_objective()]
    best_loss = trace[0]
    best = ([w.copy() for w in weights], [b.copy() for b in biases])
    stale_epochs = 0
    batch_size = config.resolve_batch_size(n)

    for _ in range(config.max_epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            _, w_grads, b_grads = _objective_and_grads(
                weights, biases, x[idx], y[idx], agent.sigma, n,
                dropout_rate=dropout, rng=rng, include_penalty_grad=False,
            )
            step += 1
            correct1 = 1.0 - beta1**step
            correct2 = 1.0 - beta2**step
            for layer in range(len(weights)):
                m_w[layer] = beta1 * m_w[layer] + (1 - beta1) * w_grads[layer]
                v_w[layer] = beta2 * v_w[layer] + (1 - beta2) * w_grads[layer] ** 2
                m_b[layer] = beta1 * m_b[layer] + (1 - beta1) * b_grads[layer]
                v_b[layer] = beta2 * v_b[layer] + (1 - beta2) * b_grads[layer] ** 2
                weights[layer] -= config.learning_rate * (
                    m_w[layer] / correct1 / (np.sqrt(v_w[layer] / correct2) + eps)
                    + decay * weights[layer]
                )
                biases[layer] -= config.learning_rate * (
                    m_b[layer] / correct1 / (np.sqrt(v_b[layer] / correct2) + eps)
                )

        loss = full_objective()
        trace.append(loss)
        if not math.isfinite(loss):
            raise TrainingError("objective became non-finite", trace)
        if loss < best_loss - config.improvement_tol:
            best_loss = loss
            best = ([w.copy() for w in weights], [b.copy() for b in biases])
            stale_epochs = 0
        else:
            if loss < best_loss:
                best_loss = loss
                best = ([w.copy() for w in weights], [b.copy() for b in biases])
            stale_epochs += 1
            if stale_epochs >= config.early_stop_patience:
                break

    trained = agent.with_params(*best).observe_labels(y)
    return trained, trace


def estimate_bayesian_mi(agent: ProbeAgent, x: np.ndarray, y: np.ndarray) -> float:
    """Held-out Bayesian MI in bits: mean log ratio of conditional to unconditional.

    The per-item ratio form keeps the no-data case exact: a fresh agent
    believes uniform on both sides, every ratio is exactly one, and the
    estimate is exactly zero.
    """
    y = np.asarray(y)
    if y.size == 0:
        raise DomainError("held-out data must be nonempty")
    cond = agent.conditional_probs(x)[np.arange(y.size), y]
    uncond = agent.unconditional_predictive().probs[y]
    with np.errstate(divide="ignore"):
        ratios = np.log2(cond / uncond)
    return float(ratios.mean())
