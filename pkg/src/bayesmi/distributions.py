"""Exact finite discrete probability objects.

Everything downstream (entropies, divergences, Bayesian MI, theorem checks)
is computed from these three containers: a distribution over a finite
labelled domain, a joint distribution over a product of two such domains,
and a conditional belief (one distribution per conditioning symbol).

Probability vectors must sum to 1 within 1e-12.  Inputs whose sum is off by
at most 1e-9 are renormalised; anything worse is rejected, so construction
bugs surface instead of being silently masked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

PROB_SUM_TOL = 1e-12
RENORM_TOL = 1e-9

Label = Hashable


class DomainError(ValueError):
    """Unknown symbol, or two objects with incompatible domains."""


def _as_prob_vector(probs, what: str) -> np.ndarray:
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError(f"{what}: expected a 1-d probability vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{what}: probabilities must be finite")
    if np.any(p < 0):
        raise ValueError(f"{what}: probabilities must be nonnegative (min {p.min():.3e})")
    total = float(p.sum())
    if abs(total - 1.0) > RENORM_TOL:
        raise ValueError(f"{what}: probabilities sum to {total!r}, further than {RENORM_TOL} from 1")
    if abs(total - 1.0) > PROB_SUM_TOL:
        p = p / total
    return p


def _check_unique(labels: tuple, what: str) -> None:
    if len(set(labels)) != len(labels):
        raise ValueError(f"{what}: labels must be unique")


@dataclass(frozen=True)
class FiniteDistribution:
    """A probability vector over a finite labelled domain."""

    labels: tuple
    probs: np.ndarray = field(repr=False)

    def __init__(self, labels: Sequence[Label], probs):
        labels = tuple(labels)
        _check_unique(labels, "FiniteDistribution")
        p = _as_prob_vector(probs, "FiniteDistribution")
        if len(labels) != p.size:
            raise ValueError(f"{len(labels)} labels but {p.size} probabilities")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", p)
        p.setflags(write=False)

    @classmethod
    def uniform(cls, labels: Sequence[Label]) -> "FiniteDistribution":
        labels = tuple(labels)
        return cls(labels, np.full(len(labels), 1.0 / len(labels)))

    @classmethod
    def point_mass(cls, labels: Sequence[Label], at: Label) -> "FiniteDistribution":
        labels = tuple(labels)
        p = np.zeros(len(labels))
        p[labels.index(at)] = 1.0
        return cls(labels, p)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, x: Label) -> int:
        try:
            return self.labels.index(x)
        except ValueError:
            raise DomainError(f"symbol {x!r} not in domain {self.labels!r}") from None

    def prob(self, x: Label) -> float:
        return float(self.probs[self.index(x)])

    def same_domain(self, other: "FiniteDistribution") -> bool:
        return self.labels == other.labels

    def require_same_domain(self, other: "FiniteDistribution") -> None:
        if not self.same_domain(other):
            raise DomainError(f"domain mismatch: {self.labels!r} vs {other.labels!r}")


@dataclass(frozen=True)
class JointDistribution:
    """A joint probability table p(x, y); rows index x, columns index y."""

    x_labels: tuple
    y_labels: tuple
    probs: np.ndarray = field(repr=False)

    def __init__(self, x_labels: Sequence[Label], y_labels: Sequence[Label], probs):
        x_labels, y_labels = tuple(x_labels), tuple(y_labels)
        _check_unique(x_labels, "JointDistribution x")
        _check_unique(y_labels, "JointDistribution y")
        m = np.asarray(probs, dtype=np.float64)
        if m.shape != (len(x_labels), len(y_labels)):
            raise ValueError(f"matrix shape {m.shape} does not match {len(x_labels)}x{len(y_labels)} labels")
        flat = _as_prob_vector(m.reshape(-1), "JointDistribution")
        m = flat.reshape(m.shape)
        object.__setattr__(self, "x_labels", x_labels)
        object.__setattr__(self, "y_labels", y_labels)
        object.__setattr__(self, "probs", m)
        m.setflags(write=False)

    @classmethod
    def from_independent(cls, px: FiniteDistribution, py: FiniteDistribution) -> "JointDistribution":
        return cls(px.labels, py.labels, np.outer(px.probs, py.probs))

    def marginal_x(self) -> FiniteDistribution:
        return FiniteDistribution(self.x_labels, self.probs.sum(axis=1))

    def marginal_y(self) -> FiniteDistribution:
        return FiniteDistribution(self.y_labels, self.probs.sum(axis=0))

    def conditional_x_given(self, y: Label) -> FiniteDistribution:
        j = self.y_labels.index(y) if y in self.y_labels else None
        if j is None:
            raise DomainError(f"symbol {y!r} not in domain {self.y_labels!r}")
        col = self.probs[:, j]
        total = col.sum()
        if total <= 0.0:
            raise ZeroDivisionError(f"conditioning on zero-probability symbol {y!r}")
        return FiniteDistribution(self.x_labels, col / total)

    def transpose(self) -> "JointDistribution":
        return JointDistribution(self.y_labels, self.x_labels, self.probs.T)

    def relabel_y(self, mapping) -> "JointDistribution":
        """Apply a bijection (dict or callable) to the y labels; the table is unchanged."""
        fn = mapping.__getitem__ if isinstance(mapping, dict) else mapping
        new = tuple(fn(y) for y in self.y_labels)
        if len(set(new)) != len(new):
            raise ValueError("relabel_y mapping must be a bijection")
        return JointDistribution(self.x_labels, new, self.probs)


@dataclass(frozen=True)
class ConditionalBelief:
    """One distribution over ``domain_labels`` per conditioning symbol.

    ``rows[i]`` is the distribution over the domain given ``cond_labels[i]``.
    """

    cond_labels: tuple
    domain_labels: tuple
    rows: np.ndarray = field(repr=False)

    def __init__(self, cond_labels: Sequence[Label], domain_labels: Sequence[Label], rows):
        cond_labels, domain_labels = tuple(cond_labels), tuple(domain_labels)
        _check_unique(cond_labels, "ConditionalBelief cond")
        _check_unique(domain_labels, "ConditionalBelief domain")
        m = np.asarray(rows, dtype=np.float64)
        if m.shape != (len(cond_labels), len(domain_labels)):
            raise ValueError(f"rows shape {m.shape} does not match {len(cond_labels)}x{len(domain_labels)} labels")
        m = np.stack([_as_prob_vector(r, f"ConditionalBelief row {cond_labels[i]!r}") for i, r in enumerate(m)])
        object.__setattr__(self, "cond_labels", cond_labels)
        object.__setattr__(self, "domain_labels", domain_labels)
        object.__setattr__(self, "rows", m)
        m.setflags(write=False)

    @classmethod
    def from_rows(cls, mapping: dict) -> "ConditionalBelief":
        """Build from {cond_symbol: FiniteDistribution}; domains must agree."""
        conds = tuple(mapping)
        dists = [mapping[c] for c in conds]
        domain = dists[0].labels
        for d in dists[1:]:
            if d.labels != domain:
                raise DomainError("conditional rows have mismatched domains")
        return cls(conds, domain, np.stack([d.probs for d in dists]))

    def row(self, cond: Label) -> FiniteDistribution:
        try:
            i = self.cond_labels.index(cond)
        except ValueError:
            raise DomainError(f"symbol {cond!r} not in domain {self.cond_labels!r}") from None
        return FiniteDistribution(self.domain_labels, self.rows[i])

    def prob(self, x: Label, given: Label) -> float:
        i = self.cond_labels.index(given)
        j = self.domain_labels.index(x)
        return float(self.rows[i, j])
