"""Bayesian agents: belief families with priors and posterior-predictive queries.

Every agent here answers one question -- "given the data you have seen,
what is your predictive distribution over the next observation?" -- and the
answers plug straight into the quantities in :mod:`bayesmi.info`.

Agents are value-semantic: ``observe`` returns a new agent, so concurrent
reads of any one agent are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from .distributions import (
    ConditionalBelief,
    DomainError,
    FiniteDistribution,
    JointDistribution,
    Label,
)
from . import info


@dataclass(frozen=True)
class DirichletCategoricalAgent:
    """Conjugate categorical belief: Dirichlet prior, count updates.

    The posterior predictive is (count_t + alpha_t) / (N + sum(alpha));
    with alpha = 1 this is add-one (Laplace) smoothing.
    """

    labels: tuple
    concentration: np.ndarray
    counts: np.ndarray

    def __init__(self, labels: Sequence[Label], concentration=1.0, counts=None):
        labels = tuple(labels)
        alpha = np.asarray(concentration, dtype=np.float64)
        if alpha.ndim == 0:
            alpha = np.full(len(labels), float(alpha))
        if alpha.shape != (len(labels),) or np.any(alpha <= 0):
            raise ValueError("concentration must be positive, one entry per label")
        c = np.zeros(len(labels), dtype=np.int64) if counts is None else np.asarray(counts, dtype=np.int64)
        if c.shape != (len(labels),) or np.any(c < 0):
            raise ValueError("counts must be nonnegative, one entry per label")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "concentration", alpha)
        object.__setattr__(self, "counts", c)
        alpha.setflags(write=False)
        c.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def observe(self, symbol: Label) -> "DirichletCategoricalAgent":
        try:
            i = self.labels.index(symbol)
        except ValueError:
            raise DomainError(f"symbol {symbol!r} not in domain {self.labels!r}") from None
        counts = self.counts.copy()
        counts[i] += 1
        return DirichletCategoricalAgent(self.labels, self.concentration, counts)

    def observe_batch(self, symbols: Iterable[Label]) -> "DirichletCategoricalAgent":
        counts = self.counts.copy()
        index = {lab: i for i, lab in enumerate(self.labels)}
        for s in symbols:
            if s not in index:
                raise DomainError(f"symbol {s!r} not in domain {self.labels!r}")
            counts[index[s]] += 1
        return DirichletCategoricalAgent(self.labels, self.concentration, counts)

    def posterior_predictive(self) -> FiniteDistribution:
        numer = self.counts + self.concentration
        return FiniteDistribution(self.labels, numer / numer.sum())


def posterior_predictive(agent: DirichletCategoricalAgent) -> FiniteDistribution:
    return agent.posterior_predictive()


@dataclass(frozen=True)
class ConditionalDirichletAgent:
    """One independent Dirichlet-categorical agent per conditioning symbol."""

    cond_labels: tuple
    domain_labels: tuple
    concentration: np.ndarray
    counts: np.ndarray

    def __init__(self, cond_labels, domain_labels, concentration=1.0, counts=None):
        cond_labels, domain_labels = tuple(cond_labels), tuple(domain_labels)
        shape = (len(cond_labels), len(domain_labels))
        alpha = np.asarray(concentration, dtype=np.float64)
        if alpha.ndim == 0:
            alpha = np.full(shape, float(alpha))
        if alpha.shape != shape or np.any(alpha <= 0):
            raise ValueError("concentration must be positive with one entry per cell")
        c = np.zeros(shape, dtype=np.int64) if counts is None else np.asarray(counts, dtype=np.int64)
        if c.shape != shape or np.any(c < 0):
            raise ValueError("counts must be nonnegative with one entry per cell")
        object.__setattr__(self, "cond_labels", cond_labels)
        object.__setattr__(self, "domain_labels", domain_labels)
        object.__setattr__(self, "concentration", alpha)
        object.__setattr__(self, "counts", c)
        alpha.setflags(write=False)
        c.setflags(write=False)

    def observe(self, cond: Label, symbol: Label) -> "ConditionalDirichletAgent":
        try:
            i = self.cond_labels.index(cond)
            j = self.domain_labels.index(symbol)
        except ValueError:
            raise DomainError(f"({cond!r}, {symbol!r}) outside agent domains") from None
        counts = self.counts.copy()
        counts[i, j] += 1
        return ConditionalDirichletAgent(self.cond_labels, self.domain_labels, self.concentration, counts)

    def posterior_predictive(self) -> ConditionalBelief:
        numer = self.counts + self.concentration
        rows = numer / numer.sum(axis=1, keepdims=True)
        return ConditionalBelief(self.cond_labels, self.domain_labels, rows)


@dataclass(frozen=True)
class JointAgentBeliefs:
    """The four beliefs derived from one joint predictive; consistent by construction."""

    q_x: FiniteDistribution
    q_y: FiniteDistribution
    q_x_given_y: ConditionalBelief
    q_y_given_x: ConditionalBelief


@dataclass(frozen=True)
class JointDirichletAgent:
    """One Dirichlet over all (x, y) cells; all four beliefs share its predictive.

    Because q(x), q(y), q(x|y) and q(y|x) are all read off a single joint
    table, the agent respects Bayes' rule cell-wise, which is exactly what
    makes its Bayesian MI symmetric.
    """

    x_labels: tuple
    y_labels: tuple
    concentration: np.ndarray
    counts: np.ndarray

    def __init__(self, x_labels, y_labels, concentration=1.0, counts=None):
        x_labels, y_labels = tuple(x_labels), tuple(y_labels)
        shape = (len(x_labels), len(y_labels))
        alpha = np.asarray(concentration, dtype=np.float64)
        if alpha.ndim == 0:
            alpha = np.full(shape, float(alpha))
        if alpha.shape != shape or np.any(alpha <= 0):
            raise ValueError("concentration must be positive with one entry per cell")
        c = np.zeros(shape, dtype=np.int64) if counts is None else np.asarray(counts, dtype=np.int64)
        if c.shape != shape or np.any(c < 0):
            raise ValueError("counts must be nonnegative with one entry per cell")
        object.__setattr__(self, "x_labels", x_labels)
        object.__setattr__(self, "y_labels", y_labels)
        object.__setattr__(self, "concentration", alpha)
        object.__setattr__(self, "counts", c)
        alpha.setflags(write=False)
        c.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def observe(self, x: Label, y: Label) -> "JointDirichletAgent":
        try:
            i = self.x_labels.index(x)
            j = self.y_labels.index(y)
        except ValueError:
            raise DomainError(f"({x!r}, {y!r}) outside agent domains") from None
        counts = self.counts.copy()
        counts[i, j] += 1
        return JointDirichletAgent(self.x_labels, self.y_labels, self.concentration, counts)

    def with_counts(self, counts) -> "JointDirichletAgent":
        return JointDirichletAgent(self.x_labels, self.y_labels, self.concentration, counts)

    def joint_predictive(self) -> JointDistribution:
        numer = self.counts + self.concentration
        return JointDistribution(self.x_labels, self.y_labels, numer / numer.sum())

    def beliefs(self) -> JointAgentBeliefs:
        joint = (self.counts + self.concentration).astype(np.float64)
        joint /= joint.sum()
        qx = joint.sum(axis=1)
        qy = joint.sum(axis=0)
        return JointAgentBeliefs(
            q_x=FiniteDistribution(self.x_labels, qx),
            q_y=FiniteDistribution(self.y_labels, qy),
            q_x_given_y=ConditionalBelief(self.y_labels, self.x_labels, (joint / qy[np.newaxis, :]).T),
            q_y_given_x=ConditionalBelief(self.x_labels, self.y_labels, joint / qx[:, np.newaxis]),
        )

    def bayesian_mi_forward(self, p_joint: JointDistribution) -> float:
        """I_theta(Y -> X | d_N) against the true joint, in bits."""
        b = self.beliefs()
        return info.bayesian_mi(p_joint, b.q_x, b.q_x_given_y)

    def bayesian_mi_reverse(self, p_joint: JointDistribution) -> float:
        """I_theta(X -> Y | d_N) against the true joint, in bits."""
        b = self.beliefs()
        return info.bayesian_mi(p_joint.transpose(), b.q_y, b.q_y_given_x)


def joint_agent_beliefs(agent: JointDirichletAgent) -> JointAgentBeliefs:
    return agent.beliefs()


@dataclass(frozen=True)
class IllustrativeAgent:
    """The biased prior-predictive agent over two same-domain variables.

    Its belief about X alone is uniform, but its belief about X given Y
    puts probability 2/(c+1) on the matching class and 1/(c+1) elsewhere:
    the agent expects X and Y to share a class more often than chance.
    It carries no model of Y depending on X, so its Y-side beliefs are
    uniform -- which is what breaks Bayes' rule across its four beliefs.

    Only the no-data (prior predictive) state is modelled.
    """

    c: int

    def __post_init__(self):
        if self.c < 2:
            raise ValueError("need at least two classes")

    @property
    def labels(self) -> tuple:
        return tuple(range(self.c))

    def predictive_x(self) -> FiniteDistribution:
        return FiniteDistribution.uniform(self.labels)

    def predictive_x_given_y(self) -> ConditionalBelief:
        c = self.c
        rows = np.full((c, c), 1.0 / (c + 1))
        np.fill_diagonal(rows, 2.0 / (c + 1))
        return ConditionalBelief(self.labels, self.labels, rows)

    def predictive_y(self) -> FiniteDistribution:
        return FiniteDistribution.uniform(self.labels)

    def predictive_y_given_x(self) -> ConditionalBelief:
        c = self.c
        return ConditionalBelief(self.labels, self.labels, np.full((c, c), 1.0 / c))

    def bayes_rule_residual(self) -> float:
        """Max cell-wise |q(x|y) q(y) - q(y|x) q(x)|; nonzero for every c >= 2."""
        via_x = self.predictive_x_given_y().rows.T * self.predictive_y().probs[np.newaxis, :]
        via_y = self.predictive_y_given_x().rows * self.predictive_x().probs[:, np.newaxis]
        return float(np.abs(via_x - via_y).max())


@dataclass(frozen=True)
class IllustrativeSummary:
    mi: float
    belief_mi: float
    bayesian_mi_at_d0: float


def illustrative_example(c: int) -> IllustrativeSummary:
    """True MI, belief MI and no-data Bayesian MI for the biased agent.

    X and Y are independent and uniform over c classes, so the true MI is
    zero by construction.  The agent's conditional belief is sharper than
    its unconditional one, so its belief MI is positive; but the sharpening
    points at a correlation the world does not have, so its Bayesian MI is
    negative.
    """
    agent = IllustrativeAgent(c)
    uniform = FiniteDistribution.uniform(agent.labels)
    true_joint = JointDistribution.from_independent(uniform, uniform)
    b_mi = info.belief_mi(agent.predictive_x(), agent.predictive_x_given_y(), agent.predictive_y())
    bayes_mi = info.bayesian_mi(true_joint, agent.predictive_x(), agent.predictive_x_given_y())
    return IllustrativeSummary(mi=0.0, belief_mi=b_mi, bayesian_mi_at_d0=bayes_mi)


class FamilyUnderflowError(ArithmeticError):
    """Every family member has zero likelihood on the observed data."""


FamilyMember = Union[FiniteDistribution, ConditionalBelief]


@dataclass(frozen=True)
class RestrictedFamilyAgent:
    """A finite enumerated belief family with a prior weight per member.

    Members are either plain distributions over X or conditional tables
    over X given Y; the truth need not be in the family.  Posterior weights
    are kept in log space (linear space underflows by N of a few thousand)
    and the predictive is the posterior-weighted mixture of the members.
    """

    members: tuple
    log_weights: np.ndarray

    def __init__(self, members: Sequence[FamilyMember], prior_weights=None, log_weights=None):
        members = tuple(members)
        if not members:
            raise ValueError("family must be nonempty")
        kinds = {type(m) for m in members}
        if len(kinds) != 1 or kinds.pop() not in (FiniteDistribution, ConditionalBelief):
            raise TypeError("members must be all FiniteDistribution or all ConditionalBelief")
        if log_weights is not None:
            lw = np.asarray(log_weights, dtype=np.float64)
        else:
            w = np.full(len(members), 1.0 / len(members)) if prior_weights is None else np.asarray(prior_weights, dtype=np.float64)
            if w.shape != (len(members),) or np.any(w <= 0):
                raise ValueError("prior weights must be positive, one per member")
            lw = np.log(w / w.sum())
        if lw.shape != (len(members),):
            raise ValueError("one log weight per member")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "log_weights", lw)
        lw.setflags(write=False)

    @property
    def is_conditional(self) -> bool:
        return isinstance(self.members[0], ConditionalBelief)

    def _member_prob(self, k: int, x: Label, given=None) -> float:
        m = self.members[k]
        if self.is_conditional:
            if given is None:
                raise DomainError("conditional family needs a conditioning symbol")
            return m.prob(x, given=given)
        return m.prob(x)

    def observe(self, x: Label, given: Label = None) -> "RestrictedFamilyAgent":
        new = self.log_weights.copy()
        for k in range(len(self.members)):
            p = self._member_prob(k, x, given)
            new[k] += math.log(p) if p > 0.0 else -math.inf
        return RestrictedFamilyAgent(self.members, log_weights=new)

    def observe_batch(self, data: Iterable) -> "RestrictedFamilyAgent":
        """Data items are symbols x, or (y, x) pairs for a conditional family."""
        agent = self
        for item in data:
            if self.is_conditional:
                y, x = item
                agent = agent.observe(x, given=y)
            else:
                agent = agent.observe(item)
        return agent

    def posterior_weights(self) -> np.ndarray:
        top = self.log_weights.max()
        if not np.isfinite(top):
            raise FamilyUnderflowError("all family members have zero posterior weight")
        w = np.exp(self.log_weights - top)
        return w / w.sum()

    def posterior_predictive(self) -> FamilyMember:
        w = self.posterior_weights()
        if self.is_conditional:
            rows = sum(wk * m.rows for wk, m in zip(w, self.members))
            first = self.members[0]
            return ConditionalBelief(first.cond_labels, first.domain_labels, rows)
        probs = sum(wk * m.probs for wk, m in zip(w, self.members))
        return FiniteDistribution(self.members[0].labels, probs)


def restricted_posterior_predictive(agent: RestrictedFamilyAgent, data: Iterable) -> FamilyMember:
    """Predictive after observing ``data`` (symbols, or (y, x) pairs)."""
    return agent.observe_batch(data).posterior_predictive()
