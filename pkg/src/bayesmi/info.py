"""Information-theoretic quantities over finite discrete spaces, in bits.

Three layers of quantity live here:

* truth-grounded: ``surprisal``, ``entropy``, ``conditional_entropy``,
  ``mutual_information``, ``kl_divergence`` -- everything is an expectation
  under the true distribution;
* belief-only: ``belief_entropy``, ``belief_mi`` -- computed entirely under
  an agent's own beliefs, never touching the truth;
* mixed: ``cross_entropy`` / ``bayesian_entropy`` and ``bayesian_mi`` --
  expectations of belief surprisals under the true distribution.  The mixed
  mutual information is a difference of two cross-entropies, so it is
  direction-sensitive and can be negative; nothing here clamps it.

All functions are pure and operate on immutable inputs.
"""

from __future__ import annotations

import math
from typing import Sequence, Tuple

import numpy as np

from .distributions import (
    ConditionalBelief,
    DomainError,
    FiniteDistribution,
    JointDistribution,
    Label,
)

# Plain summation is fine for small domains; above this many cells we switch
# to exact compensated summation so large-domain convergence runs stay stable.
_COMPENSATED_THRESHOLD = 10_000


def _accumulate(terms: np.ndarray) -> float:
    terms = np.asarray(terms, dtype=np.float64).reshape(-1)
    if terms.size > _COMPENSATED_THRESHOLD:
        return math.fsum(terms)
    return float(terms.sum())


def _plogq(p: np.ndarray, q: np.ndarray) -> float:
    """sum p * log2(q) over cells with p > 0; -inf where q == 0 < p."""
    mask = p > 0.0
    if not mask.any():
        return 0.0
    qm = q[mask]
    if np.any(qm <= 0.0):
        return -math.inf
    return _accumulate(p[mask] * np.log2(qm))


def surprisal(p: FiniteDistribution, x: Label) -> float:
    """-log2 p(x); +inf for a zero-probability symbol."""
    px = p.prob(x)
    if px == 0.0:
        return math.inf
    return -math.log2(px)


def entropy(p: FiniteDistribution) -> float:
    """H(X) = -sum p log2 p, with 0 log 0 = 0."""
    return -_plogq(p.probs, p.probs)


def conditional_entropy(j: JointDistribution) -> float:
    """H(X|Y) = -sum_{x,y} p(x,y) log2 p(x|y); zero-mass y columns contribute 0."""
    py = j.probs.sum(axis=0)
    total = 0.0
    for col in range(py.size):
        if py[col] <= 0.0:
            continue
        pxy = j.probs[:, col]
        total -= _plogq(pxy, pxy / py[col])
    return total


def mutual_information(j: JointDistribution) -> float:
    """I(X;Y) = H(X) - H(X|Y).  Symmetric; nonnegative up to rounding."""
    return entropy(j.marginal_x()) - conditional_entropy(j)


def kl_divergence(p: FiniteDistribution, q: FiniteDistribution) -> float:
    """KL(p || q) in bits; +inf if q puts zero mass where p does not."""
    p.require_same_domain(q)
    mask = p.probs > 0.0
    if np.any(q.probs[mask] <= 0.0):
        return math.inf
    return _accumulate(p.probs[mask] * np.log2(p.probs[mask] / q.probs[mask]))


def cross_entropy(p_true: FiniteDistribution, q_belief: FiniteDistribution) -> float:
    """-sum p log2 q; equals entropy(p) + kl(p||q).  +inf on unsupported truth."""
    p_true.require_same_domain(q_belief)
    return -_plogq(p_true.probs, q_belief.probs)


def belief_entropy(q: FiniteDistribution) -> float:
    """Entropy with the belief in both slots: -sum q log2 q."""
    return entropy(q)


def belief_mi(
    qx: FiniteDistribution,
    qxy: ConditionalBelief,
    qy: FiniteDistribution,
) -> float:
    """Belief MI: H_b(X) - sum_y q(y) H_b(X|Y=y).  Ungrounded in the truth."""
    if qxy.domain_labels != qx.labels:
        raise DomainError(f"conditional domain {qxy.domain_labels!r} != {qx.labels!r}")
    if qxy.cond_labels != qy.labels:
        raise DomainError(f"conditioning domain {qxy.cond_labels!r} != {qy.labels!r}")
    cond = 0.0
    for i, w in enumerate(qy.probs):
        if w <= 0.0:
            continue
        row = qxy.rows[i]
        cond -= w * _plogq(row, row)
    return belief_entropy(qx) - cond


def bayesian_entropy(p_true: FiniteDistribution, q_posterior_predictive: FiniteDistribution) -> float:
    """Expected belief surprisal under the truth; a cross-entropy."""
    return cross_entropy(p_true, q_posterior_predictive)


def conditional_bayesian_entropy(p_joint: JointDistribution, q_x_given_y: ConditionalBelief) -> float:
    """-sum_{x,y} p(x,y) log2 q(x|y); zero-mass y columns contribute 0."""
    if q_x_given_y.domain_labels != p_joint.x_labels:
        raise DomainError(f"belief domain {q_x_given_y.domain_labels!r} != {p_joint.x_labels!r}")
    if q_x_given_y.cond_labels != p_joint.y_labels:
        raise DomainError(f"conditioning domain {q_x_given_y.cond_labels!r} != {p_joint.y_labels!r}")
    total = 0.0
    for col in range(len(p_joint.y_labels)):
        pxy = p_joint.probs[:, col]
        if pxy.sum() <= 0.0:
            continue
        total -= _plogq(pxy, q_x_given_y.rows[col])
    return total


def bayesian_mi(
    p_joint: JointDistribution,
    q_x: FiniteDistribution,
    q_x_given_y: ConditionalBelief,
) -> float:
    """Directional Bayesian MI of Y about X under a pair of beliefs.

    H_theta(X) - H_theta(X|Y), both cross-entropies against the true joint.
    Can be negative; callers must not clamp.  The reverse direction is
    ``bayesian_mi(p_joint.transpose(), q_y, q_y_given_x)``.
    """
    unconditional = cross_entropy(p_joint.marginal_x(), q_x)
    conditional = conditional_bayesian_entropy(p_joint, q_x_given_y)
    return unconditional - conditional


def empirical_bayesian_mi(
    samples: Sequence[Tuple[Label, Label]],
    q_x: FiniteDistribution,
    q_x_given_y: ConditionalBelief,
) -> float:
    """Sample-mean Bayesian MI from (y, x) pairs drawn from the true joint.

    Mean over samples of log2 q(x|y) - log2 q(x); converges to
    ``bayesian_mi`` as the sample count grows.
    """
    if len(samples) == 0:
        raise DomainError("empirical_bayesian_mi needs at least one sample")
    terms = np.empty(len(samples))
    for i, (y, x) in enumerate(samples):
        qc = q_x_given_y.prob(x, given=y)
        qu = q_x.prob(x)
        if qc == 0.0 or qu == 0.0:
            terms[i] = (-math.inf if qc == 0.0 else math.inf)
        else:
            terms[i] = math.log2(qc) - math.log2(qu)
    return _accumulate(terms) / len(samples)
