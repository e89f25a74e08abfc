"""Data-processing inequality: true MI obeys it, Bayesian MI need not.

The world: Y is Poisson with mean theta_true, and X is a biased coin
whose bias is a sigmoid of Y centred at the true mean.  The agent knows
this structure but not the mean, holding a Gamma prior over it.

Conditioning on raw Y leaves the agent averaging the sigmoid over its
parameter uncertainty, so its conditional beliefs miss the truth.  The
processed value z = y - theta_true feeds the sigmoid directly and the
unknown parameter drops out of the conditional belief, which becomes
exactly the true one.  Processing therefore strictly helps the agent,
reversing the inequality that true MI must satisfy.

All expectations over Y are exact truncated sums; expectations over the
parameter use fixed-order Gauss-Legendre quadrature against the Gamma
prior or the data posterior.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import expit, log_expit

from .. import info
from ..distributions import ConditionalBelief, FiniteDistribution, JointDistribution
from ._common import Recorder
from .report import TheoremReport

VIOLATION_MIN = 1e-6
QUADRATURE_TOL = 1e-8
TRUNCATION_TOL = 1e-9
SHANNON_TOL = 1e-10


@dataclass(frozen=True)
class PoissonSigmoidWorld:
    """Poisson count with unknown mean driving a sigmoid-biased binary X."""

    true_mean: float = 5.0
    prior_shape: float = 2.0
    prior_rate: float = 0.5
    tail_mass: float = 1e-10

    def __post_init__(self):
        if self.true_mean <= 0 or self.prior_shape <= 0 or self.prior_rate <= 0:
            raise ValueError("true mean and prior parameters must be positive")

    @property
    def prior(self):
        return stats.gamma(self.prior_shape, scale=1.0 / self.prior_rate)

    def theta_range(self):
        return float(self.prior.ppf(1e-13)), float(self.prior.isf(1e-13))

    def support(self, extend: int = 0) -> np.ndarray:
        """Y values kept for exact summation; covers the prior's plausible means."""
        _, hi = self.theta_range()
        k = int(max(stats.poisson.isf(1e-13, hi), stats.poisson.isf(self.tail_mass, self.true_mean))) + 5
        ys = np.arange(0, k + 1 + extend)
        if stats.poisson.sf(ys[-1], self.true_mean) >= self.tail_mass:
            raise ValueError("truncated support leaves too much tail mass")
        return ys

    def true_joint(self, extend: int = 0) -> JointDistribution:
        ys = self.support(extend)
        p_y = stats.poisson.pmf(ys, self.true_mean)
        p_y = p_y / p_y.sum()
        bias = expit(ys - self.true_mean)
        table = np.stack([p_y * (1.0 - bias), p_y * bias])
        return JointDistribution((0, 1), tuple(int(y) for y in ys), table)

    def sample_data(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n iid (y, x) pairs from the true world, over the truncated support."""
        ys_support = self.support()
        p_y = stats.poisson.pmf(ys_support, self.true_mean)
        ys = rng.choice(ys_support, size=n, p=p_y / p_y.sum())
        xs = (rng.random(n) < expit(ys - self.true_mean)).astype(int)
        return np.stack([ys, xs], axis=1)


def _quadrature(world: PoissonSigmoidWorld, n_nodes: int):
    lo, hi = world.theta_range()
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    thetas = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    weights = 0.5 * (hi - lo) * w * world.prior.pdf(thetas)
    return thetas, weights


def _posterior_weights(world, thetas, prior_weights, data):
    if data is None or len(data) == 0:
        return prior_weights
    ys, xs = data[:, 0], data[:, 1]
    z = ys[np.newaxis, :] - thetas[:, np.newaxis]
    loglik = (
        stats.poisson.logpmf(ys[np.newaxis, :], thetas[:, np.newaxis])
        + np.where(xs[np.newaxis, :] == 1, log_expit(z), log_expit(-z))
    ).sum(axis=1)
    shifted = loglik - loglik.max()
    weights = prior_weights * np.exp(shifted)
    if weights.sum() <= 0:
        raise ArithmeticError("posterior weights underflowed")
    return weights


def _agent_beliefs(world, support, thetas, weights):
    """Unconditional q(x) and per-y conditional rows, given parameter weights."""
    pmf = stats.poisson.pmf(support[np.newaxis, :], thetas[:, np.newaxis])
    tails = 1.0 - pmf.sum(axis=1)
    if np.any(tails >= 1e-9):
        raise ValueError("support too narrow for the parameter range")
    bias = expit(support[np.newaxis, :] - thetas[:, np.newaxis])

    w = weights / weights.sum()
    # conditioning on y also informs the parameter, so each row reweights by p(y|theta)
    denom = w @ pmf
    numer = w @ (pmf * bias)
    q1 = np.where(denom > 0, numer / np.where(denom > 0, denom, 1.0), 0.5)
    rows = np.stack([1.0 - q1, q1], axis=1)

    q1_uncond = float(w @ (pmf * bias).sum(axis=1) / (w @ pmf.sum(axis=1)))
    q_x = FiniteDistribution((0, 1), [1.0 - q1_uncond, q1_uncond])
    return q_x, rows


def _both_mis(world, n_data_pairs, n_nodes, extend=0):
    """Bayesian MI conditioning on raw Y and on the processed z = y - true_mean."""
    joint = world.true_joint(extend)
    support = np.array(joint.y_labels, dtype=float)
    thetas, prior_w = _quadrature(world, n_nodes)
    weights = _posterior_weights(world, thetas, prior_w, n_data_pairs)
    q_x, rows = _agent_beliefs(world, support, thetas, weights)

    cond_y = ConditionalBelief(joint.y_labels, (0, 1), rows)
    mi_raw = info.bayesian_mi(joint, q_x, cond_y)

    z_labels = tuple(float(y) - world.true_mean for y in joint.y_labels)
    joint_z = JointDistribution((0, 1), z_labels, joint.probs)
    g = expit(np.array(z_labels))
    cond_z = ConditionalBelief(z_labels, (0, 1), np.stack([1.0 - g, g], axis=1))
    mi_processed = info.bayesian_mi(joint_z, q_x, cond_z)
    return mi_raw, mi_processed, joint, joint_z, cond_z


def check_dpi_violation(
    world: PoissonSigmoidWorld = None,
    n_data: int = 0,
    seed: int = 0,
    n_nodes: int = 200,
) -> TheoremReport:
    world = world or PoissonSigmoidWorld()
    rng = np.random.default_rng(seed)
    data = world.sample_data(n_data, rng) if n_data > 0 else None
    rec = Recorder()

    mi_raw, mi_processed, joint, joint_z, cond_z = _both_mis(world, data, n_nodes)
    violation = mi_processed - mi_raw
    rec.require(violation > VIOLATION_MIN, "processing strictly helps the agent",
                mi_raw=mi_raw, mi_processed=mi_processed)

    # the processed-side beliefs are exactly the true conditionals
    belief_gap = abs(info.conditional_bayesian_entropy(joint_z, cond_z) - info.conditional_entropy(joint))
    rec.require(belief_gap < 1e-12, "processed beliefs match the truth", gap=belief_gap)

    # quadrature self-convergence: doubling the nodes barely moves either MI
    raw2, proc2, *_ = _both_mis(world, data, 2 * n_nodes)
    quad_shift = max(abs(raw2 - mi_raw), abs(proc2 - mi_processed))
    rec.require(quad_shift < QUADRATURE_TOL, "quadrature self-convergence", shift=quad_shift)

    # truncation robustness: widening the support is invisible at tolerance
    raw3, proc3, *_ = _both_mis(world, data, n_nodes, extend=10)
    trunc_shift = max(abs(raw3 - mi_raw), abs(proc3 - mi_processed))
    rec.require(trunc_shift < TRUNCATION_TOL, "truncation robustness", shift=trunc_shift)

    # Shannon-side controls: true MI is nonnegative, respects the bijection,
    # and conditioning never increases true entropy
    shannon_y = info.mutual_information(joint)
    shannon_z = info.mutual_information(joint_z)
    rec.require(shannon_y >= -1e-12, "true MI nonnegative", value=shannon_y)
    rec.require(abs(shannon_y - shannon_z) < SHANNON_TOL, "bijective processing preserves true MI",
                raw=shannon_y, processed=shannon_z)
    rec.require(
        info.conditional_entropy(joint) <= info.entropy(joint.marginal_x()) + 1e-12,
        "conditioning reduces true entropy",
    )

    # degenerate prior (point mass at the true mean): beliefs equal the truth
    # on both sides and the violation disappears
    support = np.array(joint.y_labels, dtype=float)
    theta_hat = np.array([world.true_mean])
    unit = np.array([1.0])
    q_x_deg, rows_deg = _agent_beliefs(world, support, theta_hat, unit)
    deg_raw = info.bayesian_mi(joint, q_x_deg, ConditionalBelief(joint.y_labels, (0, 1), rows_deg))
    deg_proc = info.bayesian_mi(joint_z, q_x_deg, cond_z)
    rec.require(abs(deg_proc - deg_raw) < SHANNON_TOL, "degenerate prior removes the violation",
                raw=deg_raw, processed=deg_proc)

    return TheoremReport(
        theorem_id="t2",
        passed=rec.passed,
        description="Bayesian MI violates the data-processing inequality",
        quantities={
            "mi_raw_bits": mi_raw,
            "mi_processed_bits": mi_processed,
            "violation_bits": violation,
            "shannon_mi_bits": shannon_y,
            "quadrature_shift_bits": quad_shift,
            "truncation_shift_bits": trunc_shift,
            "degenerate_gap_bits": abs(deg_proc - deg_raw),
        },
        tolerances={
            "violation_min": VIOLATION_MIN,
            "quadrature": QUADRATURE_TOL,
            "truncation": TRUNCATION_TOL,
            "shannon": SHANNON_TOL,
        },
        parameters={
            "true_mean": world.true_mean,
            "prior_shape": world.prior_shape,
            "prior_rate": world.prior_rate,
            "n_data": n_data,
            "n_nodes": n_nodes,
        },
        seed=seed,
        failure=rec.failure,
    )
