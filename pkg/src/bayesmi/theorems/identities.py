"""Identity-style checks: the Shannon upper bound and the entropy decomposition.

Both rest on the same expansion of Bayesian MI,

    I_b(Y -> X) = I(X;Y) + KL(p(x) || q(x)) - sum_y p(y) KL(p(x|y) || q(x|y)),

which follows from writing each cross-entropy as entropy plus KL.  The
upper bound holds whenever the agent's unconditional belief is at least
as close to the true marginal as the mixture of its conditionals is.
"""

from __future__ import annotations

import numpy as np

from .. import info
from ..agents import DirichletCategoricalAgent, IllustrativeAgent, JointDirichletAgent
from ..distributions import ConditionalBelief, FiniteDistribution, JointDistribution
from ._common import Recorder, random_distribution, random_joint, sample_pair_counts
from .report import TheoremReport

BOUND_SLACK = 1e-10
DECOMPOSITION_TOL = 1e-12


def _assumption_holds(true_joint: JointDistribution, q_x: FiniteDistribution, q_x_given_y: ConditionalBelief) -> bool:
    """KL(p_x || q_x) <= KL(p_x || sum_y q(x|y) p(y)), mixing with the TRUE p(y)."""
    p_x = true_joint.marginal_x()
    p_y = true_joint.marginal_y().probs
    mixture = FiniteDistribution(q_x_given_y.domain_labels, p_y @ q_x_given_y.rows)
    return info.kl_divergence(p_x, q_x) <= info.kl_divergence(p_x, mixture)


def check_upper_bound(trials: int = 200, seed: int = 0, max_attempts_factor: int = 50) -> TheoremReport:
    """Bayesian MI never exceeds Shannon MI on assumption-holding instances."""
    rng = np.random.default_rng(seed)
    rec = Recorder()
    held = 0
    attempts = 0
    worst_excess = -np.inf
    while held < trials and attempts < trials * max_attempts_factor:
        attempts += 1
        nx = int(rng.integers(2, 5))
        ny = int(rng.integers(2, 5))
        true_joint = random_joint(rng, nx, ny)
        # agent counts come from a different random joint, so beliefs are
        # genuinely off-target and the assumption fails on some draws
        source = random_joint(rng, nx, ny) if rng.random() < 0.5 else true_joint
        counts = sample_pair_counts(rng, source, int(rng.integers(0, 500)))
        agent = JointDirichletAgent(range(nx), range(ny), counts=counts)
        beliefs = agent.beliefs()
        if not _assumption_holds(true_joint, beliefs.q_x, beliefs.q_x_given_y):
            continue
        held += 1
        excess = agent.bayesian_mi_forward(true_joint) - info.mutual_information(true_joint)
        worst_excess = max(worst_excess, excess)
        rec.require(excess <= BOUND_SLACK, "bayesian MI bounded by Shannon MI", excess=excess, counts=counts)

    rec.require(held >= trials, "enough assumption-holding instances", held=held, attempts=attempts)

    # independent world: Shannon MI is 0, so the bound says the biased
    # agent's Bayesian MI must be <= 0, and indeed it is negative
    agent = IllustrativeAgent(2)
    uniform = FiniteDistribution.uniform(agent.labels)
    independent = JointDistribution.from_independent(uniform, uniform)
    assumption_ok = _assumption_holds(independent, agent.predictive_x(), agent.predictive_x_given_y())
    biased_mi = info.bayesian_mi(independent, agent.predictive_x(), agent.predictive_x_given_y())
    rec.require(assumption_ok, "biased-agent instance satisfies the assumption")
    rec.require(biased_mi <= BOUND_SLACK, "independent world forces MI <= 0", value=biased_mi)

    # well-trained agent: the bound is nearly tight
    tight_joint = random_joint(rng, 3, 3)
    tight_agent = JointDirichletAgent(range(3), range(3), counts=sample_pair_counts(rng, tight_joint, 100_000))
    tight_gap = info.mutual_information(tight_joint) - tight_agent.bayesian_mi_forward(tight_joint)
    rec.require(abs(tight_gap) < 0.01, "bound tight after long training", gap=tight_gap)

    return TheoremReport(
        theorem_id="t3",
        passed=rec.passed,
        description="Shannon MI upper-bounds Bayesian MI under the marginal-KL assumption",
        quantities={
            "worst_excess_bits": worst_excess,
            "assumption_hold_rate": held / attempts,
            "biased_agent_mi_bits": biased_mi,
            "trained_agent_gap_bits": tight_gap,
        },
        tolerances={"bound_slack": BOUND_SLACK, "tightness": 0.01},
        parameters={"trials": trials, "attempts": attempts},
        seed=seed,
        failure=rec.failure,
    )


def check_decomposition(trials: int = 100, seed: int = 0) -> TheoremReport:
    """Bayesian entropy = entropy + KL, exactly, for any belief."""
    rng = np.random.default_rng(seed)
    rec = Recorder()
    worst = 0.0
    for trial in range(trials):
        n = int(rng.integers(2, 7))
        p = random_distribution(rng, n)
        counts = rng.multinomial(int(rng.integers(0, 1000)), random_distribution(rng, n).probs)
        q = DirichletCategoricalAgent(p.labels, counts=counts).posterior_predictive()
        residual = abs(info.bayesian_entropy(p, q) - (info.entropy(p) + info.kl_divergence(p, q)))
        worst = max(worst, residual)
        rec.require(residual < DECOMPOSITION_TOL, "decomposition identity", trial=trial, residual=residual)
        if not np.allclose(p.probs, q.probs):
            rec.require(info.kl_divergence(p, q) > 0.0, "KL strictly positive for differing beliefs", trial=trial)

    # belief equal to the truth: the KL term vanishes identically
    p = random_distribution(rng, 4)
    self_residual = abs(info.bayesian_entropy(p, p) - info.entropy(p))
    rec.require(self_residual == 0.0, "truthful belief collapses to entropy", residual=self_residual)

    return TheoremReport(
        theorem_id="t6",
        passed=rec.passed,
        description="Bayesian entropy decomposes as entropy plus KL",
        quantities={"worst_residual_bits": worst, "truthful_residual_bits": self_residual},
        tolerances={"identity": DECOMPOSITION_TOL},
        parameters={"trials": trials},
        seed=seed,
        failure=rec.failure,
    )
