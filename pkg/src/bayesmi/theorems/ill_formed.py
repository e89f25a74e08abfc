"""Information loss under ill-formed beliefs.

When the truth lies outside a restricted belief family, pinning the
parameter at its best member still leaves a residual code-length penalty:
the information the data carries about the parameter falls short of the
agent's apparent surplus entropy by exactly KL(p || best member).
"""

from __future__ import annotations

import numpy as np

from .. import info
from ..agents import RestrictedFamilyAgent
from ..distributions import FiniteDistribution
from ._common import Recorder, random_distribution
from .report import TheoremReport

GAP_TOL = 1e-9


def _loss_gap(p: FiniteDistribution, members, n_data: int, rng: np.random.Generator):
    """Both sides of the inequality plus the predicted gap, in bits."""
    agent = RestrictedFamilyAgent(members)
    data = [p.labels[i] for i in rng.choice(len(p), size=n_data, p=p.probs)]
    posterior = agent.observe_batch(data)
    predictive = posterior.posterior_predictive()

    kls = [info.kl_divergence(p, m) for m in members]
    best = members[int(np.argmin(kls))]

    entropy_with_data = info.bayesian_entropy(p, predictive)
    parameter_information = entropy_with_data - info.bayesian_entropy(p, best)
    apparent_surplus = entropy_with_data - info.entropy(p)
    return parameter_information, apparent_surplus, min(kls)


def check_illformed_loss(seed: int = 0, n_data: int = 500, instances: int = 20) -> TheoremReport:
    rng = np.random.default_rng(seed)
    rec = Recorder()
    worst_residual = 0.0
    min_gap = np.inf
    for k in range(instances):
        size = int(rng.integers(2, 6))
        p = random_distribution(rng, size)
        members = tuple(random_distribution(rng, size) for _ in range(int(rng.integers(2, 6))))
        lhs, rhs, predicted_gap = _loss_gap(p, members, n_data, rng)
        residual = abs((rhs - lhs) - predicted_gap)
        worst_residual = max(worst_residual, residual)
        min_gap = min(min_gap, rhs - lhs)
        rec.require(lhs < rhs, "strict information loss", instance=k, lhs=lhs, rhs=rhs)
        rec.require(residual < GAP_TOL, "gap equals KL to best member", instance=k, residual=residual)
        rec.require(predicted_gap > 0, "truth genuinely outside family", instance=k, gap=predicted_gap)

    # control: truth inside the family makes the gap exactly zero
    p = random_distribution(rng, 3)
    members = (p, random_distribution(rng, 3))
    lhs, rhs, predicted_gap = _loss_gap(p, members, n_data, rng)
    control_gap = rhs - lhs
    rec.require(predicted_gap == 0.0, "control family contains the truth", gap=predicted_gap)
    rec.require(abs(control_gap) < GAP_TOL, "control gap vanishes", gap=control_gap)

    return TheoremReport(
        theorem_id="t7",
        passed=rec.passed,
        description="parameter information falls short of surplus entropy by KL to the best member",
        quantities={
            "worst_gap_residual_bits": worst_residual,
            "smallest_gap_bits": min_gap,
            "control_gap_bits": control_gap,
        },
        tolerances={"gap_identity": GAP_TOL},
        parameters={"n_data": n_data, "instances": instances},
        seed=seed,
        failure=rec.failure,
    )
