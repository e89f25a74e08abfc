"""Long-run behaviour: convergence to true MI, or to its family-restricted analogue.

A conjugate agent whose prior covers the whole simplex ends up with the
true joint, so its Bayesian MI approaches true MI.  An agent restricted
to an enumerated family instead concentrates on the family member with
the smallest expected code length, and its Bayesian MI approaches the
value obtained by brute-force minimization over the family.
"""

from __future__ import annotations

import numpy as np

from .. import info
from ..agents import JointDirichletAgent, RestrictedFamilyAgent
from ..distributions import ConditionalBelief, FiniteDistribution, JointDistribution
from ._common import Recorder, random_joint
from .report import TheoremReport

FINAL_ERROR_TOL = 0.01
TREND_FRACTION = 0.9
V_INFO_TOL = 0.02


def _prefix_count_errors(joint, draws, checkpoints):
    nx, ny = joint.probs.shape
    true_mi = info.mutual_information(joint)
    errors = []
    for n in checkpoints:
        counts = np.bincount(draws[:n], minlength=nx * ny).reshape(nx, ny)
        agent = JointDirichletAgent(joint.x_labels, joint.y_labels, counts=counts)
        errors.append(abs(agent.bayesian_mi_forward(joint) - true_mi))
    return np.array(errors)


def check_convergence_mi(
    n_seeds: int = 20,
    n_final: int = 100_000,
    n_checkpoints: int = 9,
    shape=(3, 3),
    seed: int = 0,
) -> TheoremReport:
    checkpoints = np.unique(np.round(np.logspace(1, np.log10(n_final), n_checkpoints)).astype(int))
    rec = Recorder()
    all_errors = []
    for s in range(n_seeds):
        rng = np.random.default_rng([seed, s])
        joint = random_joint(rng, *shape)
        draws = rng.choice(joint.probs.size, size=n_final, p=joint.probs.ravel())
        all_errors.append(_prefix_count_errors(joint, draws, checkpoints))
    all_errors = np.array(all_errors)

    final_errors = all_errors[:, -1]
    rec.require(final_errors.max() < FINAL_ERROR_TOL, "final error small in every seed",
                worst=final_errors.max(), checkpoint=int(checkpoints[-1]))

    decade_idx = int(np.argmin(np.abs(checkpoints - n_final / 10)))
    improved = all_errors[:, decade_idx] > all_errors[:, -1]
    rec.require(improved.mean() >= TREND_FRACTION, "error drops over the last decade in most seeds",
                fraction=improved.mean(), compared=(int(checkpoints[decade_idx]), int(checkpoints[-1])))

    medians = np.median(all_errors, axis=0)
    rec.require(bool(np.all(np.diff(medians) <= 0)), "median error nonincreasing along the schedule",
                medians=medians)

    # no data: the prior joint belief is exchangeable-uniform, so MI is zero
    rng = np.random.default_rng(seed)
    fresh = JointDirichletAgent(range(shape[0]), range(shape[1]))
    prior_mi = fresh.bayesian_mi_forward(random_joint(rng, *shape))
    rec.require(abs(prior_mi) < 1e-12, "prior Bayesian MI is zero", value=prior_mi)

    return TheoremReport(
        theorem_id="t4",
        passed=rec.passed,
        description="well-formed agent's Bayesian MI converges to true MI",
        quantities={
            "worst_final_error_bits": final_errors.max(),
            "median_errors_bits": medians,
            "improving_seed_fraction": improved.mean(),
            "prior_mi_bits": prior_mi,
        },
        tolerances={"final_error": FINAL_ERROR_TOL, "trend_fraction": TREND_FRACTION},
        parameters={"n_seeds": n_seeds, "n_final": n_final, "checkpoints": checkpoints},
        seed=seed,
        failure=rec.failure,
    )


def _random_conditional(rng, ny, nx):
    return ConditionalBelief(range(ny), range(nx), rng.dirichlet(np.ones(nx), size=ny))


def brute_force_v_info(joint: JointDistribution, uncond_members, cond_members) -> float:
    """Best-in-family unconditional minus best-in-family conditional code length."""
    p_x = joint.marginal_x()
    best_uncond = min(info.cross_entropy(p_x, q) for q in uncond_members)
    best_cond = min(info.conditional_bayesian_entropy(joint, q) for q in cond_members)
    return best_uncond - best_cond


def _family_mi_at(joint, uncond_members, cond_members, xs, ys, n):
    """Bayesian MI of the paired restricted-family agents after n observations."""
    p_x = joint.marginal_x()

    logp_u = np.log(np.stack([m.probs for m in uncond_members]))
    lw_u = -np.log(len(uncond_members)) + logp_u[:, xs[:n]].sum(axis=1)
    agent_u = RestrictedFamilyAgent(uncond_members, log_weights=lw_u)

    logp_c = np.log(np.stack([m.rows for m in cond_members]))
    lw_c = -np.log(len(cond_members)) + logp_c[:, ys[:n], xs[:n]].sum(axis=1)
    agent_c = RestrictedFamilyAgent(cond_members, log_weights=lw_c)

    uncond_ce = info.cross_entropy(p_x, agent_u.posterior_predictive())
    cond_ce = info.conditional_bayesian_entropy(joint, agent_c.posterior_predictive())
    return uncond_ce - cond_ce


def check_convergence_v_info(
    instances: int = 10,
    family_size: int = 5,
    n_final: int = 10_000,
    schedule=(100, 1_000, 10_000),
    seed: int = 0,
) -> TheoremReport:
    rec = Recorder()
    worst_final = 0.0
    for k in range(instances + 1):
        rng = np.random.default_rng([seed, k])
        joint = random_joint(rng, 3, 3)
        uncond = [FiniteDistribution(range(3), rng.dirichlet(np.ones(3))) for _ in range(family_size)]
        cond = [_random_conditional(rng, 3, 3) for _ in range(family_size)]
        truth_inside = k == instances
        if truth_inside:
            # last instance: plant the truth in both families
            uncond.append(joint.marginal_x())
            cond.append(ConditionalBelief(joint.y_labels, joint.x_labels,
                                          [joint.conditional_x_given(y).probs for y in joint.y_labels]))

        target = brute_force_v_info(joint, uncond, cond)
        flat = rng.choice(9, size=n_final, p=joint.probs.ravel())
        xs, ys = flat // 3, flat % 3
        path = [_family_mi_at(joint, uncond, cond, xs, ys, n) for n in schedule]
        deviation = abs(path[-1] - target)
        worst_final = max(worst_final, deviation)
        rec.require(deviation < V_INFO_TOL, "agent reaches the brute-force value",
                    instance=k, got=path[-1], target=target)
        if truth_inside:
            gap = abs(target - info.mutual_information(joint))
            rec.require(gap < 1e-10, "truth-inside family recovers true MI", gap=gap)

    # whenever the unconditional family contains the true marginal, the
    # restricted value cannot exceed true MI
    for k in range(5):
        rng = np.random.default_rng([seed, 1000 + k])
        joint = random_joint(rng, 3, 3)
        uncond = [joint.marginal_x()] + [FiniteDistribution(range(3), rng.dirichlet(np.ones(3))) for _ in range(4)]
        cond = [_random_conditional(rng, 3, 3) for _ in range(family_size)]
        v = brute_force_v_info(joint, uncond, cond)
        rec.require(v <= info.mutual_information(joint) + 1e-10, "restricted value below true MI",
                    instance=k, v_info=v, true_mi=info.mutual_information(joint))

    return TheoremReport(
        theorem_id="t5",
        passed=rec.passed,
        description="restricted-family agent converges to the brute-force family optimum",
        quantities={"worst_final_deviation_bits": worst_final},
        tolerances={"final_deviation": V_INFO_TOL},
        parameters={"instances": instances, "family_size": family_size,
                    "n_final": n_final, "schedule": list(schedule)},
        seed=seed,
        failure=rec.failure,
    )
