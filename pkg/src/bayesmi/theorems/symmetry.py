"""Direction symmetry of Bayesian MI: holds for consistent agents, fails otherwise.

A consistent agent derives all four of its beliefs from one joint belief,
so Bayes' rule ties them together and the two directions of its Bayesian
MI agree.  An agent whose beliefs do not cohere that way can give the two
directions different values; the sharpest case is a point-mass true joint,
where each direction reads off a single belief ratio.
"""

from __future__ import annotations

import math

import numpy as np

from .. import info
from ..agents import IllustrativeAgent, JointDirichletAgent
from ..distributions import FiniteDistribution, JointDistribution
from ._common import Recorder, random_joint, sample_pair_counts
from .report import TheoremReport

SYMMETRY_TOL = 1e-10
GAP_MIN = 1e-6


def check_symmetry_consistent(trials: int = 100, seed: int = 0) -> TheoremReport:
    """Both MI directions agree for joint-belief agents at any data size."""
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    rec = Recorder()
    worst = 0.0
    for trial in range(trials):
        nx = int(rng.integers(2, 6))
        ny = int(rng.integers(2, 6))
        true_joint = random_joint(rng, nx, ny)
        n = int(rng.integers(0, 2000))
        counts = sample_pair_counts(rng, true_joint, n)
        agent = JointDirichletAgent(range(nx), range(ny), counts=counts)
        gap = abs(agent.bayesian_mi_forward(true_joint) - agent.bayesian_mi_reverse(true_joint))
        worst = max(worst, gap)
        rec.require(gap < SYMMETRY_TOL, "directions agree", trial=trial, gap=gap, n=n, nx=nx, ny=ny)

    # no data, uniform prior: both directions are exactly zero
    fresh = JointDirichletAgent(range(3), range(4))
    some_joint = random_joint(rng, 3, 4)
    f0 = fresh.bayesian_mi_forward(some_joint)
    r0 = fresh.bayesian_mi_reverse(some_joint)
    rec.require(abs(f0) < SYMMETRY_TOL and abs(r0) < SYMMETRY_TOL, "no-data MI is zero", forward=f0, reverse=r0)

    return TheoremReport(
        theorem_id="t1",
        passed=rec.passed,
        description="consistent agents give direction-symmetric Bayesian MI",
        quantities={"worst_gap_bits": worst, "no_data_forward": f0, "no_data_reverse": r0},
        tolerances={"symmetry": SYMMETRY_TOL},
        parameters={"trials": trials},
        seed=seed,
        failure=rec.failure,
    )


def check_symmetry_violated_inconsistent(c: int = 2) -> TheoremReport:
    """A point-mass world exposes the asymmetry of an inconsistent agent.

    With all true mass on one diagonal cell, each MI direction reduces to
    a log ratio of two beliefs.  The biased agent's forward ratio is
    2c/(c+1) while its reverse ratio is 1, so the directions split by
    log2(2c/(c+1)) bits.  Swapping in a joint-belief agent as a control
    collapses the gap.
    """
    agent = IllustrativeAgent(c)
    labels = agent.labels
    table = np.zeros((c, c))
    table[0, 0] = 1.0
    world = JointDistribution(labels, labels, table)

    forward = info.bayesian_mi(world, agent.predictive_x(), agent.predictive_x_given_y())
    reverse = info.bayesian_mi(world.transpose(), agent.predictive_y(), agent.predictive_y_given_x())
    gap = abs(forward - reverse)
    expected_forward = math.log2(2 * c / (c + 1))

    control = JointDirichletAgent(labels, labels)
    control_gap = abs(control.bayesian_mi_forward(world) - control.bayesian_mi_reverse(world))

    rec = Recorder()
    rec.require(agent.bayes_rule_residual() > 0, "agent is inconsistent", residual=agent.bayes_rule_residual())
    rec.require(gap > GAP_MIN, "asymmetry gap exceeds threshold", forward=forward, reverse=reverse)
    rec.require(abs(forward - expected_forward) < 1e-12, "forward matches closed form", forward=forward, expected=expected_forward)
    rec.require(abs(reverse) < 1e-12, "reverse is zero", reverse=reverse)
    rec.require(control_gap < SYMMETRY_TOL, "consistent control is symmetric", control_gap=control_gap)

    return TheoremReport(
        theorem_id="t1x",
        passed=rec.passed,
        description="inconsistent agent shows direction-asymmetric Bayesian MI",
        quantities={
            "forward_bits": forward,
            "reverse_bits": reverse,
            "gap_bits": gap,
            "control_gap_bits": control_gap,
        },
        tolerances={"gap_min": GAP_MIN, "control_symmetry": SYMMETRY_TOL},
        parameters={"classes": c, "world": "point mass on matching classes"},
        failure=rec.failure,
    )
