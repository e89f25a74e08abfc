"""The numerical check suite: outcomes, determinism, reports, failure paths."""

import json

import numpy as np
import pytest

from bayesmi import info
from bayesmi.distributions import FiniteDistribution, JointDistribution
from bayesmi.theorems import (
    CHECKS,
    PoissonSigmoidWorld,
    TheoremReport,
    brute_force_v_info,
    check_convergence_mi,
    check_convergence_v_info,
    check_decomposition,
    check_dpi_violation,
    check_illformed_loss,
    check_mdl_sdl,
    check_symmetry_consistent,
    check_symmetry_violated_inconsistent,
    check_upper_bound,
    closed_form_code_length,
    read_reports,
    run_checks,
    streamed_code_length,
    summary_table,
    write_reports,
)
from bayesmi.theorems import symmetry as symmetry_module


class TestReports:
    def test_json_round_trip(self):
        report = check_symmetry_violated_inconsistent()
        again = TheoremReport.from_json(report.to_json())
        assert again.theorem_id == report.theorem_id
        assert again.passed == report.passed
        assert again.to_json() == report.to_json()

    def test_failing_report_requires_instance(self):
        with pytest.raises(ValueError):
            TheoremReport(theorem_id="t0", passed=False, description="broken")

    def test_failing_report_carries_instance(self):
        report = TheoremReport(
            theorem_id="t0", passed=False, description="broken",
            failure={"assertion": "x", "value": 1.0},
        )
        assert json.loads(report.to_json())["failure"]["assertion"] == "x"

    def test_file_round_trip(self, tmp_path):
        reports = run_checks(["t1x", "t6"])
        path = tmp_path / "reports.json"
        write_reports(reports, path)
        loaded = read_reports(path)
        assert [r.theorem_id for r in loaded] == ["t1x", "t6"]
        assert all(r.passed for r in loaded)


class TestRunner:
    def test_unknown_id_rejected(self):
        with pytest.raises(KeyError):
            run_checks(["t99"])

    def test_declaration_order_regardless_of_request_order(self):
        reports = run_checks(["t6", "t1x"])
        assert [r.theorem_id for r in reports] == ["t1x", "t6"]

    def test_summary_table_counts(self):
        reports = run_checks(["t1x"])
        table = summary_table(reports)
        assert "1/1 checks passed" in table
        assert "t1x" in table

    def test_all_ids_have_checks(self):
        assert set(CHECKS) == {"t1", "t1x", "t2", "t3", "t4", "t5", "t6", "t7", "mdl"}


class TestSymmetry:
    def test_consistent_agents_symmetric(self):
        report = check_symmetry_consistent(trials=30, seed=11)
        assert report.passed
        assert report.quantities["worst_gap_bits"] < 1e-10

    def test_deterministic_given_seed(self):
        a = check_symmetry_consistent(trials=10, seed=5)
        b = check_symmetry_consistent(trials=10, seed=5)
        assert a.to_json() == b.to_json()

    def test_inconsistent_agent_asymmetric(self):
        report = check_symmetry_violated_inconsistent()
        assert report.passed
        assert report.quantities["gap_bits"] > 1e-6
        assert report.quantities["forward_bits"] == pytest.approx(np.log2(4 / 3), abs=1e-12)
        assert report.quantities["reverse_bits"] == pytest.approx(0.0, abs=1e-12)

    def test_tampered_tolerance_fails_with_instance(self, monkeypatch):
        monkeypatch.setattr(symmetry_module, "SYMMETRY_TOL", -1.0)
        report = check_symmetry_consistent(trials=3, seed=0)
        assert not report.passed
        assert report.failure is not None
        assert "assertion" in report.failure


class TestDpi:
    def test_violation_with_flat_prior(self):
        report = check_dpi_violation(seed=0)
        assert report.passed
        q = report.quantities
        assert q["violation_bits"] > 0
        assert q["quadrature_shift_bits"] < 1e-8
        assert q["truncation_shift_bits"] < 1e-9
        assert abs(q["degenerate_gap_bits"]) < 1e-10

    def test_violation_survives_some_data(self):
        report = check_dpi_violation(n_data=5, seed=3)
        assert report.passed
        assert report.quantities["violation_bits"] > 0

    def test_world_validation(self):
        with pytest.raises(ValueError):
            PoissonSigmoidWorld(true_mean=-1.0)
        with pytest.raises(ValueError):
            PoissonSigmoidWorld(prior_rate=0.0)

    def test_support_tail_is_tiny(self):
        world = PoissonSigmoidWorld()
        joint = world.true_joint()
        from scipy import stats

        assert stats.poisson.sf(max(joint.y_labels), world.true_mean) < world.tail_mass

    def test_deterministic(self):
        a = check_dpi_violation(n_data=3, seed=9)
        b = check_dpi_violation(n_data=3, seed=9)
        assert a.to_json() == b.to_json()


class TestUpperBound:
    def test_no_violations_on_assumption_holding_instances(self):
        report = check_upper_bound(trials=60, seed=2)
        assert report.passed
        assert report.quantities["worst_excess_bits"] <= 1e-10
        assert 0 < report.quantities["assumption_hold_rate"] <= 1

    def test_biased_agent_instance_reported(self):
        report = check_upper_bound(trials=20, seed=0)
        assert report.quantities["biased_agent_mi_bits"] < 0


class TestConvergence:
    def test_mi_convergence(self):
        report = check_convergence_mi(seed=1)
        assert report.passed
        assert report.quantities["worst_final_error_bits"] < 0.01
        assert abs(report.quantities["prior_mi_bits"]) < 1e-12

    def test_v_info_convergence(self):
        report = check_convergence_v_info(instances=4, seed=2)
        assert report.passed
        assert report.quantities["worst_final_deviation_bits"] < 0.02

    def test_brute_force_v_info_with_truth_inside(self):
        rng = np.random.default_rng(0)
        probs = rng.dirichlet(np.ones(9)).reshape(3, 3)
        joint = JointDistribution(range(3), range(3), probs)
        from bayesmi.distributions import ConditionalBelief

        uncond = [joint.marginal_x()]
        cond = [ConditionalBelief(range(3), range(3), [joint.conditional_x_given(y).probs for y in range(3)])]
        v = brute_force_v_info(joint, uncond, cond)
        assert v == pytest.approx(info.mutual_information(joint), abs=1e-12)


class TestDescriptionLength:
    def test_chain_rule_identity(self):
        rng = np.random.default_rng(4)
        seq = rng.choice(3, size=200, p=[0.5, 0.3, 0.2])
        closed = closed_form_code_length(np.bincount(seq, minlength=3))
        assert streamed_code_length(seq, 3) == pytest.approx(closed, abs=1e-9)

    def test_closed_form_single_uniform_symbol(self):
        assert closed_form_code_length([1, 0]) == pytest.approx(1.0, abs=1e-12)

    def test_full_check(self):
        report = check_mdl_sdl(n_max=2_000, seed=0, n_seeds=5)
        assert report.passed
        means = report.quantities["mean_surplus_bits"]
        assert means[-1] > means[0]
        assert report.quantities["max_bayesian_mi_bits"] <= report.quantities["source_entropy_bits"] + 1e-9


class TestIllFormed:
    def test_strict_loss_and_gap_identity(self):
        report = check_illformed_loss(seed=0, instances=8)
        assert report.passed
        assert report.quantities["smallest_gap_bits"] > 0
        assert report.quantities["worst_gap_residual_bits"] < 1e-9
        assert abs(report.quantities["control_gap_bits"]) < 1e-9


class TestDecomposition:
    def test_identity_tight(self):
        report = check_decomposition(trials=50, seed=7)
        assert report.passed
        assert report.quantities["worst_residual_bits"] < 1e-12
