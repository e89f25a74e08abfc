"""Numerical checks for the package's information-theoretic claims."""

from .convergence import brute_force_v_info, check_convergence_mi, check_convergence_v_info
from .description_length import check_mdl_sdl, closed_form_code_length, streamed_code_length
from .dpi import PoissonSigmoidWorld, check_dpi_violation
from .identities import check_decomposition, check_upper_bound
from .ill_formed import check_illformed_loss
from .report import TheoremReport
from .runner import CHECKS, read_reports, run_checks, summary_table, write_reports
from .symmetry import check_symmetry_consistent, check_symmetry_violated_inconsistent

__all__ = [
    "CHECKS",
    "PoissonSigmoidWorld",
    "TheoremReport",
    "brute_force_v_info",
    "check_convergence_mi",
    "check_convergence_v_info",
    "check_decomposition",
    "check_dpi_violation",
    "check_illformed_loss",
    "check_mdl_sdl",
    "check_symmetry_consistent",
    "check_symmetry_violated_inconsistent",
    "check_upper_bound",
    "closed_form_code_length",
    "read_reports",
    "run_checks",
    "streamed_code_length",
    "summary_table",
    "write_reports",
]
