"""Monte Carlo estimators, inequality checks and result files."""

from .trials import TrialInstance, build_trial
from .estimators import (
    ThetaEstimate,
    LambdaCBracket,
    coupled_outcomes,
    estimate_theta,
    sweep_theta,
    profile_outcomes,
    estimate_theta_profile,
    profile_sum,
    trial_thresholds,
    estimate_lambda_c,
    theta_from_thresholds,
)
from .sharpness import INSUFFICIENT_DATA, RegressionFit, DecayRow, SharpnessReport, fit_decay, fit_linear_growth, fit_sharpness
from .influence import (
    InfluenceEstimate,
    RevealmentEstimate,
    point_of_mark,
    target_window,
    influence_blocks,
    estimate_influences,
    estimate_block_influences,
    russo_pivotal_sum,
    revealment_counts,
    estimate_revealment,
)
from .inequalities import DIVISION_DEGENERATE, InequalityKind, InequalityReport, Verdict, probe_blocks, verify_inequality
from .diagnostics import LevelDiagnostics, SiteDiagnostics, block_is_good, site_diagnostics
from .reports import (
    THETA_COLUMNS,
    REVEALMENT_COLUMNS,
    plain,
    write_table,
    read_table,
    theta_frame,
    write_theta_table,
    revealment_frame,
    write_revealment_table,
    write_report,
    read_report,
)

__all__ = [
    'TrialInstance',
    'build_trial',
    'ThetaEstimate',
    'LambdaCBracket',
    'coupled_outcomes',
    'estimate_theta',
    'sweep_theta',
    'profile_outcomes',
    'estimate_theta_profile',
    'profile_sum',
    'trial_thresholds',
    'estimate_lambda_c',
    'theta_from_thresholds',
    'INSUFFICIENT_DATA',
    'RegressionFit',
    'DecayRow',
    'SharpnessReport',
    'fit_decay',
    'fit_linear_growth',
    'fit_sharpness',
    'InfluenceEstimate',
    'RevealmentEstimate',
    'point_of_mark',
    'target_window',
    'influence_blocks',
    'estimate_influences',
    'estimate_block_influences',
    'russo_pivotal_sum',
    'revealment_counts',
    'estimate_revealment',
    'DIVISION_DEGENERATE',
    'InequalityKind',
    'InequalityReport',
    'Verdict',
    'probe_blocks',
    'verify_inequality',
    'LevelDiagnostics',
    'SiteDiagnostics',
    'block_is_good',
    'site_diagnostics',
    'THETA_COLUMNS',
    'REVEALMENT_COLUMNS',
    'plain',
    'write_table',
    'read_table',
    'theta_frame',
    'write_theta_table',
    'revealment_frame',
    'write_revealment_table',
    'write_report',
    'read_report',
]
