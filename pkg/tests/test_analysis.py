"""
Unit tests for the Monte Carlo estimators, inequality checks and result files.
"""

import math
import pytest
from pathlib import Path
import sys

import numpy as np
import pandas as pd

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analysis import (
    INSUFFICIENT_DATA,
    THETA_COLUMNS,
    InequalityKind,
    ThetaEstimate,
    Verdict,
    block_is_good,
    coupled_outcomes,
    estimate_influences,
    estimate_lambda_c,
    estimate_revealment,
    estimate_theta,
    estimate_theta_profile,
    fit_decay,
    fit_linear_growth,
    fit_sharpness,
    plain,
    point_of_mark,
    profile_sum,
    read_report,
    read_table,
    revealment_counts,
    site_diagnostics,
    sweep_theta,
    theta_from_thresholds,
    trial_thresholds,
    verify_inequality,
    write_report,
    write_table,
    write_theta_table,
)
from src.environment import build_environment
from src.lattice import BlockWindow, sup_norm
from src.percolation import required_blocks
from src.utils import binomial_se, wilson_interval
from src.utils.errors import (
    BadHeaderError,
    CrossingIndexError,
    NoSignChangeError,
    OutOfWindowError,
    ParameterValidationError,
    SampleSizeError,
)


class TestTheta:
    def test_small_index_is_certain(self, tiny_params):
        est = estimate_theta(tiny_params, 0.0, 4, trials=7, seed=0)
        assert est.theta == 1.0
        assert est.hits == 7
        assert (est.ci_lo, est.ci_hi) == (1.0, 1.0)

    def test_zero_level_never_crosses(self, tiny_params):
        est = estimate_theta(tiny_params, 0.0, 5, trials=3, seed=0)
        assert est.theta == 0.0
        assert est.ci_lo == 0.0
        assert est.ci_hi > 0.0

    def test_trials_must_be_positive(self, tiny_params):
        with pytest.raises(ValueError):
            estimate_theta(tiny_params, 1.0, 5, trials=0, seed=0)

    def test_sweep_is_coupled_and_monotone(self, tiny_params):
        lambdas = [0.0, 0.02, 0.05, 0.1, 0.2]
        sweep = sweep_theta(tiny_params, lambdas, 6, trials=12, seed=3)
        hits = [e.hits for e in sweep]
        assert hits == sorted(hits)
        assert hits[0] == 0
        assert any(0 < h < 12 for h in hits)
        single = estimate_theta(tiny_params, 0.05, 6, trials=12, seed=3)
        assert single.hits == sweep[2].hits

    def test_outcome_rows_nondecreasing(self, tiny_params):
        rows = coupled_outcomes(tiny_params, [0.02, 0.05, 0.1], 6, trials=6, seed=1)
        assert rows.shape == (6, 3)
        assert np.all(rows[:, :-1] <= rows[:, 1:])

    def test_threads_do_not_change_results(self, tiny_params):
        one = coupled_outcomes(tiny_params, [0.03, 0.08], 6, trials=4, seed=8, threads=1)
        two = coupled_outcomes(tiny_params, [0.03, 0.08], 6, trials=4, seed=8, threads=2)
        assert np.array_equal(one, two)

    def test_profile_sum_starts_at_first_shell(self, tiny_params):
        profile = estimate_theta_profile(tiny_params, 0.0, 5, trials=2, seed=0)
        assert sorted(profile) == list(range(6))
        assert profile[0].theta == 1.0
        total, se = profile_sum(profile)
        assert total == pytest.approx(4.0)
        assert se == 0.0

    def test_profile_sum_of_given_table(self):
        profile = {s: ThetaEstimate.from_hits(0.1, s, 10, hits, seed=0) for s, hits in [(0, 10), (5, 8), (6, 5)]}
        assert profile[0].theta == 1.0
        total, se = profile_sum(profile)
        assert total == pytest.approx(1.3)
        assert se == pytest.approx(binomial_se(0.8, 10) + binomial_se(0.5, 10))

    def test_to_dict_uses_lambda_key(self):
        est = ThetaEstimate.from_hits(0.5, 6, 10, 3, seed=2)
        data = est.to_dict()
        assert data["lambda"] == 0.5
        assert "lam" not in data
        assert est.se == pytest.approx(binomial_se(0.3, 10))


class TestLambdaC:
    def test_thresholds_reproduce_coupled_outcomes(self, tiny_params):
        lambdas = [0.02, 0.04, 0.07, 0.1]
        taus = trial_thresholds(tiny_params, 6, trials=6, seed=4, lambda_max=0.1)
        rows = coupled_outcomes(tiny_params, lambdas, 6, trials=6, seed=4)
        for i, lam in enumerate(lambdas):
            assert theta_from_thresholds(taus, lam, 6, 4).hits == int(rows[:, i].sum())

    def test_bracket_contains_threshold(self, tiny_params):
        result = estimate_lambda_c(tiny_params, 6, trials=8, seed=2, threshold=0.5, tol=0.005, bracket=(0.0, 0.5))
        assert result.hi - result.lo <= 0.005
        assert result.theta_lo < 0.5 <= result.theta_hi
        assert result.lo <= result.midpoint <= result.hi
        assert "thresholds" not in result.to_dict()

    def test_no_sign_change(self, tiny_params):
        with pytest.raises(NoSignChangeError):
            estimate_lambda_c(tiny_params, 5, trials=3, seed=0, bracket=(0.0, 1e-9))

    def test_invalid_arguments(self, tiny_params):
        with pytest.raises(ValueError):
            estimate_lambda_c(tiny_params, 5, trials=3, seed=0, threshold=1.0)
        with pytest.raises(ValueError):
            estimate_lambda_c(tiny_params, 5, trials=3, seed=0, bracket=(1.0, 0.5))


class TestSharpness:
    def test_fit_decay_recovers_rate(self):
        ns = [5, 6, 7, 8, 9]
        fit = fit_decay(ns, [math.exp(-0.5 * n) for n in ns])
        assert fit.slope == pytest.approx(-0.5)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.n_points == 5

    def test_fit_decay_ignores_zeros(self):
        assert fit_decay([5, 6, 7], [0.2, 0.0, 0.0]) is None
        fit = fit_decay([5, 6, 7], [0.2, 0.1, 0.0])
        assert fit.n_points == 2

    def test_linear_growth(self):
        fit = fit_linear_growth([1.0, 1.5, 2.0], [0.1, 0.35, 0.6], lambda_c=1.0)
        assert fit.slope == pytest.approx(0.5)
        assert fit.intercept == pytest.approx(0.1)
        assert fit_linear_growth([1.0, 1.0], [0.1, 0.2], 0.5) is None

    def test_small_index_rejected(self, tiny_params):
        with pytest.raises(CrossingIndexError):
            fit_sharpness(tiny_params, [0.1, 1.0], [4, 6], trials=2, seed=0)

    def test_report_with_given_bracket(self, tiny_params):
        class Bracket:
            lo, hi = 0.5, 0.6

        report = fit_sharpness(tiny_params, [0.0, 0.1, 1.0, 2.0], [5, 6], trials=3, seed=1, bracket=Bracket())
        assert [row.lam for row in report.subcritical] == [0.0, 0.1]
        assert report.subcritical[0].note == INSUFFICIENT_DATA
        assert sorted(report.supercritical_thetas) == [1.0, 2.0]
        assert report.lambda_c_hat == pytest.approx(0.55)
        assert report.to_dict()["n_max"] == 6


class TestInfluence:
    def test_target_outside_window(self, tiny_params):
        with pytest.raises(OutOfWindowError):
            estimate_influences(tiny_params, 0.5, 5, (40, 0), trials=1, seed=0)

    def test_zero_level_has_no_influence(self, tiny_params):
        est = estimate_influences(tiny_params, 0.0, 5, (0, 0), trials=2, seed=0, piv_samples=3)
        assert (est.inf_x, est.inf_y, est.inf_joint) == (0.0, 0.0, 0.0)
        assert est.piv_samples == 6
        assert est.to_dict()["target"] == [0, 0]

    def test_far_target_never_flips(self, tiny_params):
        est = estimate_influences(tiny_params, 0.05, 6, (7, 7), trials=2, seed=0, piv_samples=2)
        assert est.inf_x == 0.0
        assert est.piv_integral == 0.0

    def test_origin_block_is_influential(self, tiny_params):
        est = estimate_influences(tiny_params, 0.05, 6, (0, 0), trials=16, seed=3, piv_samples=4)
        for value in (est.inf_x, est.inf_y, est.inf_joint):
            assert 0.0 <= value <= 1.0
        assert est.inf_x + est.inf_y + est.inf_joint > 0.0
        assert est.piv_integral >= 0.0

    def test_point_of_mark(self, tiny_params):
        env = build_environment(tiny_params, BlockWindow.centered(1), seed=6)
        site = env.site((2, 2))
        if site.mass > 0:
            assert point_of_mark(env, (2, 2), 0.5, site.mass * 0.5) is not None
            assert point_of_mark(env, (2, 2), 0.5, min(site.mass * 2.0, 1.0) + 1e-9) is None
        assert point_of_mark(env, (40, 40), 0.5, 0.0) is None

    def test_revealment_needs_large_index(self, tiny_params):
        with pytest.raises(SampleSizeError):
            estimate_revealment(tiny_params, 0.5, 15, trials=1, seed=0)

    @pytest.mark.slow
    def test_revealment_counts(self, tiny_params):
        counts, theta_hits, m_counts = revealment_counts(tiny_params, 0.05, 9, trials=2, seed=1)
        assert m_counts == {6: 2}
        assert np.all(theta_hits[:5] == 2)
        assert all(0 < c <= 2 for c in counts.values())

    @pytest.mark.slow
    def test_revealment_within_bound(self, tiny_params):
        n = 16
        rev = estimate_revealment(tiny_params, 0.05, n, trials=3, seed=2)
        assert rev.passes
        assert rev.violations == []
        assert all(0.0 <= d <= 1.0 for d in rev.delta.values())
        # theta_s = 1 for 1 <= s <= 4
        assert rev.bound >= 8.0 / n * 4
        assert sum(rev.m_counts.values()) == 3
        assert set(rev.m_counts) <= set(range(6, n - 2))
        assert rev.to_dict()["passes"] is True

    @pytest.mark.slow
    def test_seed_shell_always_revealed(self, tiny_params):
        n = 16
        rev = estimate_revealment(tiny_params, 0.05, n, trials=1, seed=5)
        (m,) = rev.m_counts
        shell = 2 + (tiny_params.dependency_range or 1)
        inside = [z for z in rev.delta if abs(sup_norm(z) - m) <= shell]
        assert inside
        assert all(rev.delta[z] == 1.0 for z in inside)
        assert max(rev.delta.values()) == 1.0


class TestInequalities:
    def test_efron_stein_at_zero_level(self, tiny_params):
        report = verify_inequality("EFRON_STEIN", tiny_params, 0.0, 5, trials=2, seed=0, blocks=[(0, 0)])
        assert report.kind is InequalityKind.EFRON_STEIN
        assert report.verdict is Verdict.PASS
        assert report.slack == pytest.approx(0.0)

    def test_osss_small_index_counts_all_revealed(self, tiny_params):
        report = verify_inequality(InequalityKind.OSSS, tiny_params, 0.0, 5, trials=2, seed=0, blocks=[(0, 0)])
        assert report.verdict is Verdict.PASS
        assert any("every block counted as revealed" in note for note in report.notes)

    def test_piv_lemma_reference_constant(self, tiny_params):
        report = verify_inequality("piv_lemma", tiny_params, 0.0, 5, trials=1, seed=0, blocks=[(0, 0)], piv_samples=2)
        assert report.constant_reference == pytest.approx(2.0)
        assert report.constant is None
        assert report.verdict is Verdict.PASS

    def test_inf_lemma_is_reported(self, tiny_params):
        report = verify_inequality("INF_LEMMA", tiny_params, 0.0, 5, trials=1, seed=0, blocks=[(1, 0)])
        assert report.verdict is Verdict.REPORTED
        assert report.constant_name == "c_Inf"

    def test_difference_step_checked(self, tiny_params):
        with pytest.raises(ParameterValidationError):
            verify_inequality("RUSSO", tiny_params, 0.5, 5, trials=1, seed=0, h=1.0)

    def test_unknown_kind(self, tiny_params):
        with pytest.raises(ValueError):
            verify_inequality("HOLDER", tiny_params, 0.5, 5, trials=1, seed=0)

    def test_report_dict(self, tiny_params):
        report = verify_inequality("EFRON_STEIN", tiny_params, 0.0, 5, trials=1, seed=0, blocks=[(1, 0)])
        data = report.to_dict()
        assert data["kind"] == "EFRON_STEIN"
        assert data["verdict"] == "PASS"
        assert data["details"][0]["block"] == [1, 0]

    @pytest.mark.slow
    def test_russo_slope_matches_pivotal_sum(self, dense_params):
        report = verify_inequality("RUSSO", dense_params, 0.05, 6, trials=800, seed=0)
        assert report.lhs > 0.0
        assert report.rhs > 0.0
        assert report.verdict is Verdict.PASS
        assert abs(report.slack) <= 3.0 * report.slack_se

    @pytest.mark.slow
    def test_efron_stein_where_outcome_varies(self, dense_params):
        report = verify_inequality("EFRON_STEIN", dense_params, 0.05, 6, trials=40, seed=1)
        assert len(report.details) == required_blocks(dense_params, 6) + 1
        assert any(row["inf_joint"] > 0.0 for row in report.details)
        assert all(row["pass"] for row in report.details)
        assert report.verdict is Verdict.PASS

    @pytest.mark.slow
    def test_osss_where_outcome_varies(self, dense_params):
        report = verify_inequality("OSSS", dense_params, 0.05, 6, trials=12, seed=2)
        assert report.rhs > 0.0
        assert any("every block counted as revealed" in note for note in report.notes)
        assert report.verdict is Verdict.PASS


class TestDiagnostics:
    def test_block_is_good(self, tiny_params):
        grid = np.zeros((25, 25), dtype=bool)
        assert not block_is_good(grid, tiny_params)
        grid[12, 12] = True
        assert block_is_good(grid, tiny_params)
        grid[5, 5] = True
        grid[19, 19] = True
        assert not block_is_good(grid, tiny_params)
        for i in range(5, 20):
            grid[i, i] = True
        assert block_is_good(grid, tiny_params)

    def test_bad_frequency_and_closed_form(self, tiny_params):
        diag = site_diagnostics(tiny_params, [0.5, 0.0], trials=3, seed=2)
        first, second = diag.levels
        assert first.lam == 0.0 and second.lam == 0.5
        assert first.bad_hits == 0 and first.good_hits == 0
        assert first.p_bad_exact == 0.0
        assert second.p_bad_exact == pytest.approx(1.0 - math.exp(-0.5 * 25))
        frame = diag.to_frame()
        assert list(frame["lambda"]) == [0.0, 0.5]
        assert diag.to_dict()["trials"] == 3


class TestReports:
    def test_theta_table_round_trip(self, tmp_path):
        estimates = [ThetaEstimate.from_hits(lam, 6, 10, h, seed=1) for lam, h in [(0.5, 2), (1.0, 7)]]
        path = write_theta_table(estimates, tmp_path / "theta.csv", header={"command": "theta", "config_hash": "abc"})
        header, frame = read_table(path, THETA_COLUMNS)
        assert header == {"command": "theta", "config_hash": "abc"}
        assert list(frame.columns) == THETA_COLUMNS
        assert frame["hits"].tolist() == [2, 7]

    def test_wrong_columns(self, tmp_path):
        path = write_table(pd.DataFrame({"a": [1]}), tmp_path / "other.csv")
        with pytest.raises(BadHeaderError):
            read_table(path, THETA_COLUMNS)

    def test_missing_column_row(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("# command=theta\n")
        with pytest.raises(BadHeaderError):
            read_table(path)

    def test_report_round_trip(self, tmp_path):
        path = write_report({"value": np.float64(0.25), "flags": (True, False)}, tmp_path / "r.yaml", header={"seed": 3})
        assert path.read_text().startswith("# seed=3\n")
        assert read_report(path) == {"value": 0.25, "flags": [True, False]}

    def test_plain(self):
        assert plain({np.int64(1): np.array([1.5, 2.0])}) == {1: [1.5, 2.0]}
        assert plain(Verdict.PASS) == "PASS"
        assert plain(np.bool_(True)) is True


class TestStatistics:
    def test_wilson_interval_edges(self):
        assert wilson_interval(0, 0) == (0.0, 1.0)
        lo, hi = wilson_interval(0, 20)
        assert lo == 0.0 and 0.0 < hi < 0.2
        lo, hi = wilson_interval(20, 20)
        assert hi == 1.0 and 0.8 < lo < 1.0
        lo, hi = wilson_interval(5, 10)
        assert lo < 0.5 < hi
        assert lo == pytest.approx(1.0 - hi)


if __name__ == "__main__":
    pytest.main([__file__])
