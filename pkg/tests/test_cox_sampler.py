"""
Unit tests for driver marks and the Cox configuration they realize.
"""

import pytest
from pathlib import Path
import sys

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cox import (
    ResampleScope,
    realize,
    realize_blocks,
    resample,
    sample_block_marks,
    sample_driver,
    width_proposals,
    with_inserted_mark,
    write_configuration,
)
from src.environment import build_environment, inverse_position
from src.geometry import distances_to_segments
from src.lattice import BlockWindow, Purpose, make_params, site_cube
from src.utils.errors import MarkRangeError, OutOfWindowError, ScaleMismatchError


@pytest.fixture
def finite_params():
    return make_params(M=2, b="1/9", L=1, lambda_del=1.0, rho=1.0)


@pytest.fixture
def window():
    return BlockWindow.centered(1)


@pytest.fixture
def env(finite_params, window):
    return build_environment(finite_params, window, seed=21)


@pytest.fixture
def driver(finite_params, window):
    return sample_driver(finite_params, window, lambda_max=3.0, seed=21)


def mark_keys(config):
    return {(int(s[0]), int(s[1]), int(i)) for s, i in zip(config.sites, config.mark_index)}


class TestDriver:
    def test_marks_in_range(self, finite_params, driver):
        for z in driver.window:
            marks = driver.marks(z)
            assert np.all((marks.v >= 0) & (marks.v <= 1))
            assert np.all((marks.u >= 0) & (marks.u <= finite_params.rho))
            assert np.all((marks.t >= 0) & (marks.t <= driver.lambda_max))

    def test_deterministic(self, finite_params, window, driver):
        again = sample_driver(finite_params, window, lambda_max=3.0, seed=21)
        for z in window:
            assert np.array_equal(driver.marks(z).v, again.marks(z).v)
            assert np.array_equal(driver.marks(z).t, again.marks(z).t)

    def test_low_levels_do_not_depend_on_lambda_max(self, finite_params):
        short = sample_block_marks(finite_params, (0, 0), 1.5, seed=4)
        long = sample_block_marks(finite_params, (0, 0), 4.0, seed=4)
        low = long.select(long.t <= 1.5)
        assert np.array_equal(short.site, low.site)
        assert np.array_equal(short.v, low.v)
        assert np.array_equal(short.u, low.u)

    def test_zero_lambda_max_has_no_marks(self, finite_params):
        assert len(sample_block_marks(finite_params, (0, 0), 0.0, seed=1)) == 0

    def test_lambda_max_below_lambda(self, finite_params, window):
        p = finite_params.with_lambda(2.0)
        with pytest.raises(MarkRangeError):
            sample_driver(p, window, lambda_max=1.0, seed=0)

    def test_block_outside_window(self, driver):
        with pytest.raises(OutOfWindowError):
            driver.marks((5, 5))


class TestRealize:
    def test_zero_level_is_empty(self, driver, env):
        assert realize(driver, env, 0.0).n_points == 0

    def test_points_lie_in_their_cubes(self, finite_params, driver, env):
        config = realize(driver, env, 2.0)
        assert config.n_points > 0
        for pt, k in zip(config.points, config.sites):
            x0, y0, x1, y1 = site_cube(k, finite_params)
            assert x0 - 1e-9 <= pt[0] <= x1 + 1e-9
            assert y0 - 1e-9 <= pt[1] <= y1 + 1e-9

    def test_points_lie_on_streets(self, driver, env):
        config = realize(driver, env, 1.0)
        edges = env.triangulation().segments()
        assert np.all(distances_to_segments(config.points, edges) < 1e-9)

    def test_nested_in_lambda(self, driver, env):
        low = mark_keys(realize(driver, env, 0.7))
        high = mark_keys(realize(driver, env, 2.4))
        assert low <= high

    def test_count_matches_intensity(self, finite_params, driver, env):
        lam = 3.0
        mass = np.minimum(env.mass_grid(), finite_params.rho).sum()
        n = realize(driver, env, lam).n_points
        expected = lam * mass
        assert abs(n - expected) <= 5.0 * np.sqrt(expected)

    def test_level_above_lambda_max(self, driver, env):
        with pytest.raises(MarkRangeError):
            realize(driver, env, 3.5)

    def test_scale_mismatch(self, window, driver):
        other = make_params(M=2, b="1/11", L=1)
        with pytest.raises(ScaleMismatchError):
            realize(driver, build_environment(other, window, seed=1), 1.0)

    def test_block_subset(self, driver, env):
        part = realize_blocks(driver, env, 2.0, [(0, 0)])
        assert np.all(np.floor_divide(part.sites, 9) == 0)
        with pytest.raises(OutOfWindowError):
            realize_blocks(driver, env, 2.0, [(3, 3)])

    def test_ceiling_hits_counted(self, window):
        p = make_params(M=2, b="1/9", L=1, rho=0.01, eta=0.001)
        env = build_environment(p, window, seed=3)
        drv = sample_driver(p, window, lambda_max=1.0, seed=3)
        config = realize(drv, env, 1.0)
        assert config.ceiling_hits == int(np.count_nonzero(env.mass_grid() > p.rho))
        assert config.ceiling_hits > 0

    def test_write_configuration(self, driver, env, tmp_path):
        config = realize(driver, env, 1.0)
        path = write_configuration(config, tmp_path / "points.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "# lambda=1"
        assert lines[1] == f"# points={config.n_points}"
        assert lines[2] == "x,y,site_x,site_y,mark_index"


class TestInsertedMark:
    def test_inserted_mark_realizes_at_level_zero(self, driver, env):
        # Site (4, 4) always carries the grid vertex (1, 1)
        site = env.site((4, 4))
        config = realize(with_inserted_mark(driver, (4, 4), 0.25, 0.0), env, 0.0)
        assert config.n_points == 1
        assert np.allclose(config.points[0], inverse_position(site, 0.25))

    def test_mark_range_checked(self, driver):
        with pytest.raises(MarkRangeError):
            with_inserted_mark(driver, (0, 0), 1.5, 0.0)
        with pytest.raises(MarkRangeError):
            with_inserted_mark(driver, (0, 0), 0.5, 2.0)

    def test_inserted_mark_provenance(self, driver):
        changed = with_inserted_mark(driver, (1, 1), 0.5, 0.5)
        assert changed.provenance[(0, 0)] == "INSERTED"
        assert changed.n_marks == driver.n_marks + 1


class TestResample:
    def test_site_scope_only_touches_site(self, driver):
        target = (2, 3)
        new, _ = resample(driver, ResampleScope.SITE, target, replicate=1)
        before = driver.marks((0, 0))
        after = new.marks((0, 0))
        assert np.array_equal(before.select(~before.of_site(target)).v, after.select(~after.of_site(target)).v)
        fresh = sample_block_marks(
            driver.params, (0, 0), driver.lambda_max, driver.seed, purpose=Purpose.RESAMPLE_DRIVER, replicate=1
        )
        assert np.array_equal(new.site_marks(target).v, fresh.select(fresh.of_site(target)).v)
        assert new.provenance[(0, 0)] == "RESAMPLE_DRIVER:1"

    def test_block_scope(self, driver):
        new, _ = resample(driver, "block", (0, -1), replicate=2)
        fresh = sample_block_marks(
            driver.params, (0, -1), driver.lambda_max, driver.seed, purpose=Purpose.RESAMPLE_DRIVER, replicate=2
        )
        assert np.array_equal(new.marks((0, -1)).v, fresh.v)
        assert new.marks((-1, 0)) is driver.marks((-1, 0))

    def test_replicates_are_reproducible(self, driver):
        a, _ = resample(driver, ResampleScope.BLOCK, (0, 0), replicate=3)
        b, _ = resample(driver, ResampleScope.BLOCK, (0, 0), replicate=3)
        assert np.array_equal(a.marks((0, 0)).v, b.marks((0, 0)).v)

    def test_env_block_scope(self, driver, env):
        with pytest.raises(ValueError):
            resample(driver, ResampleScope.ENV_BLOCK, (0, 0), replicate=1)
        same, new_env = resample(driver, ResampleScope.ENV_BLOCK, (0, 0), replicate=1, env=env)
        assert same is driver
        assert new_env.digest() != env.digest()

    def test_target_outside_window(self, driver):
        with pytest.raises(OutOfWindowError):
            resample(driver, ResampleScope.BLOCK, (9, 9), replicate=1)


class TestWidth:
    def test_proposals_inside_cubes(self):
        v = np.array([0.1, 0.5, 0.9])
        sites = np.array([[0, 0], [3, -2], [-1, 4]])
        pts = width_proposals(v, sites, cube_side=0.25, inv_b=4, M=1.0)
        assert np.array_equal(pts, width_proposals(v, sites, cube_side=0.25, inv_b=4, M=1.0))
        for pt, k in zip(pts, sites):
            assert k[0] * 0.25 <= pt[0] <= (k[0] + 1) * 0.25
            assert k[1] * 0.25 <= pt[1] <= (k[1] + 1) * 0.25

    def test_proposal_depends_on_mark(self):
        sites = np.array([[0, 0], [0, 0]])
        pts = width_proposals(np.array([0.2, 0.3]), sites, cube_side=0.25, inv_b=4, M=1.0)
        assert not np.array_equal(pts[0], pts[1])

    def test_width_realization(self, window):
        p = make_params(M=2, b="1/9", L=1, w0=0.05, eta=0.001, variant="WIDTH")
        env = build_environment(p, window, seed=8, width_quadrature=16)
        drv = sample_driver(p, window, lambda_max=2.0, seed=8)
        config = realize(drv, env, 2.0)
        active = sum(int(np.count_nonzero(drv.marks(z).t <= 2.0)) for z in window)
        assert config.n_points + config.width_rejections == active
        edges = env.triangulation().segments()
        assert np.all(distances_to_segments(config.points, edges) <= p.w0 + 1e-12)


if __name__ == "__main__":
    pytest.main([__file__])
