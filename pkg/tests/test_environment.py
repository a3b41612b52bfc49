"""
Unit tests for environment construction and the condition checks.
"""

import pytest
from pathlib import Path
import sys

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.environment import (
    EnvironmentSite,
    build_environment,
    build_from_y,
    chain_connected,
    check_conditions,
    dump_environment,
    grid_vertex_lower_bounds,
    inverse_position,
    load_environment_dump,
    rebuild_blocks,
    sample_y_block,
    width_cube_mass,
    within_width,
)
from src.geometry import Box, clip_segments_to_cube
from src.lattice import BlockWindow, Purpose, Variant, block_of_site, make_params, site_cube
from src.utils.errors import (
    BadHeaderError,
    EmptySupportError,
    OutOfWindowError,
    ParameterValidationError,
    VariantMismatchError,
)


@pytest.fixture
def finite_params():
    """M >= sqrt(2) L: the environment is 1-dependent on the block lattice."""
    return make_params(M=2, b="1/9", L=1, lambda_del=1.0, rho=1.0)


@pytest.fixture
def small_env(finite_params):
    return build_environment(finite_params, BlockWindow.centered(2), seed=11)


# Cube of site (4, 4) holds the grid vertex (1, 1) in its interior
STREET_SITE = (4, 4)


class TestBuild:
    def test_deterministic(self, finite_params):
        a = build_environment(finite_params, BlockWindow.centered(1), seed=3)
        b = build_environment(finite_params, BlockWindow.centered(1), seed=3)
        assert a.digest() == b.digest()
        assert np.array_equal(a.mass_grid(), b.mass_grid())

    def test_trials_differ(self, finite_params):
        a = build_environment(finite_params, BlockWindow.centered(1), seed=3, trial=0)
        b = build_environment(finite_params, BlockWindow.centered(1), seed=3, trial=1)
        assert a.digest() != b.digest()

    def test_y_window_padding(self, finite_params, small_env):
        assert small_env.y_window == small_env.window.expand(finite_params.pad_blocks)

    def test_site_mass_is_clipped_length(self, small_env):
        edges = small_env.triangulation().segments()
        p = small_env.params
        # cubes away from the grid lines x, y in Z, which lie on cube boundaries
        for k in [(1, 1), (3, -5), (-7, 6), (4, 2), STREET_SITE]:
            _, length = clip_segments_to_cube(edges, Box.from_tuple(site_cube(k, p)))
            assert small_env.site(k).total == pytest.approx(length, abs=1e-9)

    def test_block_outside_window(self, small_env):
        with pytest.raises(OutOfWindowError):
            small_env.block((10, 10))

    def test_capped_masses_bounded(self):
        p = make_params(M=2, b="1/9", L=1, rho=0.05, eta=0.01, variant="CAPPED")
        env = build_environment(p, BlockWindow.centered(1), seed=5)
        grid = env.mass_grid()
        assert grid.max() <= p.rho
        for z in env.window:
            assert np.all(env.block(z).total >= env.block_mass(z))

    def test_grid_vertex_sites_always_nonempty(self):
        p = make_params(M=10, b="1/41", L=5)
        block_bound, site_fraction = grid_vertex_lower_bounds(p)
        assert block_bound == 1.0
        assert site_fraction == pytest.approx(1 / 41 ** 2)
        for seed in range(3):
            env = build_environment(p, BlockWindow((0, 0), (1, 1)), seed=seed)
            assert env.site((20, 20)).mass > 0

    def test_pure_delaunay_has_no_lower_bound(self, del_params):
        assert grid_vertex_lower_bounds(del_params) == (0.0, 0.0)


class TestRebuild:
    def test_local_rebuild_matches_full_build(self, finite_params, small_env):
        z = (0, 0)
        new_points = sample_y_block(finite_params, z, seed=99, purpose=Purpose.RESAMPLE_ENV, replicate=1)
        local = small_env.with_y_block(z, new_points)
        full = build_from_y(finite_params, small_env.window, local.y_blocks, y_window=small_env.y_window)
        for w in small_env.window:
            assert local.block(w).same_as(full.block(w))

    def test_far_blocks_untouched(self, finite_params, small_env):
        new_points = sample_y_block(finite_params, (-2, -2), seed=1, purpose=Purpose.RESAMPLE_ENV, replicate=1)
        changed = small_env.with_y_block((-2, -2), new_points)
        assert changed.block((1, 1)) is small_env.block((1, 1))

    def test_rebuild_same_field_is_identity(self, small_env):
        again = rebuild_blocks(small_env, [(0, 0), (1, -1)])
        for z in [(0, 0), (1, -1)]:
            assert again.block(z).same_as(small_env.block(z))

    def test_y_block_outside_seed_window(self, small_env):
        with pytest.raises(OutOfWindowError):
            small_env.with_y_block((40, 40), np.zeros((1, 2)))


class TestSites:
    def test_inverse_position_on_street(self, small_env):
        k = STREET_SITE
        site = small_env.site(k)
        box = Box.from_tuple(site_cube(k, small_env.params)).expand(1e-9)
        for v in (0.0, 0.3, 0.999, 1.0):
            pt = inverse_position(site, v)
            assert box.contains(pt.reshape(1, 2))[0]
        start = inverse_position(site, 0.0)
        assert np.allclose(start, site.segments[0, 0:2])

    def test_inverse_position_empty_site(self):
        site = EnvironmentSite(
            site=(0, 0), variant=Variant.DEL_GRID, mass=0.0, total=0.0,
            segments=np.empty((0, 4)), lengths=np.empty(0), cum=np.empty(0),
        )
        with pytest.raises(EmptySupportError):
            inverse_position(site, 0.5)

    def test_inverse_position_width_rejected(self):
        site = EnvironmentSite(
            site=(0, 0), variant=Variant.WIDTH, mass=0.1, total=0.0,
            segments=np.empty((0, 4)), lengths=np.empty(0), cum=np.empty(0),
            width_edges=np.zeros((1, 4)),
        )
        with pytest.raises(VariantMismatchError):
            inverse_position(site, 0.5)


class TestWidth:
    def test_band_area_within_error_bound(self):
        edges = np.array([[-1.0, 0.5, 2.0, 0.5]])
        result = width_cube_mass(Box(0.0, 0.0, 1.0, 1.0), edges, 0.1, q=256)
        assert abs(result.area - 0.2) <= result.error_bound

    def test_covered_cube_exact(self):
        edges = np.array([[0.0, 0.5, 1.0, 0.5]])
        result = width_cube_mass(Box(0.4, 0.4, 0.6, 0.6), edges, 1.0)
        assert result.area == pytest.approx(0.04)
        assert result.error_bound == 0.0

    def test_no_edges(self):
        assert width_cube_mass(Box(0, 0, 1, 1), np.empty((0, 4)), 0.1).area == 0.0

    def test_within_width(self):
        edges = np.array([[0.0, 0.0, 1.0, 0.0]])
        mask = within_width(np.array([[0.5, 0.05], [0.5, 0.2]]), edges, 0.1)
        assert mask.tolist() == [True, False]

    def test_width_environment_masses(self):
        p = make_params(M=2, b="1/9", L=1, w0=0.05, eta=0.001, variant="WIDTH")
        env = build_environment(p, BlockWindow((0, 0), (1, 1)), seed=2, width_quadrature=32)
        mass = env.block_mass((0, 0))
        nonempty = env.nonempty_mask((0, 0))
        assert np.all(mass <= p.rho + 1e-12)
        assert np.all(nonempty[mass > 0])


class TestChainConnected:
    def test_adjacent_sites_joined(self):
        supported = np.zeros((3, 3), dtype=bool)
        assert chain_connected(supported, np.array([[0, 0], [1, 1]]))
        assert not chain_connected(supported, np.array([[0, 0], [0, 2]]))

    def test_joined_through_supported_component(self):
        supported = np.zeros((3, 7), dtype=bool)
        supported[1, :] = True
        assert chain_connected(supported, np.array([[0, 0], [2, 6]]))

    def test_gap_separates(self):
        supported = np.zeros((3, 7), dtype=bool)
        supported[1, :3] = True
        supported[1, 4:] = True
        assert not chain_connected(supported, np.array([[1, 0], [1, 6]]))

    def test_fewer_than_two_sites(self):
        assert chain_connected(np.zeros((2, 2), dtype=bool), np.empty((0, 2)))
        assert chain_connected(np.zeros((2, 2), dtype=bool), np.array([[0, 0]]))


class TestConditions:
    def test_report_on_finite_range_params(self, finite_params):
        env = build_environment(finite_params, BlockWindow.centered(3), seed=4)
        report = check_conditions(env, q0=0.9, n_blocks=20, n_sites=30, n_connect_blocks=2)
        assert report.one_dependence is True
        assert report.one_dependence_counterexample is None
        assert report.coverage_trials == 20
        assert report.coverage_ci[0] <= report.coverage_estimate <= report.coverage_ci[1]
        assert report.blocks_checked == 2
        assert report.circumradius_ok is True
        if report.largest_eta_passing is not None:
            assert report.largest_eta_passing <= finite_params.rho
        assert report.bounded_intensity == (report.max_mass <= finite_params.rho)
        assert set(report.to_dict()) >= {"one_dependence", "coverage_estimate", "essential_connectedness"}

    def test_pure_delaunay_is_not_one_dependent(self, sparse_del_params):
        p = sparse_del_params
        env = build_environment(p, BlockWindow.centered(1), seed=3)
        report = check_conditions(env, n_blocks=2, n_sites=40, n_connect_blocks=1)
        assert p.dependency_range is None
        assert report.one_dependence is False
        site = report.one_dependence_counterexample
        assert site is not None
        assert env.window.contains(block_of_site(site, p))

    def test_report_is_reproducible(self, small_env):
        a = check_conditions(small_env, n_blocks=5, n_sites=10)
        b = check_conditions(small_env, n_blocks=5, n_sites=10)
        assert a.to_dict() == b.to_dict()

    def test_small_window_skips_connectedness(self, small_env):
        report = check_conditions(small_env, n_blocks=2, n_sites=5)
        assert report.essential_connectedness is None
        assert report.blocks_checked == 0

    def test_nonpositive_eta(self, small_env):
        with pytest.raises(ParameterValidationError):
            check_conditions(small_env, eta=0.0, n_blocks=1)


class TestDump:
    def test_dump_round_trip(self, small_env, tmp_path):
        path = dump_environment(small_env, tmp_path / "env.txt")
        back = load_environment_dump(path)
        assert back.digest() == small_env.digest()
        assert back.window == small_env.window
        for z in small_env.window:
            assert back.block(z).same_as(small_env.block(z))

    def test_bad_header(self, tmp_path):
        path = tmp_path / "env.txt"
        path.write_text("something else\n")
        with pytest.raises(BadHeaderError):
            load_environment_dump(path)


if __name__ == "__main__":
    pytest.main([__file__])
