"""
Unit tests for parameters, lattice indexing and random streams.
"""

import pytest
from fractions import Fraction
from pathlib import Path
import sys

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.lattice import (
    BlockWindow,
    Neighborhood,
    Purpose,
    StreamKey,
    Variant,
    block_box,
    block_of_site,
    block_stream,
    derive_stream,
    index_neighbors,
    local_site_index,
    make_params,
    parse_fraction,
    site_cube,
    site_of_local,
    sup_norm,
    zigzag,
)
from src.utils.errors import ParameterValidationError


class TestParams:
    def test_desk_params_derived_quantities(self, desk_params):
        p = desk_params
        assert p.inv_b == 21
        assert p.sites_per_block == 441
        assert p.cube_side == pytest.approx(5 / 21)
        assert p.m_prime == 1
        assert p.variant is Variant.DEL_GRID
        assert p.lambda_star(2.0) == pytest.approx(2.0 * 441)

    def test_b_must_exceed_2dM(self):
        with pytest.raises(ParameterValidationError) as err:
            make_params(M=5, b="1/20", L=5)
        assert "INVALID_SCALE" in err.value.codes
        assert "2dM" in str(err.value)

    def test_b_must_be_reciprocal_integer(self):
        with pytest.raises(ParameterValidationError) as err:
            make_params(M=5, b="2/41", L=5)
        assert err.value.codes == ["INVALID_SCALE"]

    def test_M_multiple_of_L(self):
        with pytest.raises(ParameterValidationError) as err:
            make_params(M=5, b="1/21", L=2)
        assert "INVALID_GRID" in err.value.codes

    def test_pure_delaunay_ignores_grid_rule(self):
        p = make_params(M=5, b="1/21", L=2, variant="DEL")
        assert p.m_prime is None
        assert p.dependency_range is None
        assert not p.finite_range

    def test_all_violations_reported(self):
        with pytest.raises(ParameterValidationError) as err:
            make_params(M=5, b="1/20", L=5, lambda_=-1.0, lambda_del=0.0)
        codes = err.value.codes
        assert codes.count("NONPOSITIVE") == 2
        assert "INVALID_SCALE" in codes

    def test_width_normalizes_rho(self, width_params):
        assert width_params.rho == pytest.approx((5 / 21) ** 2)

    def test_eta_above_rho_rejected(self):
        with pytest.raises(ParameterValidationError) as err:
            make_params(M=5, b="1/21", L=5, rho=0.5, eta=0.6)
        assert err.value.codes == ["RANGE"]

    def test_finite_range_needs_M_at_least_sqrt2_L(self):
        assert not make_params(M=5, b="1/21", L=5).finite_range
        assert make_params(M=10, b="1/41", L=5).finite_range

    def test_parse_fraction_forms(self):
        assert parse_fraction("1/21") == Fraction(1, 21)
        assert parse_fraction(0.2) == Fraction(1, 5)
        assert parse_fraction(Fraction(1, 3)) == Fraction(1, 3)
        with pytest.raises(ValueError):
            parse_fraction(True)

    def test_with_lambda_keeps_scales(self, desk_params):
        q = desk_params.with_lambda(0.7)
        assert q.lam == 0.7
        assert q.same_scales(desk_params)
        assert q.to_dict()["lambda"] == 0.7


class TestIndexing:
    def test_block_of_site_negative(self, desk_params):
        assert block_of_site((-1, 0), desk_params) == (-1, 0)
        assert block_of_site((20, 21), desk_params) == (0, 1)

    def test_local_index_round_trip(self, tiny_params):
        for z in [(0, 0), (-2, 3)]:
            for local in range(tiny_params.sites_per_block):
                k = site_of_local(z, local, tiny_params)
                assert block_of_site(k, tiny_params) == z
                assert local_site_index(k, tiny_params) == local

    def test_neighborhood_sizes(self, tiny_params):
        assert len(index_neighbors(Neighborhood.I_PLUS, (0, 0), tiny_params)) == 9
        assert len(index_neighbors("I_plus_plus", (0, 0), tiny_params)) == 25
        sites = index_neighbors("Ib", (1, -1), tiny_params)
        assert len(sites) == 25
        assert all(block_of_site(k, tiny_params) == (1, -1) for k in sites)
        assert len(index_neighbors("Ib_plus", (0, 0), tiny_params)) == 9 * 25

    def test_neighborhoods_lexicographic(self, tiny_params):
        blocks = index_neighbors("I_plus", (0, 0), tiny_params)
        assert blocks == sorted(blocks)

    def test_site_cube_inside_block(self, desk_params):
        x0, y0, x1, y1 = site_cube((21, 0), desk_params)
        assert (x0, y0) == pytest.approx((5.0, 0.0))
        assert x1 - x0 == pytest.approx(desk_params.cube_side)
        assert block_box((1, 0), desk_params) == (5.0, 0.0, 10.0, 5.0)

    def test_sup_norm(self):
        assert sup_norm((3, -4)) == 4
        assert sup_norm((0, 0)) == 0


class TestBlockWindow:
    def test_centered_and_iteration(self):
        window = BlockWindow.centered(2)
        blocks = list(window)
        assert len(blocks) == len(window) == 16
        assert blocks[0] == (-2, -2)
        assert blocks == sorted(blocks)

    def test_contains_expand_intersect(self):
        window = BlockWindow.around((0, 0), 1)
        assert window.contains((1, -1))
        assert not window.contains((2, 0))
        big = window.expand(2)
        assert big.contains_window(window)
        assert big.intersect(window) == window

    def test_empty_window_rejected(self):
        with pytest.raises(ValueError):
            BlockWindow((0, 0), (0, 1))

    def test_site_range(self, tiny_params):
        lo, hi = BlockWindow.around((0, 0), 1).site_range(tiny_params)
        assert lo == (-5, -5)
        assert hi == (10, 10)


class TestStreams:
    def test_same_key_same_stream(self):
        a = block_stream(42, (1, -2), Purpose.ENV).random(5)
        b = derive_stream(StreamKey(42, (1, -2), Purpose.ENV)).random(5)
        assert np.array_equal(a, b)

    def test_keys_separate_streams(self):
        base = block_stream(42, (0, 0), Purpose.DRIVER).random(4)
        for other in [
            block_stream(42, (0, 0), Purpose.ENV),
            block_stream(42, (0, 1), Purpose.DRIVER),
            block_stream(42, (0, 0), Purpose.DRIVER, trial=1),
            block_stream(42, (0, 0), Purpose.DRIVER, replicate=1),
            block_stream(42, (0, 0), Purpose.DRIVER, slab=1),
            block_stream(43, (0, 0), Purpose.DRIVER),
        ]:
            assert not np.array_equal(base, other.random(4))

    def test_stream_independent_of_creation_order(self):
        first = [block_stream(1, (z, 0), Purpose.ENV).random() for z in range(4)]
        second = [block_stream(1, (z, 0), Purpose.ENV).random() for z in reversed(range(4))]
        assert first == list(reversed(second))

    def test_zigzag_injective(self):
        values = [zigzag(v) for v in range(-50, 51)]
        assert len(set(values)) == len(values)
        assert min(values) == 0

    def test_with_slab(self):
        key = StreamKey(5, (0, 0), Purpose.DRIVER)
        assert key.with_slab(3).slab == 3
        assert key.slab == 0


if __name__ == "__main__":
    pytest.main([__file__])
