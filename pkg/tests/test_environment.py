"""
Tests for environment generators, contact sites and cell coarse-graining
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
import hypothesis.strategies as st

from environments.cell_analysis import (
    analyze_cells,
    cell_fraction_bound,
    counting_bounds_hold,
    rho_is_admissible,
    row_fraction_bound,
    zeta_is_admissible,
)
from environments.environment import (
    ContactSites,
    Environment,
    block_edges,
    contact_sites,
    density,
    from_bits,
    from_contact_sites,
    gen_bernoulli,
    gen_block,
    gen_periodic,
    gen_vanishing,
    generate,
    with_site,
)


def test_bernoulli_density_concentrates():
    env = gen_bernoulli(10_000, density=0.5, seed=11)
    assert abs(density(env) - 0.5) < 0.02


def test_bernoulli_is_reproducible():
    first = gen_bernoulli(500, density=0.3, seed=5)
    again = gen_bernoulli(500, density=0.3, seed=5)
    other = gen_bernoulli(500, density=0.3, seed=6)
    np.testing.assert_array_equal(first.bits, again.bits)
    assert not np.array_equal(first.bits, other.bits)


def test_bernoulli_edge_densities():
    assert gen_bernoulli(50, density=1.0, seed=1).ones == 50
    assert gen_bernoulli(50, density=0.0, seed=1).ones == 0
    with pytest.raises(ValueError):
        gen_bernoulli(50, density=1.5, seed=1)


def test_periodic_density():
    assert density(gen_periodic(100, 'segment', 2)) == 0.5
    assert contact_sites(gen_periodic(12, 'segment', 4)).positions.tolist() == [4, 8, 12]
    square = gen_periodic(6, 'square', 2)
    assert square.ones == 9
    assert square.bits[1, 1] == 1 and square.bits[0, 1] == 0


def test_block_profile_thirds():
    env = gen_block(900, (0.8, 0.0, 0.8), seed=7)
    edges = block_edges(900)
    assert edges == (0, 300, 600, 900)
    assert env.bits[300:600].sum() == 0
    for lo, hi in ((0, 300), (600, 900)):
        assert abs(env.bits[lo:hi].mean() - 0.8) < 0.08
    with pytest.raises(ValueError):
        gen_block(90, (0.8, 0.0), seed=7)


def test_vanishing_prefix():
    for n in (1, 2, 100, 101, 4096):
        env = gen_vanishing(n)
        assert env.ones == math.ceil(math.sqrt(n))
        assert env.bits[:env.ones].all()


def test_generate_dispatch():
    assert generate('periodic', 20, gap=5).ones == 4
    assert generate('vanishing', 16).family == 'vanishing'
    with pytest.raises(ValueError):
        generate('fractal', 20)


def test_environment_validation():
    with pytest.raises(ValueError):
        Environment(geometry='segment', n=3, bits=np.zeros(4, dtype=np.uint8))
    with pytest.raises(ValueError):
        from_bits([0, 2, 1])
    with pytest.raises(ValueError):
        Environment(geometry='torus', n=2, bits=np.zeros(2, dtype=np.uint8))


def test_contact_sites_are_one_based_and_ordered():
    env = from_bits([0, 1, 1, 0, 1])
    sites = contact_sites(env)
    assert sites.positions.tolist() == [2, 3, 5]
    assert sites.m == env.ones
    assert sites.with_origin().tolist() == [0, 2, 3, 5]
    assert sites.gaps().tolist() == [2, 1, 2]


def test_square_contact_sites_in_raster_order():
    env = from_bits([[0, 1], [1, 1]])
    assert contact_sites(env).positions.tolist() == [[1, 2], [2, 1], [2, 2]]
    with pytest.raises(ValueError):
        contact_sites(env).with_origin()


@given(st.lists(st.integers(0, 1), min_size=1, max_size=40))
def test_contact_sites_round_trip(bits):
    env = from_bits(bits)
    rebuilt = from_contact_sites(contact_sites(env))
    np.testing.assert_array_equal(rebuilt.bits, env.bits)


def test_with_site_adds_one_reward():
    env = from_bits([0, 0, 0])
    assert with_site(env, 2).bits.tolist() == [0, 1, 0]
    assert env.ones == 0
    empty = ContactSites(positions=np.array([], dtype=np.int64), n=3)
    assert from_contact_sites(empty).ones == 0


def test_full_and_empty_cells():
    full = analyze_cells(from_bits(np.ones((8, 8), dtype=np.uint8)), 4, 0.9, 0.9)
    assert full.good_cells.all() and full.good_rows.all()
    empty = analyze_cells(from_bits(np.zeros((8, 8), dtype=np.uint8)), 4, 0.1, 0.1)
    assert not empty.good_cells.any()
    assert empty.good_cell_fraction == 0.0


def test_cell_side_must_divide_n():
    with pytest.raises(ValueError):
        analyze_cells(from_bits(np.ones((9, 9), dtype=np.uint8)), 4, 0.5, 0.5)
    with pytest.raises(ValueError):
        analyze_cells(from_bits(np.ones(8, dtype=np.uint8)), 4, 0.5, 0.5)


def test_rho_above_admissible_range_rejected():
    env = from_bits(np.ones((8, 8), dtype=np.uint8))
    with pytest.raises(ValueError):
        analyze_cells(env, 4, 0.4, 0.05, delta=0.5)


def test_bernoulli_cell_count_example():
    env = gen_bernoulli(64, 'square', 0.5, seed=3)
    analysis = analyze_cells(env, 8, 0.25, 0.25)
    assert analysis.good_cell_fraction >= cell_fraction_bound(0.25)
    assert analysis.to_dict()['cell_side'] == 8


def test_good_cells_in_row():
    bits = np.zeros((4, 4), dtype=np.uint8)
    bits[0:2, 2:4] = 1
    analysis = analyze_cells(from_bits(bits), 2, 0.5, 0.5)
    assert analysis.good_cells_in_row(0) == [1]
    assert analysis.good_cells_in_row(1) == []


def test_admissibility_arithmetic():
    assert rho_is_admissible(0.2, 0.5)
    assert not rho_is_admissible(1 / 3, 0.5)
    assert zeta_is_admissible(0.2, 0.05)
    assert not zeta_is_admissible(0.2, 0.25)
    assert row_fraction_bound(0.25) == pytest.approx(0.2)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.55, 1.0))
def test_counting_bounds_on_dense_environments(seed, level):
    env = gen_bernoulli(24, 'square', level, seed=seed)
    assume(env.ones > 0.5 * env.size)
    check = counting_bounds_hold(env, 4, 0.2, 0.05)
    assert check['cell_ok']
    assert check['row_checked'] and check['row_ok']
