"""
Tests for the pinned Gaussian interface: Gibbs sampler, exact expansion and bounds
"""

import math

import numpy as np
import pytest
from scipy.linalg import cho_factor, cho_solve

from environments.environment import from_bits, gen_bernoulli, gen_periodic
from models.gff_pinning import (
    GffInstance,
    GffState,
    batch_means_stderr,
    boundary_distance,
    empirical_ratio_constant,
    exact_expansion_small,
    gibbs_sweep,
    good_region_pinning_bound,
    pin_probability,
    pinned_fraction_estimate,
    pinned_set_law,
    precision_matrix,
    ratio_bound_check,
    run_chain,
    site_variances,
)
from samplers.rng import make_rng


def full_square(n):
    return from_bits(np.ones((n, n), dtype=np.uint8))


def test_instance_validation():
    with pytest.raises(ValueError):
        GffInstance(env=from_bits([1, 1]), eta=1.0)
    with pytest.raises(ValueError):
        GffInstance(env=full_square(2), eta=-0.5)


def test_precision_matrix():
    q = precision_matrix(3)
    assert q.shape == (9, 9)
    np.testing.assert_array_equal(q, q.T)
    assert (np.diag(q) == 4).all()
    assert q[0, 1] == -1 and q[0, 3] == -1 and q[2, 3] == 0
    assert (np.linalg.eigvalsh(q) > 0).all()
    assert precision_matrix(3, np.array([4])).shape == (8, 8)


def test_single_site_expansion():
    eta = 1.7
    result = exact_expansion_small(GffInstance(env=full_square(1), eta=eta))
    atom = eta * math.sqrt(2 / math.pi)
    assert result.log_ratio == pytest.approx(math.log1p(atom), rel=1e-13)
    assert result.expected_size == pytest.approx(atom / (1 + atom), rel=1e-13)
    assert float(pin_probability(eta, 0.0)) == pytest.approx(atom / (1 + atom))


def test_expansion_laws_are_normalized():
    result = exact_expansion_small(GffInstance(env=from_bits([[1, 0], [1, 1]]), eta=2.0))
    assert result.size_law.sum() == pytest.approx(1.0)
    assert result.set_law.probs.sum() == pytest.approx(1.0)
    assert result.log_weights[0] == 0.0
    assert len(result.set_law.probs) == 8
    assert result.expected_size == pytest.approx(float(np.arange(4) @ result.size_law))


def test_zero_eta_expansion():
    result = exact_expansion_small(GffInstance(env=full_square(2), eta=0.0))
    assert result.log_ratio == 0.0
    assert result.size_law[0] == 1.0


def test_expansion_cap():
    with pytest.raises(ValueError):
        exact_expansion_small(GffInstance(env=full_square(5), eta=1.0))


def test_pin_probability_decreases_with_neighbours():
    s = np.array([0.0, 1.0, 2.0, 4.0])
    probs = pin_probability(2.0, s)
    assert (np.diff(probs) < 0).all()
    np.testing.assert_allclose(pin_probability(2.0, -s), probs)


def test_sweeps_keep_state_consistent():
    instance = GffInstance(env=gen_periodic(6, 'square', 2), eta=3.0)
    state = GffState.flat(instance, chains=3)
    rng = make_rng(1, 'gibbs')
    for _ in range(20):
        gibbs_sweep(instance, state, rng)
        assert state.is_consistent(instance)
    assert state.pinned_fraction().shape == (3,)


def test_single_site_chain_matches_closed_form():
    instance = GffInstance(env=full_square(1), eta=1.0)
    mean, stderr = pinned_fraction_estimate(instance, 20_000, 100, make_rng(2, 'gibbs'))
    exact = float(pin_probability(1.0, 0.0))
    assert stderr > 0
    assert abs(mean - exact) < 4 * stderr


def test_zero_eta_never_pins():
    instance = GffInstance(env=full_square(3), eta=0.0)
    assert pinned_fraction_estimate(instance, 50, 10, make_rng(3, 'gibbs')) == (0.0, 0.0)
    state, fractions, _ = run_chain(instance, 30, 5, make_rng(3, 'gibbs'))
    assert not state.pinned.any()
    assert (fractions == 0).all()


def test_chain_needs_sweeps_after_burnin():
    with pytest.raises(ValueError):
        run_chain(GffInstance(env=full_square(2), eta=1.0), 10, 10, make_rng(4, 'gibbs'))


def test_chain_is_reproducible():
    instance = GffInstance(env=full_square(3), eta=2.0)
    first = run_chain(instance, 40, 10, make_rng(5, 'gibbs'), chains=2)
    again = run_chain(instance, 40, 10, make_rng(5, 'gibbs'), chains=2)
    np.testing.assert_array_equal(first[0].heights, again[0].heights)
    np.testing.assert_array_equal(first[1], again[1])


def test_pinned_set_law_matches_expansion():
    instance = GffInstance(env=full_square(2), eta=2.0)
    exact = exact_expansion_small(instance).set_law
    law = pinned_set_law(instance, 2100, 100, make_rng(6, 'gibbs'), chains=50)
    assert law.samples == 100_000
    assert law.total_variation(exact) <= 3 * law.mc_error


def test_batch_means_stderr():
    assert batch_means_stderr(np.ones(100), 10) == 0.0
    assert math.isnan(batch_means_stderr(np.ones(1), 10))
    noisy = np.random.default_rng(7).normal(size=4000)
    assert batch_means_stderr(noisy, 20) == pytest.approx(1 / math.sqrt(4000), rel=0.5)


def test_boundary_distance():
    d = boundary_distance(4)
    assert d.tolist() == [[1, 1, 1, 1], [1, 2, 2, 1], [1, 2, 2, 1], [1, 1, 1, 1]]


def test_single_site_ratio():
    ratio, scale = ratio_bound_check(1, (1, 1))
    assert site_variances(1)[0, 0] == pytest.approx(0.25)
    assert ratio == pytest.approx(2 / math.sqrt(2 * math.pi))
    assert scale == pytest.approx(math.sqrt(math.log(2)))
    with pytest.raises(ValueError):
        ratio_bound_check(3, (0, 2))


def test_variances_grow_away_from_boundary():
    variances = site_variances(7)
    assert variances[3, 3] > variances[1, 1] > variances[0, 0]
    assert empirical_ratio_constant(7) > 0


def test_good_region_bound_is_below_exact():
    instance = GffInstance(env=full_square(4), eta=2.0)
    bound = good_region_pinning_bound(instance, 2, 0.2, 0.05)
    assert 0 < bound <= exact_expansion_small(instance).log_ratio


def test_good_region_bound_degenerate_cases():
    assert good_region_pinning_bound(GffInstance(env=full_square(4), eta=0.0), 2, 0.2, 0.05) == 0.0
    empty = from_bits(np.zeros((4, 4), dtype=np.uint8))
    assert good_region_pinning_bound(GffInstance(env=empty, eta=1.0), 2, 0.2, 0.05) == 0.0


def test_spectral_variances_match_dense_solve():
    q = precision_matrix(5)
    dense = np.diag(cho_solve(cho_factor(q), np.eye(25))).reshape(5, 5)
    np.testing.assert_allclose(site_variances(5), dense, rtol=1e-12)


def test_good_region_bound_on_a_large_box():
    instance = GffInstance(env=full_square(16), eta=2.0)
    bound = good_region_pinning_bound(instance, 4, 0.2, 0.05)
    assert math.isfinite(bound) and bound > 0
    assert empirical_ratio_constant(32) > 0


def test_pinned_fraction_grows_with_eta():
    env = gen_bernoulli(8, 'square', 0.5, seed=13)
    weak = pinned_fraction_estimate(GffInstance(env=env, eta=0.5), 400, 50, make_rng(14, 'gibbs'), chains=4)
    strong = pinned_fraction_estimate(GffInstance(env=env, eta=2.0), 400, 50, make_rng(14, 'gibbs'), chains=4)
    assert weak[0] < strong[0]


def test_log_ratio_derivative_is_mean_size_over_eta():
    h = 1e-4
    for env in (full_square(2), from_bits(np.array([[1, 0, 1], [0, 1, 0], [1, 1, 0]], dtype=np.uint8))):
        eta = 1.5
        upper = exact_expansion_small(GffInstance(env=env, eta=eta + h)).log_ratio
        lower = exact_expansion_small(GffInstance(env=env, eta=eta - h)).log_ratio
        centre = exact_expansion_small(GffInstance(env=env, eta=eta)).expected_size / eta
        assert (upper - lower) / (2 * h) == pytest.approx(centre, abs=1e-6)
