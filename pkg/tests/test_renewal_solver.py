"""
Tests for the renewal DP, the free-energy identity and the explicit lower bounds
"""

import math

import numpy as np
import pytest

from environments.environment import contact_sites, from_bits, gen_bernoulli, gen_periodic, gen_vanishing, with_site
from models.renewal_solver import (
    PinningInstance,
    contact_fraction,
    contact_set_size_distribution,
    expected_contacts_curve,
    free_energy_integral_check,
    log_partition_mp,
    solve,
    solve_env,
    theorem1_lower_bound,
)
from walks.walk_kernel import local_clt_lower_constant, return_probabilities


def test_two_site_partition_function(two_site_env, kernel1, table1):
    solution = solve(PinningInstance(env=two_site_env, kernel=kernel1, eta=math.log(2)), table1)
    assert math.exp(solution.log_z) == pytest.approx(2.125, rel=1e-14)
    np.testing.assert_allclose(solution.contact_probs, [1.5 / 2.125, 1.25 / 2.125], rtol=1e-13)
    assert solution.expected_contacts == pytest.approx(2.75 / 2.125, rel=1e-13)


def test_zero_eta_gives_unit_partition(kernel1, table1):
    env = gen_bernoulli(300, density=0.5, seed=2)
    solution = solve(PinningInstance(env=env, kernel=kernel1, eta=0.0), table1)
    assert solution.log_z == 0.0
    np.testing.assert_allclose(solution.contact_probs, table1.p[contact_sites(env).positions], rtol=1e-13)


def test_empty_environment(kernel1, table1):
    solution = solve(PinningInstance(env=from_bits(np.zeros(50, dtype=np.uint8)), kernel=kernel1, eta=2.0), table1)
    assert solution.log_z == 0.0
    assert solution.m == 0
    assert solution.expected_contacts == 0.0


def test_single_site_closed_form(kernel1, kernel2, table1, table2):
    for kernel, table in ((kernel1, table1), (kernel2, table2)):
        bits = np.zeros(40, dtype=np.uint8)
        bits[16] = 1
        eta = 1.3
        solution = solve(PinningInstance(env=from_bits(bits), kernel=kernel, eta=eta), table)
        w = math.expm1(eta)
        p = table.p[17]
        assert math.exp(solution.log_z) == pytest.approx(1 + w * p, rel=1e-13)
        assert solution.contact_probs[0] == pytest.approx(p * (1 + w) / (1 + w * p), rel=1e-13)


def test_forward_and_backward_agree(kernel1, kernel2, table1, table2):
    env = gen_bernoulli(1500, density=0.5, seed=9)
    for kernel, table in ((kernel1, table1), (kernel2, table2)):
        solution = solve(PinningInstance(env=env, kernel=kernel, eta=2.0), table)
        assert solution.log_z_backward == pytest.approx(solution.log_z, rel=1e-11)


def test_rescaling_does_not_change_results(kernel1, table1):
    env = from_bits(np.ones(600, dtype=np.uint8))
    instance = PinningInstance(env=env, kernel=kernel1, eta=5.0)
    default = solve(instance, table1)
    tight = solve(instance, table1, rescale_threshold=1e10)
    assert default.log_z > 1000
    assert tight.log_z == pytest.approx(default.log_z, rel=1e-12)
    np.testing.assert_allclose(tight.contact_probs, default.contact_probs, rtol=1e-10)


def test_matches_extended_precision(kernel1, kernel2, table1, table2):
    env = gen_bernoulli(300, density=0.5, seed=4)
    for kernel, table in ((kernel1, table1), (kernel2, table2)):
        instance = PinningInstance(env=env, kernel=kernel, eta=3.0)
        assert solve(instance, table).log_z == pytest.approx(log_partition_mp(instance), rel=1e-12)


def test_large_eta_stays_finite(kernel1, table1):
    env = gen_bernoulli(80, density=0.5, seed=6)
    instance = PinningInstance(env=env, kernel=kernel1, eta=600.0)
    assert solve(instance, table1).log_z == pytest.approx(log_partition_mp(instance), rel=1e-12)

    # Every site pinned dominates: log Z = m eta + m log(1/2) up to e^-eta corrections
    full = solve(PinningInstance(env=gen_periodic(50, 'segment', 1), kernel=kernel1, eta=800.0), table1)
    assert full.log_z == pytest.approx(50 * 800.0 + 50 * math.log(0.5), abs=1e-6)
    np.testing.assert_allclose(full.contact_probs, 1.0, rtol=1e-9)


def test_adding_a_reward_site_never_lowers_log_z(kernel1, kernel2, table1, table2):
    env = gen_bernoulli(120, density=0.3, seed=12)
    empty = [j for j in range(1, 121) if env.bits[j - 1] == 0]
    for kernel, table in ((kernel1, table1), (kernel2, table2)):
        base = solve(PinningInstance(env=env, kernel=kernel, eta=1.0), table)
        for site in empty[::7]:
            richer = solve(PinningInstance(env=with_site(env, site), kernel=kernel, eta=1.0), table)
            assert richer.log_z >= base.log_z
            assert richer.expected_contacts >= base.expected_contacts


def test_contact_probabilities_are_probabilities(kernel1, table1):
    solution = solve_env(gen_bernoulli(800, density=0.3, seed=1), kernel1, 1.0, table1)
    assert (solution.contact_probs >= 0).all() and (solution.contact_probs <= 1).all()
    assert contact_fraction(solution) == pytest.approx(solution.expected_contacts / 800)
    assert solution.summary()['N'] == 800


def test_pinned_marginals_and_size_law(kernel1, table1):
    solution = solve_env(gen_bernoulli(60, density=0.5, seed=8), kernel1, 1.0, table1)
    law = contact_set_size_distribution(solution)
    assert law.sum() == pytest.approx(1.0)
    assert len(law) == solution.m + 1
    mean_size = float(np.arange(len(law)) @ law)
    assert mean_size == pytest.approx(solution.pinned_marginals().sum(), rel=1e-10)


def test_size_law_at_zero_eta(kernel1, table1):
    solution = solve_env(gen_periodic(30, 'segment', 3), kernel1, 0.0, table1)
    law = contact_set_size_distribution(solution)
    assert law[0] == pytest.approx(1.0)


def test_expected_contacts_increase_with_eta(kernel1, periodic_200, table1):
    curve = expected_contacts_curve(periodic_200, kernel1, np.linspace(0, 2, 11), table1)
    assert (np.diff(curve) > 0).all()


def test_free_energy_identity(kernel1, periodic_200, table1):
    coarse = free_energy_integral_check(periodic_200, kernel1, 2.0, 2500, table1)
    fine = free_energy_integral_check(periodic_200, kernel1, 2.0, 10_000, table1)
    assert fine <= 1e-6
    assert coarse / fine >= 4.0


def test_free_energy_identity_needs_two_nodes(kernel1, periodic_200):
    with pytest.raises(ValueError):
        free_energy_integral_check(periodic_200, kernel1, 2.0, 1)


def test_invalid_instances(kernel1, table1):
    with pytest.raises(ValueError):
        PinningInstance(env=from_bits([1, 0]), kernel=kernel1, eta=-1.0)
    with pytest.raises(ValueError):
        PinningInstance(env=from_bits(np.ones((2, 2), dtype=np.uint8)), kernel=kernel1, eta=1.0)
    with pytest.raises(ValueError):
        solve(PinningInstance(env=from_bits(np.ones(30)), kernel=kernel1, eta=1.0),
              return_probabilities(kernel1, 10))


def test_vanishing_family_loses_contact_fraction(kernel1):
    fractions = [solve_env(gen_vanishing(n), kernel1, 1.0).contact_fraction for n in (256, 1024, 4096)]
    assert fractions[0] > fractions[1] > fractions[2]
    assert fractions[2] < 0.3 * fractions[0]


def test_lower_bound_special_cases():
    assert theorem1_lower_bound(0.4, 0.0, 100, 50, 5, 10, 0.5) == (-math.inf, -math.inf)
    _, bound_2d = theorem1_lower_bound(0.4, 1.0, 100, 50, 1, 50, 0.25)
    assert bound_2d == pytest.approx(math.log(0.25 * math.expm1(1.0)) - math.log(100))
    _, bound_2d = theorem1_lower_bound(0.4, 1.0, 100, 50, 50, 1, 0.25)
    assert bound_2d == -math.inf


def test_lower_bound_hypotheses():
    with pytest.raises(ValueError):
        theorem1_lower_bound(0.6, 1.0, 100, 50, 5, 10, 0.5)
    with pytest.raises(ValueError):
        theorem1_lower_bound(0.4, 1.0, 100, 50, 4, 10, 0.5)


def test_lower_bounds_stay_below_log_z(kernel1, kernel2):
    for kernel in (kernel1, kernel2):
        table = return_probabilities(kernel, 240)
        c = local_clt_lower_constant(table)
        for gap in (2, 3, 4):
            env = gen_periodic(240, 'segment', gap)
            m = env.ones
            for eta in (0.5, 1.0, 2.0):
                log_z = solve(PinningInstance(env=env, kernel=kernel, eta=eta), table).log_z
                for k in (1, 2, 4, 5, 10):
                    if m % k:
                        continue
                    bounds = theorem1_lower_bound(0.9 * m / 240, eta, 240, m, m // k, k, c)
                    assert bounds[kernel.dimension - 1] <= log_z
