"""
Tests for the lazy walk kernel and return probabilities
"""

import math

import numpy as np
import pytest

from samplers.path_sampler import sample_bridge
from samplers.rng import make_rng
from walks.walk_kernel import (
    WalkKernel,
    clt_constant_estimate,
    local_clt_lower_constant,
    make_lazy_walk,
    point_probability,
    return_probabilities,
    return_probabilities_by_convolution,
)


def test_lazy_walk_1d_law(kernel1):
    assert kernel1.stay_probability == 0.5
    assert kernel1.variance == 0.5
    assert kernel1.is_symmetric()
    assert kernel1.is_aperiodic()


def test_lazy_walk_2d_is_product(kernel2):
    assert kernel2.dimension == 2
    assert kernel2.variance == 0.5
    assert kernel2.stay_probability == 0.25


def test_unsupported_dimension():
    with pytest.raises(ValueError):
        make_lazy_walk(3)


def test_asymmetric_law_rejected():
    with pytest.raises(ValueError):
        WalkKernel(dimension=1, steps=(-1, 0, 1), step_probs=(0.2, 0.5, 0.3))


def test_periodic_law_rejected():
    with pytest.raises(ValueError):
        WalkKernel(dimension=1, steps=(-1, 1), step_probs=(0.5, 0.5))


def test_closed_form_needs_the_lazy_walk():
    sticky = WalkKernel(dimension=1, steps=(-1, 0, 1), step_probs=(0.1, 0.8, 0.1), name='sticky')
    assert not sticky.is_lazy
    assert return_probabilities_by_convolution(sticky, 3)[1] == pytest.approx(0.8)
    with pytest.raises(ValueError):
        return_probabilities(sticky, 10)
    with pytest.raises(ValueError):
        sample_bridge(sticky, 4, make_rng(1, 'test'))


def test_known_return_probabilities(kernel1, kernel2):
    p1 = return_probabilities(kernel1, 2).p
    p2 = return_probabilities(kernel2, 2).p
    assert p1[0] == 1.0
    assert p1[1] == pytest.approx(0.5, rel=1e-15)
    assert p1[2] == pytest.approx(3 / 8, rel=1e-15)
    assert p2[2] == pytest.approx(9 / 64, rel=1e-15)


def test_two_dimensional_table_is_square(table1, table2):
    np.testing.assert_allclose(table2.p, table1.p ** 2, rtol=1e-13)


def test_closed_form_matches_convolution(kernel1, kernel2):
    for kernel in (kernel1, kernel2):
        closed = return_probabilities(kernel, 20).p
        direct = return_probabilities_by_convolution(kernel, 20)
        np.testing.assert_allclose(closed, direct, rtol=1e-12)


def test_recursion_and_monotonicity(table1):
    k = np.arange(20)
    np.testing.assert_allclose(table1.p[1:21], table1.p[:20] * (2 * k + 1) / (2 * k + 2), rtol=1e-13)
    assert (np.diff(table1.p) < 0).all()
    assert (table1.p > 0).all()


def test_table_is_read_only(table1):
    with pytest.raises(ValueError):
        table1.p[3] = 0.0


def test_clt_constants(table1, table2):
    assert clt_constant_estimate(table1) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-3)
    assert clt_constant_estimate(table2, 2) == pytest.approx(1 / math.pi, rel=1e-3)


def test_clt_plateau_needs_long_table(kernel1):
    with pytest.raises(ValueError):
        clt_constant_estimate(return_probabilities(kernel1, 10))


def test_lower_constant_bounds_every_entry(table1, table2):
    for table in (table1, table2):
        c = local_clt_lower_constant(table)
        k = np.arange(1, table.max_time + 1)
        assert (table.p[1:] >= c * k ** (-table.dimension / 2) * (1 - 1e-12)).all()
    assert local_clt_lower_constant(table1) == pytest.approx(0.5)


def test_point_probability(kernel1, kernel2):
    assert point_probability(kernel1, 1, 1) == pytest.approx(0.25)
    assert point_probability(kernel1, 2, 2) == pytest.approx(1 / 16)
    assert point_probability(kernel1, 2, 3) == 0.0
    assert point_probability(kernel2, 1, (1, 0)) == pytest.approx(0.125)
    total = sum(point_probability(kernel1, 5, x) for x in range(-5, 6))
    assert total == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        point_probability(kernel2, 1, 0)
