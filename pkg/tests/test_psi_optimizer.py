"""
Tests for the gap-product sums, the simplex minimizer and the Jensen bound
"""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from optimizers.psi_optimizer import (
    GapVector,
    PsiPerObjective,
    check_convexity,
    compare_psi_psiper,
    harmonic_log_margin,
    jensen_gap_bound,
    minimize_psi_per,
    perturbation_gap,
    project_onto_simplex,
    psi,
    psi_per,
    psi_per_uniform_lower_bound,
    random_gap_vectors,
)


def brute_psi_per(gaps, budget, r):
    sites = np.cumsum(gaps)
    total = 0.0
    for ell in itertools.combinations(range(len(sites)), r):
        term = 1.0 / (budget - (sites[ell[-1]] - sites[ell[0]]))
        for a, b in zip(ell, ell[1:]):
            term /= sites[b] - sites[a]
        total += term
    return total


def test_psi_small_cases():
    g = GapVector(gaps=[1.0, 1.0, 1.0], budget=4.0)
    assert psi(g, 1) == pytest.approx(1 + 1 / 2 + 1 / 3)
    assert psi(g, 3) == pytest.approx(1.0)
    assert psi(GapVector(gaps=[1.0, 2.0], budget=4.0), 2) == pytest.approx(0.5)


def test_psi_per_single_site_tuples():
    g = GapVector(gaps=[2.0, 3.0, 1.0, 4.0], budget=10.0)
    assert psi_per(g, 1) == pytest.approx(4 / 10)


def test_psi_per_matches_enumeration(rng):
    for m in (3, 5, 7):
        for gaps in random_gap_vectors(m, 50.0, 5, rng):
            for r in range(1, m + 1):
                assert psi_per(GapVector(gaps=gaps, budget=50.0), r) == pytest.approx(
                    brute_psi_per(gaps, 50.0, r), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.5, 10.0), min_size=3, max_size=7), st.integers(0, 6), st.integers(1, 3))
def test_psi_per_is_cyclic_and_reversal_invariant(raw, shift, r):
    gaps = np.array(raw)
    budget = float(gaps.sum())
    r = min(r, len(gaps))
    base = psi_per(GapVector(gaps=gaps, budget=budget), r)
    rolled = np.roll(gaps, shift % len(gaps))
    assert psi_per(GapVector(gaps=rolled, budget=budget), r) == pytest.approx(base, rel=1e-10)
    assert psi_per(GapVector(gaps=gaps[::-1], budget=budget), r) == pytest.approx(base, rel=1e-10)


def test_gap_vector_validation():
    with pytest.raises(ValueError):
        GapVector(gaps=[1.0, 0.0], budget=5.0)
    with pytest.raises(ValueError):
        GapVector(gaps=[3.0, 3.0], budget=5.0)
    with pytest.raises(ValueError):
        GapVector(gaps=[], budget=5.0)
    g = GapVector.from_sites([2, 5, 9], 10)
    assert g.gaps.tolist() == [2.0, 3.0, 4.0]
    assert g.budget == 11.0
    assert g.periodized().gaps.sum() == pytest.approx(11.0)


def test_order_checks():
    g = GapVector(gaps=[1.0, 1.0], budget=3.0)
    with pytest.raises(ValueError):
        psi(g, 3)
    with pytest.raises(ValueError):
        psi(g, 0)


def test_comparison_chain(rng):
    for m in (3, 6):
        for gaps in random_gap_vectors(m, 101.0, 10, rng, slack=True):
            for r in range(1, m + 1):
                first, second, third = compare_psi_psiper(GapVector(gaps=gaps, budget=101.0), r)
                assert first >= second * (1 - 1e-12)
                assert second >= third * (1 - 1e-12)


def test_no_convexity_violations(rng):
    assert check_convexity(5, 2, 101.0, 200, rng) == 0
    assert check_convexity(4, 3, 101.0, 200, rng, function='psi') == 0
    with pytest.raises(ValueError):
        check_convexity(4, 2, 101.0, 10, rng, function='phi')


def test_simplex_projection(rng):
    v = rng.normal(size=8) * 5
    x = project_onto_simplex(v, 3.0)
    assert x.sum() == pytest.approx(3.0)
    assert (x >= 0).all()
    inside = np.array([0.5, 1.5, 1.0])
    np.testing.assert_allclose(project_onto_simplex(inside, 3.0), inside)
    with pytest.raises(ValueError):
        project_onto_simplex(v, 0.0)


def test_objective_value_and_gradient(rng):
    objective = PsiPerObjective(5, 3)
    x = random_gap_vectors(5, 20.0, 1, rng)[0]
    assert objective.value(x) == pytest.approx(psi_per(GapVector(gaps=x, budget=20.0), 3), rel=1e-12)
    h = 1e-6
    numeric = np.array([
        (objective.value(x + h * e) - objective.value(x - h * e)) / (2 * h) for e in np.eye(5)
    ])
    np.testing.assert_allclose(objective.gradient(x), numeric, rtol=1e-5)


def test_minimizer_reaches_uniform(rng):
    result = minimize_psi_per(4, 2, 101.0, rng=rng)
    assert result.distance_to_uniform() <= 1e-6
    assert result.gaps.sum() == pytest.approx(101.0)


def test_minimizer_rejects_constant_case():
    with pytest.raises(ValueError):
        minimize_psi_per(4, 1, 101.0)
    with pytest.raises(ValueError):
        minimize_psi_per(4, 2, -1.0)


def test_uniform_lower_bound():
    for m, r, k in ((8, 2, 2), (10, 3, 4), (12, 2, 5)):
        bound = psi_per_uniform_lower_bound(m, r, k, 101.0)
        assert 0 < bound <= psi_per(GapVector.uniform(m, 101.0), r)
    with pytest.raises(ValueError):
        psi_per_uniform_lower_bound(4, 3, 2, 101.0)
    with pytest.raises(ValueError):
        psi_per_uniform_lower_bound(8, 2, 1, 101.0)


def test_harmonic_margin_is_positive():
    margin = harmonic_log_margin(1000)
    assert 0.5772 < margin < 0.5783
    assert harmonic_log_margin(1) == pytest.approx(1.0)


def test_jensen_bound_holds(rng):
    n = 40
    for m in (1, 5, 12):
        sites = np.sort(rng.choice(np.arange(1, n + 1), size=m, replace=False))
        for r in range(1, m + 1):
            lhs, rhs = jensen_gap_bound(sites, r, n, rng=rng)
            assert lhs >= rhs * (1 - 1e-12)
    with pytest.raises(ValueError):
        jensen_gap_bound([3, 2], 1, 10)


def test_perturbation_raises_psi_per():
    assert perturbation_gap(6, 2, 101.0, 1.0) > 0
    assert perturbation_gap(6, 3, 101.0, -2.0) > 0
    with pytest.raises(ValueError):
        perturbation_gap(6, 2, 101.0, 20.0)


def test_uniform_value_closed_form_for_pairs():
    m, budget = 6, 60.0
    spacing = budget / m
    expected = sum(
        1.0 / ((b - a) * spacing * (budget - (b - a) * spacing))
        for a, b in itertools.combinations(range(m), 2)
    )
    assert psi_per(GapVector.uniform(m, budget), 2) == pytest.approx(expected, rel=1e-12)
    assert math.isfinite(expected)
