"""
Tests for the model factory and the two pinning models
"""

import math

import numpy as np
import pytest

from environments.environment import from_bits
from models import get_model, model_factory
from models.base_model import ModelSummary
from models.interface_model import InterfaceModel
from models.polymer_model import PolymerModel


def test_factory_lists_models():
    assert model_factory.available_models == ['polymer', 'interface']
    assert model_factory.is_model_available('polymer')
    assert not model_factory.is_model_available('openai')


def test_factory_builds_models():
    polymer = get_model('polymer', 1.0, dim=2)
    assert isinstance(polymer, PolymerModel)
    assert polymer.dim == 2 and polymer.is_exact
    interface = model_factory.get_model('interface', 1.0, dim=1, sweeps=50, burnin=10, chains=2)
    assert isinstance(interface, InterfaceModel)
    assert interface.geometry == 'square' and not interface.is_exact
    assert str(interface) == 'interface(eta=1.0)'


def test_factory_rejects_unknown_model():
    with pytest.raises(ValueError):
        get_model('membrane', 1.0)


def test_negative_eta_rejected():
    with pytest.raises(ValueError):
        PolymerModel(-0.1)


def test_polymer_two_site_summary(two_site_env):
    summary = PolymerModel(math.log(2)).evaluate(two_site_env, seed=3, replica=1)
    assert isinstance(summary, ModelSummary)
    assert math.exp(summary.logZ) == pytest.approx(2.125)
    assert summary.expected_contacts == pytest.approx(2.75 / 2.125)
    assert summary.replica == 1 and summary.seed == 3
    assert summary.stderr == 0.0
    assert summary.to_dict()['model'] == 'polymer'


def test_polymer_shares_return_tables():
    model = PolymerModel(1.0)
    large = model.table_for(500)
    assert model.table_for(100) is large
    assert model.table_for(800).max_time == 800


def test_polymer_run_builds_the_family():
    summary = PolymerModel(1.0).run('periodic', 120, seed=5, gap=3)
    assert summary.family == 'periodic'
    assert summary.density == pytest.approx(1 / 3)
    assert 0 < summary.contact_fraction < 1


def test_interface_small_lattice():
    model = InterfaceModel(2.0, sweeps=200, burnin=20, chains=2)
    env = from_bits(np.ones((2, 2), dtype=np.uint8))
    summary = model.evaluate(env, seed=11)
    assert summary.dim == 2
    assert math.isfinite(summary.logZ)
    assert 0 < summary.contact_fraction < 1
    assert summary.expected_contacts == pytest.approx(4 * summary.contact_fraction)
    assert summary.stderr > 0


def test_interface_reproducible_per_replica():
    model = InterfaceModel(1.0, sweeps=60, burnin=10, chains=1)
    env = from_bits(np.ones((3, 3), dtype=np.uint8))
    first = model.evaluate(env, seed=4, replica=0)
    again = model.evaluate(env, seed=4, replica=0)
    other = model.evaluate(env, seed=4, replica=1)
    assert first.contact_fraction == again.contact_fraction
    assert first.contact_fraction != other.contact_fraction


def test_interface_skips_exact_ratio_on_many_sites():
    model = InterfaceModel(1.0, sweeps=30, burnin=5, chains=1)
    summary = model.run('bernoulli', 6, seed=2, density=1.0)
    assert math.isnan(summary.logZ)


def test_interface_rejects_segment_only_families():
    with pytest.raises(ValueError):
        InterfaceModel(1.0, sweeps=30, burnin=5).run('block', 6, seed=1)
