"""
🌙 Experiments Module for sparse-pinning
Pooled grid runners: contact-fraction sweeps and verification suites
"""

from .sweep_experiment import SweepExperiment, stabilization_summary
from .verify_experiment import VerifyExperiment, SUITES

__all__ = [
    'SweepExperiment',
    'VerifyExperiment',
    'SUITES',
    'stabilization_summary',
]
