"""
🌙 Optimizers Module for sparse-pinning
Gap-product sums and their minimization on the simplex
"""

from .psi_optimizer import (
    GapVector,
    psi,
    psi_per,
    check_convexity,
    minimize_psi_per,
    compare_psi_psiper,
    psi_per_uniform_lower_bound,
    jensen_gap_bound,
    perturbation_gap,
    project_onto_simplex,
)

__all__ = [
    'GapVector',
    'psi',
    'psi_per',
    'check_convexity',
    'minimize_psi_per',
    'compare_psi_psiper',
    'psi_per_uniform_lower_bound',
    'jensen_gap_bound',
    'perturbation_gap',
    'project_onto_simplex',
]
