"""
🌙 Oracles Module for sparse-pinning
Brute-force enumerations used as ground truth
"""

from .enumeration import (
    OracleResult,
    zero_pattern_law,
    enumerate_polymer,
    compare_with_solver,
    decomposition_sum,
    psi_by_tuples,
    psi_per_by_tuples,
    gff_ratio_by_quadrature,
)

__all__ = [
    'OracleResult',
    'zero_pattern_law',
    'enumerate_polymer',
    'compare_with_solver',
    'decomposition_sum',
    'psi_by_tuples',
    'psi_per_by_tuples',
    'gff_ratio_by_quadrature',
]
