"""
🌙 Walks Module for sparse-pinning
Reference random walks and their return probabilities
"""

from .walk_kernel import (
    WalkKernel,
    ReturnProbTable,
    make_lazy_walk,
    return_probabilities,
    return_probabilities_by_convolution,
    clt_constant_estimate,
    local_clt_lower_constant,
    point_probability,
)

__all__ = [
    'WalkKernel',
    'ReturnProbTable',
    'make_lazy_walk',
    'return_probabilities',
    'return_probabilities_by_convolution',
    'clt_constant_estimate',
    'local_clt_lower_constant',
    'point_probability',
]
