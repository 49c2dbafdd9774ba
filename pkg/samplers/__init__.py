"""
🌙 Samplers Module for sparse-pinning
Random streams and exact polymer path sampling

The path sampler depends on the solver, so it is imported explicitly:
    from samplers.path_sampler import sample_path
"""

from .rng import make_rng

__all__ = ['make_rng']
