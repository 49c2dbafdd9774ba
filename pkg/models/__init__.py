"""
🌙 Models Module for sparse-pinning
Renewal solver, Gaussian interface and the uniform model surface
"""

from .model_factory import model_factory, get_model

__all__ = ['model_factory', 'get_model']
