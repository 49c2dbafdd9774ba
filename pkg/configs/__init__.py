"""
Configuration for sparse-pinning
"""

from .pinning_configs import CONFIG, QUICK_CONFIG, ACCEPTANCE_CONFIG, BLOCK_CONFIG

__all__ = [
    'CONFIG',
    'QUICK_CONFIG',
    'ACCEPTANCE_CONFIG',
    'BLOCK_CONFIG',
]
