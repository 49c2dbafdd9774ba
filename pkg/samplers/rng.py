"""
🌙 Random Streams
Every random draw in the repo comes from a named Philox substream of one root seed
"""

import zlib
from typing import Optional

import numpy as np

from configs.pinning_configs import CONFIG


def stream_key(name: str) -> int:
    """Stable 32-bit key for a stream name (crc32, identical on every platform)"""
    return zlib.crc32(name.encode('utf-8'))


def make_rng(seed: Optional[int] = None, stream: str = 'main', index: int = 0) -> np.random.Generator:
    """
    Build a counter-based generator for one named substream

    Args:
        seed: Root seed (default: CONFIG['SEED'])
        stream: Substream name, e.g. 'environment', 'sampler', 'gibbs'
        index: Substream index (replica, task number, ...)

    Returns:
        numpy Generator backed by Philox4x64
    """
    if seed is None:
        seed = CONFIG['SEED']
    if seed < 0 or index < 0:
        raise ValueError(f"Seed and stream index must be non-negative. Got seed={seed}, index={index}")
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(stream_key(stream), int(index)))
    return np.random.Generator(np.random.Philox(sequence))
