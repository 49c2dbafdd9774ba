"""
🌙 Environment Formatter
Environment JSON (run-length encoded bits) and contact-site CSV exports
"""

from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from environments.environment import Environment, GEOMETRIES, contact_sites

from .output_writer import PathLike, read_json, write_csv, write_json


def run_length_encode(bits: np.ndarray) -> List[List[int]]:
    """[[value, run], ...] over the raster-flattened bits"""
    flat = np.asarray(bits, dtype=np.uint8).ravel()
    if flat.size == 0:
        return []
    starts = np.flatnonzero(np.concatenate([[True], flat[1:] != flat[:-1]]))
    runs = np.diff(np.append(starts, flat.size))
    return [[int(flat[s]), int(r)] for s, r in zip(starts, runs)]


def run_length_decode(runs: List[List[int]], size: int) -> np.ndarray:
    if any(len(pair) != 2 or pair[0] not in (0, 1) or pair[1] < 1 for pair in runs):
        raise ValueError("Run-length pairs must be [0|1, run >= 1]")
    values = np.array([pair[0] for pair in runs], dtype=np.uint8)
    lengths = np.array([pair[1] for pair in runs], dtype=np.int64)
    flat = np.repeat(values, lengths)
    if flat.size != size:
        raise ValueError(f"Run lengths add up to {flat.size} bits, expected {size}")
    return flat


class EnvironmentFormatter:
    """
    Reads and writes environments

    File format:
        {"geometry": "segment", "N": 900, "seed": 7, "family": "block",
         "bits": [[1, 3], [0, 1], ...]}
    """

    def to_dict(self, env: Environment) -> Dict:
        return {
            'geometry': env.geometry,
            'N': env.n,
            'seed': env.seed,
            'family': env.family,
            'bits': run_length_encode(env.bits),
        }

    def from_dict(self, payload: Dict) -> Environment:
        missing = [key for key in ('geometry', 'N', 'bits') if key not in payload]
        if missing:
            raise ValueError(f"Environment file is missing fields: {', '.join(missing)}")
        geometry = payload['geometry']
        if geometry not in GEOMETRIES:
            raise ValueError(f"Geometry must be one of {GEOMETRIES}. Got: {geometry}")
        n = int(payload['N'])
        shape = (n,) if geometry == 'segment' else (n, n)
        bits = run_length_decode(payload['bits'], int(np.prod(shape))).reshape(shape)
        return Environment(
            geometry=geometry,
            n=n,
            bits=bits,
            seed=payload.get('seed'),
            family=payload.get('family', 'custom'),
        )

    def save(self, env: Environment, path: PathLike, include_timestamp: Optional[bool] = None) -> Path:
        return write_json(self.to_dict(env), path, include_timestamp)

    def load(self, path: PathLike) -> Environment:
        return self.from_dict(read_json(path))

    def sites_frame(self, env: Environment) -> pd.DataFrame:
        """index,t on the segment; index,t_1,t_2 on the square"""
        sites = contact_sites(env)
        index = np.arange(1, sites.m + 1)
        if env.geometry == 'segment':
            return pd.DataFrame({'index': index, 't': sites.positions})
        positions = sites.positions.reshape(-1, 2)
        return pd.DataFrame({'index': index, 't_1': positions[:, 0], 't_2': positions[:, 1]})

    def save_sites(self, env: Environment, path: PathLike, include_timestamp: Optional[bool] = None) -> Path:
        return write_csv(self.sites_frame(env), path, include_timestamp)
