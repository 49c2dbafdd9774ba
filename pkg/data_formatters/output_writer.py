"""
🌙 Output Writer
CSV and JSON files with stable formatting, so identical runs give identical bytes
"""

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd

from configs.pinning_configs import CONFIG

TIMESTAMP_PREFIX = '# generated_at='

PathLike = Union[str, Path]


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec='seconds')


def _use_timestamp(include_timestamp: Optional[bool]) -> bool:
    return CONFIG['INCLUDE_TIMESTAMP'] if include_timestamp is None else include_timestamp


def to_builtin(value):
    """Recursively turn numpy scalars/arrays and tuples into JSON-ready builtins"""
    if isinstance(value, dict):
        return {str(key): to_builtin(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_csv(frame: pd.DataFrame, path: PathLike, include_timestamp: Optional[bool] = None) -> Path:
    """
    Write a DataFrame as CSV

    Args:
        frame: Rows to write (index is dropped)
        path: Destination file, parent folders are created
        include_timestamp: Prepend a '# generated_at=' line (default: CONFIG['INCLUDE_TIMESTAMP'])

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = frame.to_csv(index=False, float_format=CONFIG['FLOAT_FORMAT'], lineterminator='\n')
    with open(path, 'w', newline='') as f:
        if _use_timestamp(include_timestamp):
            f.write(f"{TIMESTAMP_PREFIX}{_timestamp()}\n")
        f.write(body)
    return path


def read_csv(path: PathLike) -> pd.DataFrame:
    """Read a CSV written by write_csv (the timestamp line is skipped)"""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"CSV file not found: {path}")
    return pd.read_csv(path, comment='#')


def write_json(payload: Dict, path: PathLike, include_timestamp: Optional[bool] = None) -> Path:
    """Write a dict as sorted, indented JSON; optional generated_at field"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = to_builtin(payload)
    if _use_timestamp(include_timestamp):
        data['generated_at'] = _timestamp()
    with open(path, 'w') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write('\n')
    return path


def read_json(path: PathLike) -> Dict:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"JSON file not found: {path}")
    with open(path, 'r') as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"Malformed JSON in {path}: {e}") from e
