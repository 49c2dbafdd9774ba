"""
Data formatters for sparse-pinning exports
"""

from .environment_formatter import EnvironmentFormatter
from .solution_formatter import SolutionFormatter, SWEEP_COLUMNS, PSI_COLUMNS
from .trajectory_formatter import TrajectoryFormatter
from .output_writer import write_csv, write_json, read_csv, read_json

__all__ = [
    'EnvironmentFormatter',
    'SolutionFormatter',
    'TrajectoryFormatter',
    'SWEEP_COLUMNS',
    'PSI_COLUMNS',
    'write_csv',
    'write_json',
    'read_csv',
    'read_json',
]
