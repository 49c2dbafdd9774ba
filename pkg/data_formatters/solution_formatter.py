"""
🌙 Solution Formatter
Renewal-solver exports: per-site contact probabilities, summaries and return tables
"""

from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from models.renewal_solver import PinningSolution
from walks.walk_kernel import ReturnProbTable

from .output_writer import PathLike, write_csv, write_json

# Column schemas, one per exported table
SOLUTION_COLUMNS = ['j', 't_j', 'mu_j']
RETURNS_COLUMNS = ['k', 'p_k']
SWEEP_COLUMNS = ['family', 'N', 'dim', 'eta', 'replica', 'seed', 'density', 'logZ',
                 'expected_contacts', 'contact_fraction', 'stderr']
PSI_COLUMNS = ['m', 'r', 'K', 'psi_uniform', 'lower_bound', 'min_found', 'distance_to_uniform']


class SolutionFormatter:
    """Turns solver results into fixed-schema tables and JSON summaries"""

    def sites_frame(self, solution: PinningSolution) -> pd.DataFrame:
        """j,t_j,mu_j with mu_j = mu(X_{t_j} = 0)"""
        return pd.DataFrame({
            'j': np.arange(1, solution.m + 1),
            't_j': np.asarray(solution.sites[1:], dtype=np.int64),
            'mu_j': solution.contact_probs,
        }, columns=SOLUTION_COLUMNS)

    def summary(self, solution: PinningSolution) -> Dict:
        """{N, eta, dim, density, logZ, expected_contacts, contact_fraction}"""
        return solution.summary()

    def returns_frame(self, table: ReturnProbTable) -> pd.DataFrame:
        return pd.DataFrame({'k': np.arange(table.max_time + 1), 'p_k': table.p}, columns=RETURNS_COLUMNS)

    def sweep_frame(self, rows: List[Dict]) -> pd.DataFrame:
        """Sweep rows sorted by (family, dim, eta, N, replica)"""
        frame = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
        return frame.sort_values(['family', 'dim', 'eta', 'N', 'replica'], kind='mergesort').reset_index(drop=True)

    def psi_frame(self, rows: List[Dict]) -> pd.DataFrame:
        frame = pd.DataFrame(rows, columns=PSI_COLUMNS)
        return frame.sort_values(['m', 'r', 'K'], kind='mergesort').reset_index(drop=True)

    def save(self, solution: PinningSolution, csv_path: PathLike, json_path: Optional[PathLike] = None,
             include_timestamp: Optional[bool] = None) -> List[Path]:
        """Write the sites CSV and, when given a path, the JSON summary"""
        written = [write_csv(self.sites_frame(solution), csv_path, include_timestamp)]
        if json_path is not None:
            written.append(write_json(self.summary(solution), json_path, include_timestamp))
        return written
