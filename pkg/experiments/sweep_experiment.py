"""
🌙 Sweep Experiment
Contact fraction versus N over an environment family, eta grid and replicas

Usage:
    from experiments.sweep_experiment import SweepExperiment

    frame = SweepExperiment(family='vanishing', n_list=[256, 1024, 4096]).run()
"""

import math
from typing import Dict, List, Optional, Sequence

import pandas as pd
from termcolor import cprint

from data_formatters.solution_formatter import SWEEP_COLUMNS, SolutionFormatter
from models.model_factory import model_factory

from .base_experiment import BaseExperiment

FAMILIES = ('bernoulli', 'periodic', 'block', 'vanishing')


class SweepExperiment(BaseExperiment):
    """
    Grid over (eta, N, replica) for one family

    Replica r builds its environment from seed + r; the seed column records
    that value, so every row can be regenerated on its own.
    """

    def __init__(self, family: Optional[str] = None, n_list: Optional[Sequence[int]] = None,
                 eta_list: Optional[Sequence[float]] = None, dim: Optional[int] = None,
                 replicas: Optional[int] = None, model: str = 'polymer',
                 density: Optional[float] = None, gap: Optional[int] = None,
                 profile: Optional[Sequence[float]] = None, **kwargs):
        super().__init__(**kwargs)
        cfg = self.config
        self.family = family or cfg['SWEEP_FAMILY']
        self.n_list = list(cfg['SWEEP_N_LIST'] if n_list is None else n_list)
        self.eta_list = list(cfg['SWEEP_ETA_LIST'] if eta_list is None else eta_list)
        self.dim = cfg['SWEEP_DIM'] if dim is None else dim
        self.replicas = cfg['SWEEP_REPLICAS'] if replicas is None else replicas
        self.model_type = model
        self.formatter = SolutionFormatter()
        self.env_kwargs = {
            'density': cfg['SWEEP_DENSITY'] if density is None else density,
            'gap': cfg['SWEEP_GAP'] if gap is None else gap,
            'profile': tuple(cfg['SWEEP_PROFILE'] if profile is None else profile),
        }

        if self.family not in FAMILIES:
            raise ValueError(f"Unknown family: {self.family}. Use one of {', '.join(FAMILIES)}")
        if not self.n_list:
            raise ValueError("n_list is empty")
        if not self.eta_list:
            raise ValueError("eta_list is empty")
        if any(int(n) != n or n < 1 for n in self.n_list):
            raise ValueError(f"Every N must be a positive integer. Got: {self.n_list}")
        if self.replicas < 1:
            raise ValueError(f"replicas must be >= 1. Got: {self.replicas}")
        if not model_factory.is_model_available(model):
            raise ValueError(f"Unknown model: {model}. Available: {', '.join(model_factory.available_models)}")

        # One model per eta so return tables are shared across N
        self.models = {
            eta: model_factory.get_model(model, eta, dim=self.dim) for eta in self.eta_list
        }
        if model == 'interface':
            self.dim = 2

        if self.verbose:
            cprint(f"\n🌙 Sweep initialized", "cyan", attrs=['bold'])
            cprint(f"   Model: {model} (dim={self.dim})", "white")
            cprint(f"   Family: {self.family} {self.env_kwargs}", "white")
            cprint(f"   N: {self.n_list}", "white")
            cprint(f"   eta: {self.eta_list}   replicas: {self.replicas}   seed: {self.seed}", "white")

    @property
    def name(self) -> str:
        return f"sweep[{self.model_type}:{self.family}]"

    @property
    def sort_columns(self) -> List[str]:
        return ['family', 'dim', 'eta', 'N', 'replica']

    def build_tasks(self) -> List[Dict]:
        return [
            {'eta': eta, 'N': int(n), 'replica': replica}
            for eta in self.eta_list
            for n in self.n_list
            for replica in range(self.replicas)
        ]

    def run_task(self, task: Dict) -> Dict:
        model = self.models[task['eta']]
        seed = self.seed + task['replica']
        summary = model.run(self.family, task['N'], seed=seed, replica=task['replica'], **self.env_kwargs)
        row = summary.to_dict()
        return {column: row[column] for column in SWEEP_COLUMNS}

    def to_frame(self, rows: List[Dict]) -> pd.DataFrame:
        return self.formatter.sweep_frame(rows)


def stabilization_summary(frame: pd.DataFrame, tolerance: float = 0.10) -> pd.DataFrame:
    """
    Empirical N beyond which the mean contact fraction stops moving

    For each (family, dim, eta) the replica-averaged fraction is compared between
    consecutive N; stabilization_N is the smallest N from which every later
    relative change stays below tolerance (NaN if the last step still moves).

    Returns:
        DataFrame with family, dim, eta, stabilization_N, final_fraction
    """
    rows = []
    for (family, dim, eta), group in frame.groupby(['family', 'dim', 'eta'], sort=True):
        means = group.groupby('N')['contact_fraction'].mean().sort_index()
        ns = means.index.to_numpy()
        values = means.to_numpy()
        stable_from = math.nan
        for i in range(len(values) - 1, 0, -1):
            scale = max(abs(values[i - 1]), 1e-300)
            if abs(values[i] - values[i - 1]) / scale >= tolerance:
                break
            stable_from = int(ns[i - 1])
        rows.append({
            'family': family,
            'dim': int(dim),
            'eta': float(eta),
            'stabilization_N': stable_from,
            'final_fraction': float(values[-1]) if len(values) else math.nan,
        })
    return pd.DataFrame(rows, columns=['family', 'dim', 'eta', 'stabilization_N', 'final_fraction'])


def fraction_by_n(frame: pd.DataFrame) -> Dict[int, float]:
    """Replica-averaged contact fraction keyed by N"""
    means = frame.groupby('N')['contact_fraction'].mean()
    return {int(n): float(value) for n, value in means.items()}

