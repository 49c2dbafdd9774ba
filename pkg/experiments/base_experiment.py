"""
🌙 Base Experiment
Runs independent tasks in a thread pool and collects rows in a fixed order
"""

from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

import pandas as pd
from termcolor import cprint

from configs.pinning_configs import CONFIG


class BaseExperiment(ABC):
    """
    Base class for grid experiments

    This class handles:
    - The work pool (capped by threads)
    - Progress lines when verbose
    - Sorting rows so the output never depends on completion order

    Subclasses implement:
    - name
    - build_tasks() - one dict per independent grid point
    - run_task(task) - returns one row dict
    - sort_columns
    """

    def __init__(self, threads: Optional[int] = None, verbose: Optional[bool] = None,
                 seed: Optional[int] = None, config: Optional[Dict] = None):
        """
        Initialize experiment

        Args:
            threads: Pool size (default: CONFIG['THREADS'])
            verbose: Print progress (default: CONFIG['VERBOSE_MODE'])
            seed: Root seed (default: CONFIG['SEED'])
            config: Settings dict, CONFIG or one of its presets
        """
        self.config = config or CONFIG
        self.threads = self.config['THREADS'] if threads is None else threads
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1. Got: {self.threads}")
        self.verbose = self.config['VERBOSE_MODE'] if verbose is None else verbose
        self.seed = self.config['SEED'] if seed is None else seed

    @property
    @abstractmethod
    def name(self) -> str:
        pass

    @property
    @abstractmethod
    def sort_columns(self) -> List[str]:
        pass

    @abstractmethod
    def build_tasks(self) -> List[Dict]:
        pass

    @abstractmethod
    def run_task(self, task: Dict) -> Dict:
        pass

    def _run_logged(self, index: int, total: int, task: Dict) -> Dict:
        row = self.run_task(task)
        if self.verbose:
            cprint(f"   ✓ [{index + 1}/{total}] {self.describe(task)}", "cyan")
        return row

    def describe(self, task: Dict) -> str:
        return ', '.join(f"{key}={value}" for key, value in task.items())

    def to_frame(self, rows: List[Dict]) -> pd.DataFrame:
        frame = pd.DataFrame(rows)
        return frame.sort_values(self.sort_columns, kind='mergesort').reset_index(drop=True)

    def run(self) -> pd.DataFrame:
        """Run every task and return the rows as one frame (see to_frame)"""
        tasks = self.build_tasks()
        if not tasks:
            raise ValueError(f"{self.name}: nothing to run")
        if self.verbose:
            cprint(f"\n🚀 {self.name}: {len(tasks)} tasks on {self.threads} threads", "cyan", attrs=['bold'])

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            futures = [pool.submit(self._run_logged, i, len(tasks), task) for i, task in enumerate(tasks)]
            rows = [future.result() for future in futures]

        frame = self.to_frame(rows)
        if self.verbose:
            cprint(f"✅ {self.name} finished ({len(frame)} rows)", "green")
        return frame
