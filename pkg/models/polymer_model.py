"""
🌙 Polymer Model
Exact renewal-DP evaluation of the 1+1 and 1+2 dimensional polymer
"""

import threading
from typing import Dict, Optional

from environments.environment import Environment, density
from walks.walk_kernel import ReturnProbTable, make_lazy_walk, return_probabilities

from .base_model import BasePinningModel, ModelSummary
from .renewal_solver import PinningInstance, solve


class PolymerModel(BasePinningModel):
    """Directed polymer over a segment environment, walk in dimension 1 or 2"""

    def __init__(self, eta: float, dim: int = 1, **kwargs):
        super().__init__(eta, **kwargs)
        self.kernel = make_lazy_walk(dim)
        self._tables: Dict[int, ReturnProbTable] = {}
        self._lock = threading.Lock()

    @property
    def model_type(self) -> str:
        return 'polymer'

    @property
    def geometry(self) -> str:
        return 'segment'

    @property
    def is_exact(self) -> bool:
        return True

    @property
    def dim(self) -> int:
        return self.kernel.dimension

    def table_for(self, n: int) -> ReturnProbTable:
        """Shared read-only return table covering times up to n"""
        with self._lock:
            covering = [table for size, table in self._tables.items() if size >= n]
            if covering:
                return covering[0]
            table = return_probabilities(self.kernel, n)
            self._tables[n] = table
            return table

    def evaluate(self, env: Environment, seed: Optional[int] = None, replica: int = 0) -> ModelSummary:
        solution = solve(PinningInstance(env=env, kernel=self.kernel, eta=self.eta), self.table_for(env.n))
        return ModelSummary(
            model=self.model_type,
            family=env.family,
            N=env.n,
            dim=self.dim,
            eta=self.eta,
            replica=replica,
            seed=seed,
            density=density(env),
            logZ=solution.log_z,
            expected_contacts=solution.expected_contacts,
            contact_fraction=solution.contact_fraction,
        )
