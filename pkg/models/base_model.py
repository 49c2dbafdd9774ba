"""
sparse-pinning
This module defines the base interface for all pinning models.
"""

from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass
from typing import Dict, Optional

from environments.environment import Environment, generate


@dataclass
class ModelSummary:
    """Standardized result row for all models"""
    model: str
    family: str
    N: int
    dim: int
    eta: float
    replica: int
    seed: Optional[int]
    density: float
    logZ: float
    expected_contacts: float
    contact_fraction: float
    stderr: float = 0.0

    def to_dict(self) -> Dict:
        return asdict(self)


class BasePinningModel(ABC):
    """
    Base interface for all pinning models

    This class handles:
    - Environment construction for a family at a given size
    - Dispatch from (family, N, seed) to a ModelSummary

    Subclasses implement:
    - geometry / model_type
    - evaluate(env, ...) for one environment
    """

    def __init__(self, eta: float, **kwargs):
        if eta < 0:
            raise ValueError(f"eta must be >= 0. Got: {eta}")
        self.eta = eta
        self.options = kwargs

    @property
    @abstractmethod
    def model_type(self) -> str:
        """Return the type/name of the model"""
        pass

    @property
    @abstractmethod
    def geometry(self) -> str:
        """'segment' or 'square'"""
        pass

    @property
    @abstractmethod
    def is_exact(self) -> bool:
        """Whether results are exact or Monte Carlo estimates"""
        pass

    @abstractmethod
    def evaluate(self, env: Environment, seed: Optional[int] = None, replica: int = 0) -> ModelSummary:
        """Contact statistics for one environment"""
        pass

    def build_environment(self, family: str, n: int, seed: Optional[int] = None,
                          density: float = 0.5, gap: int = 2,
                          profile=(0.8, 0.0, 0.8)) -> Environment:
        """Environment of the requested family in this model's geometry"""
        return generate(family, n, geometry=self.geometry, density=density, gap=gap,
                        profile=profile, seed=seed)

    def run(self, family: str, n: int, seed: Optional[int] = None, replica: int = 0,
            **env_kwargs) -> ModelSummary:
        env = self.build_environment(family, n, seed, **env_kwargs)
        return self.evaluate(env, seed=seed, replica=replica)

    def __str__(self):
        return f"{self.model_type}(eta={self.eta})"
