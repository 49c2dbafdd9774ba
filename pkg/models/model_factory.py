"""
Model Factory

This module manages all available pinning models and provides a unified interface.
"""

from typing import Dict, Type

from .base_model import BasePinningModel
from .interface_model import InterfaceModel
from .polymer_model import PolymerModel


class ModelFactory:
    """Factory for creating pinning models"""

    # Map model types to their implementations
    MODEL_IMPLEMENTATIONS: Dict[str, Type[BasePinningModel]] = {
        'polymer': PolymerModel,
        'interface': InterfaceModel,
    }

    def get_model(self, model_type: str, eta: float, **kwargs) -> BasePinningModel:
        """
        Build a model instance

        Args:
            model_type: 'polymer' or 'interface'
            eta: Pinning strength
            **kwargs: Model options (dim for the polymer; sweeps, burnin, chains for the interface)

        Returns:
            BasePinningModel
        """
        if model_type not in self.MODEL_IMPLEMENTATIONS:
            raise ValueError(
                f"Unknown model type: {model_type}. Available: {', '.join(self.MODEL_IMPLEMENTATIONS)}"
            )
        if model_type == 'interface':
            kwargs.pop('dim', None)
        return self.MODEL_IMPLEMENTATIONS[model_type](eta, **kwargs)

    @property
    def available_models(self) -> list:
        return list(self.MODEL_IMPLEMENTATIONS)

    def is_model_available(self, model_type: str) -> bool:
        return model_type in self.MODEL_IMPLEMENTATIONS


# Create a singleton instance
model_factory = ModelFactory()


def get_model(model_type: str, eta: float, **kwargs) -> BasePinningModel:
    return model_factory.get_model(model_type, eta, **kwargs)
