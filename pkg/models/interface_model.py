"""
🌙 Interface Model
Monte Carlo pinned fraction of the 2+1 Gaussian interface
"""

from typing import Optional

from configs.pinning_configs import CONFIG
from environments.environment import Environment, density
from samplers.rng import make_rng

from .base_model import BasePinningModel, ModelSummary
from .gff_pinning import GffInstance, exact_expansion_small, pinned_fraction_estimate


class InterfaceModel(BasePinningModel):
    """
    Delta-pinned Gaussian interface over a square environment

    The pinned fraction comes from the Gibbs sampler; log(Z_eta/Z_0) is
    reported exactly when the reward sites are few enough to enumerate, else NaN.
    """

    def __init__(self, eta: float, sweeps: Optional[int] = None, burnin: Optional[int] = None,
                 chains: Optional[int] = None, **kwargs):
        super().__init__(eta, **kwargs)
        self.sweeps = sweeps or CONFIG['INTERFACE_SWEEPS']
        self.burnin = burnin if burnin is not None else CONFIG['INTERFACE_BURNIN']
        self.chains = chains or CONFIG['INTERFACE_CHAINS']

    @property
    def model_type(self) -> str:
        return 'interface'

    @property
    def geometry(self) -> str:
        return 'square'

    @property
    def is_exact(self) -> bool:
        return False

    def evaluate(self, env: Environment, seed: Optional[int] = None, replica: int = 0) -> ModelSummary:
        instance = GffInstance(env=env, eta=self.eta)
        rng = make_rng(seed, 'gibbs', replica)
        mean, stderr = pinned_fraction_estimate(instance, self.sweeps, self.burnin, rng, self.chains)

        log_ratio = float('nan')
        if env.ones <= CONFIG['GFF_MAX_PINNABLE']:
            log_ratio = exact_expansion_small(instance).log_ratio

        return ModelSummary(
            model=self.model_type,
            family=env.family,
            N=env.n,
            dim=2,
            eta=self.eta,
            replica=replica,
            seed=seed,
            density=density(env),
            logZ=log_ratio,
            expected_contacts=mean * env.size,
            contact_fraction=mean,
            stderr=stderr,
        )
