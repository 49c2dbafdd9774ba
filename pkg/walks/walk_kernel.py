"""
🌙 Walk Kernel
Reference random walks of the polymer and their exact return probabilities

The reference walk is the lazy simple walk: each coordinate stays put with
probability 1/2 and moves +-1 with probability 1/4. A lazy step is (a + b)/2
for two independent fair signs, so X_k = 0 exactly when a 2k-step simple walk
sits at 0, which gives p_k = C(2k, k) 4^-k in one dimension. In two dimensions
the coordinates are independent and p_k is squared.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.stats import binom

from configs.pinning_configs import CONFIG

SUPPORTED_DIMENSIONS = (1, 2)


@dataclass(frozen=True)
class WalkKernel:
    """
    Step law of the reference walk on Z^d

    The law is a product over coordinates of the same one-dimensional law
    given by steps / step_probs.
    """
    dimension: int
    steps: Tuple[int, ...] = (-1, 0, 1)
    step_probs: Tuple[float, ...] = (0.25, 0.5, 0.25)
    name: str = 'lazy'

    def __post_init__(self):
        if self.dimension not in SUPPORTED_DIMENSIONS:
            raise ValueError(f"Only dimensions {SUPPORTED_DIMENSIONS} are supported. Got: {self.dimension}")
        if len(self.steps) != len(self.step_probs):
            raise ValueError("steps and step_probs must have the same length")
        if not math.isclose(sum(self.step_probs), 1.0, rel_tol=0, abs_tol=1e-14):
            raise ValueError(f"Step probabilities must sum to 1. Got: {sum(self.step_probs)}")
        if not self.is_symmetric():
            raise ValueError("Step law must be symmetric")
        if not self.is_aperiodic():
            raise ValueError("Step law must be aperiodic (P(step = 0) > 0)")
        if not self.variance > 0:
            raise ValueError("Step variance must be strictly positive")

    @property
    def variance(self) -> float:
        """Per-coordinate step variance"""
        return float(sum(p * s * s for s, p in zip(self.steps, self.step_probs)))

    @property
    def is_lazy(self) -> bool:
        return tuple(self.steps) == (-1, 0, 1) and tuple(self.step_probs) == (0.25, 0.5, 0.25)

    @property
    def stay_probability(self) -> float:
        """P(xi = 0) for the full d-dimensional step"""
        return self._coordinate_prob(0) ** self.dimension

    def _coordinate_prob(self, step: int) -> float:
        return sum(p for s, p in zip(self.steps, self.step_probs) if s == step)

    def is_symmetric(self) -> bool:
        return all(
            math.isclose(self._coordinate_prob(s), self._coordinate_prob(-s), abs_tol=1e-15)
            for s in self.steps
        )

    def is_aperiodic(self) -> bool:
        return self._coordinate_prob(0) > 0

    def point_probability(self, time: int, position: Union[int, Sequence[int]]) -> float:
        """P_0(X_time = position)"""
        return point_probability(self, time, position)


@dataclass(frozen=True)
class ReturnProbTable:
    """
    Exact return probabilities p[k] = P_0(X_k = 0) for k = 0..max_time

    Stored both linearly and in log form. The arrays are read-only.
    """
    dimension: int
    max_time: int
    p: np.ndarray
    log_p: np.ndarray

    def __post_init__(self):
        if len(self.p) != self.max_time + 1 or len(self.log_p) != self.max_time + 1:
            raise ValueError("Table length must be max_time + 1")
        self.p.flags.writeable = False
        self.log_p.flags.writeable = False

    def covers(self, time: int) -> bool:
        return time <= self.max_time


def make_lazy_walk(dimension: int) -> WalkKernel:
    """
    Build the lazy walk in dimension 1 or 2

    Args:
        dimension: 1 (polymer in 1+1) or 2 (polymer in 1+2)

    Returns:
        WalkKernel with P(xi = 0) = 1/2 per coordinate and variance 1/2
    """
    if dimension not in SUPPORTED_DIMENSIONS:
        raise ValueError(f"Only dimensions {SUPPORTED_DIMENSIONS} are supported. Got: {dimension}")
    return WalkKernel(dimension=dimension)


def return_probabilities(kernel: WalkKernel, max_time: int) -> ReturnProbTable:
    """
    Closed-form return probabilities of the lazy walk

    Uses p[k+1] = p[k] (2k+1)/(2k+2) in one dimension, summed in log form.

    Args:
        kernel: Lazy walk kernel
        max_time: Largest time k in the table

    Returns:
        ReturnProbTable with p[0] = 1
    """
    if not kernel.is_lazy:
        raise ValueError(f"Closed-form return probabilities need the lazy walk. Got: {kernel.name}")
    if max_time < 0:
        raise ValueError(f"max_time must be >= 0. Got: {max_time}")
    k = np.arange(max_time, dtype=np.float64)
    log_ratio = np.log((2.0 * k + 1.0) / (2.0 * k + 2.0))
    log_p_1d = np.concatenate([[0.0], np.cumsum(log_ratio)])
    log_p = kernel.dimension * log_p_1d
    return ReturnProbTable(
        dimension=kernel.dimension,
        max_time=max_time,
        p=np.exp(log_p),
        log_p=log_p,
    )


def return_probabilities_by_convolution(kernel: WalkKernel, max_time: int) -> np.ndarray:
    """
    Return probabilities by repeated convolution of the one-dimensional step law

    Independent of the closed form; O(max_time^2), meant for small tables.
    """
    step_law = np.zeros(2 * max(kernel.steps) + 1)
    offset = max(kernel.steps)
    for s, prob in zip(kernel.steps, kernel.step_probs):
        step_law[s + offset] += prob

    law = np.array([1.0])
    p = np.empty(max_time + 1)
    p[0] = 1.0
    for k in range(1, max_time + 1):
        law = np.convolve(law, step_law)
        p[k] = law[len(law) // 2]
    return p ** kernel.dimension


def clt_constant_estimate(table: ReturnProbTable, dimension: int = None) -> float:
    """
    Estimate lim p_k k^{d/2} from the tail of the table

    Args:
        table: Return probability table with max_time >= CONFIG['CLT_MIN_TIME']
        dimension: Walk dimension (default: the table's)

    Returns:
        Plateau value of p_k k^{d/2} at the end of the table
    """
    dimension = dimension or table.dimension
    if table.max_time < CONFIG['CLT_MIN_TIME']:
        raise ValueError(
            f"Table too short to read the local CLT plateau: max_time={table.max_time}, "
            f"need >= {CONFIG['CLT_MIN_TIME']}"
        )
    k = np.arange(1, table.max_time + 1, dtype=np.float64)
    scaled = table.p[1:] * k ** (dimension / 2.0)

    # Relative change over the last decade of k
    decade_start = scaled[table.max_time // 10 - 1]
    change = abs(scaled[-1] - decade_start) / scaled[-1]
    if change > CONFIG['CLT_PLATEAU_TOLERANCE']:
        raise RuntimeError(f"No local CLT plateau: relative change {change:.3e} over the last decade")
    return float(scaled[-1])


def local_clt_lower_constant(table: ReturnProbTable) -> float:
    """
    Largest c with p_k >= c k^{-d/2} for every 1 <= k <= max_time

    For the lazy walk p_k k^{d/2} increases in k, so this is attained at k = 1.
    """
    if table.max_time < 1:
        raise ValueError("Table must contain k = 1")
    k = np.arange(1, table.max_time + 1, dtype=np.float64)
    return float(np.min(table.p[1:] * k ** (table.dimension / 2.0)))


@lru_cache(maxsize=None)
def lazy_point_probability(time: int, position: int) -> float:
    """P_0(X_time = position) for the one-dimensional lazy walk: C(2j, j+x) 4^-j"""
    if abs(position) > time:
        return 0.0
    return float(binom.pmf(time + position, 2 * time, 0.5))


def point_probability(kernel: WalkKernel, time: int, position: Union[int, Sequence[int]]) -> float:
    """
    P_0(X_time = position) for the lazy walk

    Args:
        kernel: Lazy walk kernel
        time: Number of steps j >= 0
        position: Integer (d = 1) or sequence of d integers

    Returns:
        Probability of being at position after time steps
    """
    if time < 0:
        raise ValueError(f"time must be >= 0. Got: {time}")
    coords = [position] if np.isscalar(position) else list(position)
    if len(coords) != kernel.dimension:
        raise ValueError(f"Position {position} does not match dimension {kernel.dimension}")
    prob = 1.0
    for x in coords:
        prob *= lazy_point_probability(int(time), abs(int(x)))
    return prob
