"""
🌙 Path Sampler
Exact samples of the pinned polymer

A draw first picks the pinned set A from the renewal arrays, walking back from
the last pinned site, then fills every gap of {0} u A with a walk bridge and
appends a free walk after max A.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from environments.environment import Environment, block_edges
from models.renewal_solver import PinningInstance, PinningSolution, solve
from walks.walk_kernel import ReturnProbTable, WalkKernel, lazy_point_probability, return_probabilities


@dataclass
class Trajectory:
    """
    One polymer path

    positions has shape (N + 1, d); row i is X_i and row 0 is the origin.
    contact_set holds the pinned times A in increasing order.
    """
    positions: np.ndarray
    contact_set: np.ndarray

    @property
    def n(self) -> int:
        return len(self.positions) - 1

    @property
    def dimension(self) -> int:
        return int(self.positions.shape[1])

    def at_zero(self) -> np.ndarray:
        """Boolean mask over i = 0..N of X_i = 0"""
        return ~self.positions.any(axis=1)

    def contacts(self, env: Environment) -> int:
        """sum_{i in Lambda_N} 1{X_i = 0} omega_i"""
        return int((self.at_zero()[1:] & env.bits.astype(bool)).sum())

    def pinned_on_contact_set(self) -> bool:
        return bool(self.at_zero()[self.contact_set].all()) if len(self.contact_set) else True


@dataclass
class SampledPaths:
    """Result of sample_path: kept trajectories and per-sample contact counts"""
    contact_counts: np.ndarray
    n: int
    trajectories: List[Trajectory] = field(default_factory=list)

    @property
    def mean_contacts(self) -> float:
        return float(self.contact_counts.mean())

    @property
    def stderr_contacts(self) -> float:
        if len(self.contact_counts) < 2:
            return float('nan')
        return float(self.contact_counts.std(ddof=1) / np.sqrt(len(self.contact_counts)))

    @property
    def contact_fraction(self) -> float:
        return self.mean_contacts / self.n


class ContactSetSampler:
    """
    Draws pinned sets A with probability w^|A| P_0(X = 0 on A) / Z

    This class handles:
    - The law of the last pinned site, proportional to f_j (j = 0 means A empty)
    - The law of the predecessor of t_j, proportional to f_i p(t_j - t_i)

    Both are tabulated as cumulative distributions once per solution.
    """

    def __init__(self, solution: PinningSolution, table: Optional[ReturnProbTable] = None):
        self.solution = solution
        self.sites = solution.sites
        if table is None:
            table = return_probabilities(solution.instance.kernel, solution.n)
        log_f = solution.log_forward

        self.last_cdf = self._cdf(log_f)
        self.pred_cdfs = [None]
        for j in range(1, solution.m + 1):
            lags = self.sites[j] - self.sites[:j]
            self.pred_cdfs.append(self._cdf(log_f[:j] + table.log_p[lags]))

    @staticmethod
    def _cdf(log_weights: np.ndarray) -> np.ndarray:
        weights = np.exp(log_weights - np.max(log_weights))
        cdf = np.cumsum(weights)
        return cdf / cdf[-1]

    @staticmethod
    def _pick(cdf: np.ndarray, rng: np.random.Generator) -> int:
        return int(min(np.searchsorted(cdf, rng.random(), side='right'), len(cdf) - 1))

    def draw_indices(self, rng: np.random.Generator) -> List[int]:
        """Indices j of the pinned sites, increasing"""
        chosen = []
        j = self._pick(self.last_cdf, rng)
        while j > 0:
            chosen.append(j)
            j = self._pick(self.pred_cdfs[j], rng)
        return chosen[::-1]

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        """Pinned times t_j in increasing order"""
        return self.sites[self.draw_indices(rng)].astype(np.int64)


def sample_contact_set(solution: PinningSolution, rng: np.random.Generator,
                       table: Optional[ReturnProbTable] = None) -> np.ndarray:
    """
    Draw one pinned set A

    Args:
        solution: Solved instance
        rng: Random generator
        table: Return table (rebuilt when omitted)

    Returns:
        Increasing array of pinned times
    """
    return ContactSetSampler(solution, table).draw(rng)


def _bridge_coordinate(length: int, rng: np.random.Generator) -> np.ndarray:
    """One lazy coordinate conditioned on X_length = 0"""
    path = np.zeros(length + 1, dtype=np.int64)
    steps = (-1, 0, 1)
    step_probs = (0.25, 0.5, 0.25)
    x = 0
    for i in range(length):
        remaining = length - i
        weights = [
            prob * lazy_point_probability(remaining - 1, abs(x + step))
            for step, prob in zip(steps, step_probs)
        ]
        # Largest reachable step when u lands on the top edge
        step = max(s for s, weight in zip(steps, weights) if weight > 0)
        u = rng.random() * sum(weights)
        acc = 0.0
        for candidate, weight in zip(steps, weights):
            acc += weight
            if u < acc:
                step = candidate
                break
        x += step
        path[i + 1] = x
    return path


def sample_bridge(kernel: WalkKernel, length: int, rng: np.random.Generator) -> np.ndarray:
    """
    Walk from 0 back to 0 in exactly length steps

    Coordinates of the lazy walk are independent and the endpoint event
    factorizes, so each coordinate is sampled as its own bridge.

    Returns:
        Array of shape (length + 1, d), first and last rows zero
    """
    if length < 0:
        raise ValueError(f"Bridge length must be >= 0. Got: {length}")
    if not kernel.is_lazy:
        raise ValueError(f"Bridges are only available for the lazy walk. Got: {kernel.name}")
    if length == 0:
        return np.zeros((1, kernel.dimension), dtype=np.int64)
    coords = [_bridge_coordinate(length, rng) for _ in range(kernel.dimension)]
    return np.stack(coords, axis=1)


def sample_free_walk(kernel: WalkKernel, length: int, rng: np.random.Generator) -> np.ndarray:
    """Unconditioned walk from the origin, shape (length + 1, d)"""
    steps = rng.choice(kernel.steps, p=kernel.step_probs, size=(length, kernel.dimension))
    path = np.zeros((length + 1, kernel.dimension), dtype=np.int64)
    path[1:] = np.cumsum(steps, axis=0)
    return path


def assemble_trajectory(kernel: WalkKernel, n: int, contact_set: Sequence[int],
                        rng: np.random.Generator) -> Trajectory:
    """Bridges over the gaps of {0} u A followed by a free tail"""
    positions = np.zeros((n + 1, kernel.dimension), dtype=np.int64)
    previous = 0
    for t in contact_set:
        positions[previous:t + 1] = sample_bridge(kernel, int(t) - previous, rng)
        previous = int(t)
    positions[previous:] = sample_free_walk(kernel, n - previous, rng)
    return Trajectory(positions=positions, contact_set=np.asarray(contact_set, dtype=np.int64))


def sample_path(instance: PinningInstance, table: ReturnProbTable, n_samples: int,
                rng: np.random.Generator, solution: Optional[PinningSolution] = None,
                keep_trajectories: bool = True) -> SampledPaths:
    """
    Exact polymer paths

    Args:
        instance: Environment, kernel and eta
        table: Return probabilities up to N
        n_samples: Number of independent paths
        rng: Random generator, consumed sequentially
        solution: Pre-solved instance (solved here when omitted)
        keep_trajectories: Keep every path, or only the contact counts

    Returns:
        SampledPaths with per-sample contact counts and the empirical mean
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1. Got: {n_samples}")
    solution = solution or solve(instance, table)
    sampler = ContactSetSampler(solution, table)

    counts = np.empty(n_samples, dtype=np.int64)
    kept = []
    for s in range(n_samples):
        trajectory = assemble_trajectory(instance.kernel, instance.n, sampler.draw(rng), rng)
        counts[s] = trajectory.contacts(instance.env)
        if keep_trajectories:
            kept.append(trajectory)
    return SampledPaths(contact_counts=counts, n=instance.n, trajectories=kept)


def contacts_by_segment(trajectories: Sequence[Trajectory], env: Environment,
                        edges: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Mean contact fraction in each segment of the polymer

    Args:
        trajectories: Sampled paths
        env: Environment the paths were sampled in
        edges: 0-based segment boundaries over sites 1..N (default: thirds)

    Returns:
        Array with, per segment, mean contacts divided by the segment length
    """
    if not trajectories:
        raise ValueError("Need at least one trajectory")
    edges = list(edges) if edges is not None else list(block_edges(env.n))
    bits = env.bits.astype(bool)
    totals = np.zeros(len(edges) - 1)
    for trajectory in trajectories:
        hits = trajectory.at_zero()[1:] & bits
        for k in range(len(edges) - 1):
            totals[k] += hits[edges[k]:edges[k + 1]].sum()
    lengths = np.diff(edges).astype(float)
    return totals / len(trajectories) / np.maximum(lengths, 1.0)
