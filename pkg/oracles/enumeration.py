"""
🌙 Enumeration Oracles
Brute-force ground truth for the solver, the Psi sums and the interface expansion

Nothing here shares code with the quantities it checks: the polymer oracle
sums over every step sequence, the Psi oracles iterate over tuples, and the
interface oracle integrates the mixture measure by tensor quadrature.
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from termcolor import cprint

from configs.pinning_configs import CONFIG
from environments.environment import Environment, contact_sites, from_bits
from models.gff_pinning import GffInstance
from models.renewal_solver import PinningInstance, solve
from optimizers.psi_optimizer import GapVector
from walks.walk_kernel import ReturnProbTable, WalkKernel, make_lazy_walk, return_probabilities

LAZY_STEPS = np.array([-1, 0, 1], dtype=np.int64)
LAZY_PROBS = np.array([0.25, 0.5, 0.25])


@dataclass(frozen=True)
class OracleResult:
    """Z, mu_j = P(X_{t_j} = 0) and the expected contact count, by enumeration"""
    z: float
    contact_probs: np.ndarray
    expected_contacts: float


@lru_cache(maxsize=None)
def _step_table(depth: int, dim: int):
    """Every step sequence of the given depth: (count, depth, dim) steps and their probabilities"""
    per_coordinate = list(itertools.product(range(3), repeat=dim))
    choices = np.array(list(itertools.product(per_coordinate, repeat=depth)), dtype=np.int64)
    choices = choices.reshape(-1, depth, dim)
    steps = LAZY_STEPS[choices]
    probs = LAZY_PROBS[choices].prod(axis=(1, 2))
    return steps, probs


def _max_n(dim: int) -> int:
    return CONFIG['ORACLE_MAX_N_1D'] if dim == 1 else CONFIG['ORACLE_MAX_N_2D']


@lru_cache(maxsize=None)
def zero_pattern_law(n: int, dim: int) -> np.ndarray:
    """
    Law of the set of times i in 1..N with X_i = 0, as a bitmask (bit i-1)

    Step sequences are enumerated as a Python loop over prefixes and a numpy
    block over suffixes; every sequence carries its running position.

    Returns:
        Read-only array of length 2^N summing to 1
    """
    if dim not in (1, 2):
        raise ValueError(f"Only dimensions 1 and 2 are supported. Got: {dim}")
    if n < 1 or n > _max_n(dim):
        raise ValueError(f"Oracle needs 1 <= N <= {_max_n(dim)} in dimension {dim}. Got: {n}")

    cap = CONFIG['ORACLE_VECTOR_DEPTH_1D'] if dim == 1 else CONFIG['ORACLE_VECTOR_DEPTH_2D']
    depth = min(n, cap)
    prefix_len = n - depth
    suffix_steps, suffix_probs = _step_table(depth, dim)
    suffix_offsets = np.cumsum(suffix_steps, axis=1)
    suffix_bits = (1 << (prefix_len + np.arange(depth, dtype=np.int64)))

    law = np.zeros(1 << n)
    prefixes = itertools.product(itertools.product(range(3), repeat=dim), repeat=prefix_len)
    for prefix in prefixes:
        position = np.zeros(dim, dtype=np.int64)
        mask = 0
        prob = 1.0
        for i, step in enumerate(prefix):
            position = position + LAZY_STEPS[list(step)]
            prob *= float(LAZY_PROBS[list(step)].prod())
            if not position.any():
                mask |= 1 << i
        at_zero = ~(position + suffix_offsets).any(axis=2)
        masks = mask | (at_zero.astype(np.int64) @ suffix_bits)
        law += np.bincount(masks, weights=prob * suffix_probs, minlength=1 << n)
    law.flags.writeable = False
    return law


def _env_mask(env: Environment) -> int:
    return sum(1 << (int(t) - 1) for t in contact_sites(env).positions)


def _popcount(values: np.ndarray, width: int) -> np.ndarray:
    return sum((values >> b) & 1 for b in range(width))


def enumerate_polymer(env: Environment, kernel: WalkKernel, eta: float) -> OracleResult:
    """
    Z = E_0[exp(eta sum_{i <= N} 1{X_i = 0} omega_i)] over every step sequence

    Args:
        env: Segment environment with N <= 12 (N <= 8 in dimension 2)
        kernel: Lazy walk
        eta: Pinning strength

    Returns:
        OracleResult
    """
    if env.geometry != 'segment':
        raise ValueError(f"The polymer oracle needs a segment environment. Got: {env.geometry}")
    n = env.n
    law = zero_pattern_law(n, kernel.dimension)
    patterns = np.arange(1 << n, dtype=np.int64)
    omega = _env_mask(env)
    weights = law * np.exp(eta * _popcount(patterns & omega, n))
    z = float(weights.sum())

    sites = contact_sites(env).positions
    contact_probs = np.array([
        weights[((patterns >> (int(t) - 1)) & 1) == 1].sum() / z for t in sites
    ])
    return OracleResult(z=z, contact_probs=contact_probs, expected_contacts=float(contact_probs.sum()))


def _relative_error(value: float, reference: float) -> float:
    return abs(value - reference) / max(abs(reference), 1e-300)


def compare_with_solver(max_n: int, eta_grid: Sequence[float], dimensions: Sequence[int] = (1, 2),
                        verbose: bool = False) -> float:
    """
    Worst relative discrepancy between solver and enumeration

    Runs every one of the 2^N environments for N = 1..max_n, every eta and
    every dimension, comparing Z, each mu_j and the expected contact count.
    N above the 2-D oracle cap is skipped with a warning.
    """
    if max_n > 10:
        raise ValueError(f"max_n must be <= 10. Got: {max_n}")
    worst = 0.0
    for dim in dimensions:
        kernel = make_lazy_walk(dim)
        top = min(max_n, _max_n(dim))
        if top < max_n:
            cprint(f"⚠️ Dimension {dim}: oracle capped at N={top}, skipping N={top + 1}..{max_n}", "yellow")
        table = return_probabilities(kernel, top)
        for n in range(1, top + 1):
            for bits in itertools.product((0, 1), repeat=n):
                env = from_bits(bits)
                for eta in eta_grid:
                    exact = enumerate_polymer(env, kernel, eta)
                    solution = solve(PinningInstance(env=env, kernel=kernel, eta=eta), table)
                    errors = [
                        _relative_error(math.exp(solution.log_z), exact.z),
                        _relative_error(solution.expected_contacts, exact.expected_contacts) if env.ones else 0.0,
                    ]
                    errors += [
                        _relative_error(a, b) for a, b in zip(solution.contact_probs, exact.contact_probs)
                    ]
                    worst = max(worst, max(errors))
            if verbose:
                cprint(f"   ✓ d={dim} N={n}: worst relative error so far {worst:.3e}", "cyan")
    return worst


def decomposition_sum(env: Environment, kernel: WalkKernel, eta: float,
                      table: Optional[ReturnProbTable] = None) -> float:
    """sum over A subset Omega of w^|A| prod of gap return probabilities, by subset enumeration"""
    table = table or return_probabilities(kernel, env.n)
    sites = [int(t) for t in contact_sites(env).positions]
    if len(sites) > 20:
        raise ValueError(f"Subset enumeration needs m <= 20. Got: {len(sites)}")
    w = math.expm1(eta)
    total = 0.0
    for size in range(len(sites) + 1):
        for subset in itertools.combinations(sites, size):
            term = w ** size
            previous = 0
            for t in subset:
                term *= table.p[t - previous]
                previous = t
            total += term
    return total


def psi_by_tuples(g: GapVector, r: int) -> float:
    """psi summed tuple by tuple"""
    sites = [0.0] + list(np.cumsum(g.gaps))
    total = 0.0
    for ell in itertools.combinations(range(1, g.m + 1), r):
        term = 1.0
        previous = 0
        for index in ell:
            term /= sites[index] - sites[previous]
            previous = index
        total += term
    return total


def psi_per_by_tuples(g: GapVector, r: int) -> float:
    """psi_per summed tuple by tuple, with the wrap-around first factor"""
    sites = [0.0] + list(np.cumsum(g.gaps))
    total = 0.0
    for ell in itertools.combinations(range(1, g.m + 1), r):
        term = 1.0 / (g.budget - (sites[ell[-1]] - sites[ell[0]]))
        for previous, index in zip(ell[:-1], ell[1:]):
            term /= sites[index] - sites[previous]
        total += term
    return total


def gff_ratio_by_quadrature(instance: GffInstance, nodes: int = 40) -> float:
    """
    Z_eta/Z_0 for a lattice with at most 4 sites by tensor Gauss-Hermite quadrature

    With x = y/sqrt(2) the single-site factor exp(-2 x^2) becomes the Hermite
    weight; each reward site gets one extra node at 0 carrying the atom eta.
    The remaining integrand is exp(sum over interior edges of x_i x_j).
    """
    n = instance.n
    size = n * n
    if size > 4:
        raise ValueError(f"Quadrature oracle supports at most 4 sites. Got {size}")
    y, weights = np.polynomial.hermite.hermgauss(nodes)
    x_nodes = y / math.sqrt(2.0)
    w_nodes = weights / math.sqrt(2.0)

    edges = []
    for i in range(n):
        for j in range(n):
            here = i * n + j
            if i < n - 1:
                edges.append((here, here + n))
            if j < n - 1:
                edges.append((here, here + 1))

    bits = instance.env.bits.ravel()

    def integral(with_atoms: bool) -> float:
        axes_x, axes_w = [], []
        for site in range(size):
            if with_atoms and bits[site] and instance.eta > 0:
                axes_x.append(np.append(x_nodes, 0.0))
                axes_w.append(np.append(w_nodes, instance.eta))
            else:
                axes_x.append(x_nodes)
                axes_w.append(w_nodes)
        grids = np.meshgrid(*axes_x, indexing='ij')
        weight = np.ones_like(grids[0])
        for site_weights, axis in zip(axes_w, range(size)):
            shape = [1] * size
            shape[axis] = -1
            weight = weight * site_weights.reshape(shape)
        exponent = np.zeros_like(grids[0])
        for a, b in edges:
            exponent += grids[a] * grids[b]
        return float((weight * np.exp(exponent)).sum())

    return integral(True) / integral(False)
