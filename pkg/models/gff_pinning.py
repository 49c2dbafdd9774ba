"""
🌙 GFF Pinning
Gaussian interface on {1..N}^2 with zero boundary and delta-pinning on reward sites

The reference measure is exp(-1/2 X^T Q X) prod_i (dX_i + eta omega_i delta_0(dX_i))
with Q = 4 on the diagonal and -1 between lattice neighbours, so every site
sees four unit springs and the outside of the box is held at 0.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import logsumexp
from termcolor import cprint

from configs.pinning_configs import CONFIG
from environments.cell_analysis import analyze_cells
from environments.environment import Environment

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class GffInstance:
    """Square environment and pinning strength; V(x) = x^2/2, zero boundary"""
    env: Environment
    eta: float

    def __post_init__(self):
        if self.env.geometry != 'square':
            raise ValueError(f"The interface needs a square environment. Got: {self.env.geometry}")
        if not self.eta >= 0 or not math.isfinite(self.eta):
            raise ValueError(f"eta must be finite and >= 0. Got: {self.eta}")

    @property
    def n(self) -> int:
        return self.env.n

    def pinnable_indices(self) -> np.ndarray:
        """Raster indices i N + j (0-based) of the reward sites"""
        return np.flatnonzero(self.env.bits.ravel())


@dataclass
class GffState:
    """
    Heights and pinned sets of a batch of independent chains

    heights and pinned have shape (chains, N, N); X = 0 exactly on the pinned sites.
    """
    heights: np.ndarray
    pinned: np.ndarray

    @classmethod
    def flat(cls, instance: GffInstance, chains: int = 1) -> 'GffState':
        shape = (chains, instance.n, instance.n)
        return cls(heights=np.zeros(shape), pinned=np.zeros(shape, dtype=bool))

    @property
    def chains(self) -> int:
        return int(self.heights.shape[0])

    def is_consistent(self, instance: GffInstance) -> bool:
        """X = 0 on A and A inside the reward sites, for every chain"""
        zero_on_pinned = bool((self.heights[self.pinned] == 0.0).all())
        inside = bool((~self.pinned | instance.env.bits.astype(bool)[None]).all())
        return zero_on_pinned and inside

    def pinned_fraction(self) -> np.ndarray:
        """|A| / N^2 per chain"""
        return self.pinned.reshape(self.chains, -1).mean(axis=1)


def pin_probability(eta: float, neighbour_sum) -> np.ndarray:
    """atom/(1 + atom) with atom = eta sqrt(2/pi) exp(-s^2/8)"""
    atom = eta * SQRT_2_OVER_PI * np.exp(-np.square(neighbour_sum) / 8.0)
    return atom / (1.0 + atom)


def gibbs_sweep(instance: GffInstance, state: GffState, rng: np.random.Generator) -> GffState:
    """
    One systematic raster-order heat-bath sweep, updated in place

    At a site with neighbour sum s the continuous part is N(s/4, 1/4); a
    reward site is pinned with probability pin_probability(eta, s). The random
    numbers of the sweep are drawn up front, uniforms before normals.
    """
    n = instance.n
    heights, pinned = state.heights, state.pinned
    uniforms = rng.random(heights.shape)
    normals = rng.standard_normal(heights.shape)
    bits = instance.env.bits
    eta = instance.eta

    for i in range(n):
        for j in range(n):
            s = np.zeros(state.chains)
            if i > 0:
                s += heights[:, i - 1, j]
            if i < n - 1:
                s += heights[:, i + 1, j]
            if j > 0:
                s += heights[:, i, j - 1]
            if j < n - 1:
                s += heights[:, i, j + 1]

            if bits[i, j] and eta > 0:
                pin = uniforms[:, i, j] < pin_probability(eta, s)
            else:
                pin = np.zeros(state.chains, dtype=bool)
            heights[:, i, j] = np.where(pin, 0.0, 0.25 * s + 0.5 * normals[:, i, j])
            pinned[:, i, j] = pin
    return state


def batch_means_stderr(series: np.ndarray, batches: int) -> float:
    """Standard error of the mean of a time series by non-overlapping batch means"""
    batches = min(batches, len(series))
    if batches < 2:
        return float('nan')
    usable = len(series) - len(series) % batches
    means = series[:usable].reshape(batches, -1).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(batches))


def run_chain(instance: GffInstance, sweeps: int, burnin: int, rng: np.random.Generator,
              chains: int = 1, record_sets: bool = False):
    """
    Run chains from the flat state and record every post-burn-in sweep

    Returns:
        (final state, per-sweep pinned fraction averaged over chains,
         recorded pinned-set bitmasks of shape (sweeps - burnin, chains) or None)
    """
    if sweeps <= burnin:
        raise ValueError(f"sweeps must exceed burnin. Got sweeps={sweeps}, burnin={burnin}")
    if instance.n > CONFIG['GFF_MAX_CHAIN_SIDE']:
        raise ValueError(f"N={instance.n} is above the sampler cap {CONFIG['GFF_MAX_CHAIN_SIDE']}")
    state = GffState.flat(instance, chains)
    sites = instance.pinnable_indices()
    if record_sets and len(sites) > 62:
        raise ValueError(f"Pinned-set recording supports at most 62 reward sites. Got {len(sites)}")
    powers = (1 << np.arange(len(sites), dtype=np.int64))

    fractions = np.empty(sweeps - burnin)
    masks = np.empty((sweeps - burnin, chains), dtype=np.int64) if record_sets else None
    for sweep in range(sweeps):
        gibbs_sweep(instance, state, rng)
        if sweep >= burnin:
            fractions[sweep - burnin] = state.pinned_fraction().mean()
            if record_sets:
                flat = state.pinned.reshape(chains, -1)[:, sites]
                masks[sweep - burnin] = flat.astype(np.int64) @ powers
    return state, fractions, masks


def pinned_fraction_estimate(instance: GffInstance, sweeps: int, burnin: int,
                             rng: np.random.Generator, chains: int = 1) -> Tuple[float, float]:
    """
    Time average of |A|/N^2 after burn-in

    Args:
        instance: Interface instance
        sweeps: Sweeps per chain, including burn-in
        burnin: Discarded sweeps
        rng: Random generator
        chains: Independent chains advanced together

    Returns:
        (mean, batch-means standard error)
    """
    if instance.eta == 0 or instance.env.ones == 0:
        return 0.0, 0.0
    _, fractions, _ = run_chain(instance, sweeps, burnin, rng, chains)
    return float(fractions.mean()), batch_means_stderr(fractions, CONFIG['GFF_BATCHES'])


@dataclass(frozen=True)
class PinnedSetLaw:
    """
    Law of the pinned set indexed by bitmask over the reward sites (raster order)

    mc_error is half the sum over sets of the batch-means standard errors, the
    scale of the expected total-variation error. It is 0 for exact laws.
    """
    probs: np.ndarray
    mc_error: float = 0.0
    samples: int = 0

    def total_variation(self, other: 'PinnedSetLaw') -> float:
        return 0.5 * float(np.abs(self.probs - other.probs).sum())


def pinned_set_law(instance: GffInstance, sweeps: int, burnin: int, rng: np.random.Generator,
                   chains: int = 1) -> PinnedSetLaw:
    """Empirical law of A from the chain, with a batch-means error for total variation"""
    k = len(instance.pinnable_indices())
    if k > CONFIG['GFF_MAX_PINNABLE']:
        raise ValueError(f"Too many reward sites for a set law: {k} > {CONFIG['GFF_MAX_PINNABLE']}")
    _, _, masks = run_chain(instance, sweeps, burnin, rng, chains, record_sets=True)
    states = 1 << k
    probs = np.bincount(masks.ravel(), minlength=states) / masks.size

    batches = min(CONFIG['GFF_BATCHES'], len(masks))
    usable = len(masks) - len(masks) % batches
    batch_probs = np.stack([
        np.bincount(block.ravel(), minlength=states) / block.size
        for block in np.split(masks[:usable], batches)
    ])
    stderr = batch_probs.std(axis=0, ddof=1) / math.sqrt(batches)
    return PinnedSetLaw(probs=probs, mc_error=0.5 * float(stderr.sum()), samples=int(masks.size))


def precision_matrix(n: int, removed: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Zero-boundary precision matrix on {1..N}^2 in raster order

    Rows and columns in removed (raster indices) are deleted, which is the
    precision of the field with those sites held at 0.
    """
    size = n * n
    q = 4.0 * np.eye(size)
    for i in range(n):
        for j in range(n):
            here = i * n + j
            if i < n - 1:
                q[here, here + n] = q[here + n, here] = -1.0
            if j < n - 1:
                q[here, here + 1] = q[here + 1, here] = -1.0
    if removed is not None and len(removed):
        keep = np.setdiff1d(np.arange(size), removed)
        q = q[np.ix_(keep, keep)]
    return q


def _log_det_batch(matrices: np.ndarray) -> np.ndarray:
    """log det of a stack of positive definite matrices via Cholesky"""
    if matrices.shape[-1] == 0:
        return np.zeros(matrices.shape[0])
    chol = np.linalg.cholesky(matrices)
    return 2.0 * np.log(np.diagonal(chol, axis1=-2, axis2=-1)).sum(axis=-1)


@dataclass(frozen=True)
class ExpansionResult:
    """Exact pinned-set expansion of Z_eta / Z_0 on a small lattice"""
    log_ratio: float
    expected_size: float
    size_law: np.ndarray
    set_law: PinnedSetLaw
    log_weights: np.ndarray


def exact_expansion_small(instance: GffInstance) -> ExpansionResult:
    """
    Z_eta/Z_0 = sum_{A subset Omega} eta^|A| Z_{Lambda minus A, 0}/Z_{Lambda, 0}

    Each ratio is (2 pi)^(-|A|/2) (det Q_{Lambda minus A}/det Q_Lambda)^(-1/2),
    with all principal submatrices of one size factored in a single batch.

    Returns:
        ExpansionResult; log_weights[mask] is the log weight of the set with that bitmask
    """
    sites = instance.pinnable_indices()
    k = len(sites)
    if k > CONFIG['GFF_MAX_PINNABLE']:
        raise ValueError(f"Too many reward sites to enumerate: {k} > {CONFIG['GFF_MAX_PINNABLE']}")

    q = precision_matrix(instance.n)
    size = q.shape[0]
    log_det_full = _log_det_batch(q[None])[0]
    log_eta = math.log(instance.eta) if instance.eta > 0 else -math.inf

    log_weights = np.full(1 << k, -np.inf)
    log_weights[0] = 0.0
    for count in range(1, k + 1):
        if log_eta == -math.inf:
            break
        subsets = list(itertools.combinations(range(k), count))
        keeps = [np.setdiff1d(np.arange(size), sites[list(subset)]) for subset in subsets]
        stack = np.stack([q[np.ix_(keep, keep)] for keep in keeps])
        log_dets = _log_det_batch(stack)
        masks = [sum(1 << b for b in subset) for subset in subsets]
        log_weights[masks] = (count * log_eta - 0.5 * count * math.log(2.0 * math.pi)
                              - 0.5 * (log_dets - log_det_full))

    log_ratio = float(logsumexp(log_weights))
    probs = np.exp(log_weights - log_ratio)
    sizes = np.array([bin(mask).count('1') for mask in range(1 << k)])
    size_law = np.bincount(sizes, weights=probs, minlength=k + 1)
    return ExpansionResult(
        log_ratio=log_ratio,
        expected_size=float(sizes @ probs),
        size_law=size_law,
        set_law=PinnedSetLaw(probs=probs),
        log_weights=log_weights,
    )


def site_variances(n: int) -> np.ndarray:
    """
    Var(X_t) of the zero-boundary field on the box, shape (N, N)

    The precision 4I - A is diagonal in the product sine basis
    phi_k(i) = sqrt(2/(N+1)) sin(pi k i/(N+1)) with eigenvalues
    4 - 2cos(pi k/(N+1)) - 2cos(pi l/(N+1)), so the diagonal of its inverse
    is a pair of matrix products.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"Box side must be a positive integer. Got: {n}")
    angles = np.pi * np.arange(1, n + 1) / (n + 1)
    phi_sq = (2.0 / (n + 1)) * np.sin(np.outer(np.arange(1, n + 1), angles)) ** 2
    inverse_eigen = 1.0 / (4.0 - 2.0 * np.cos(angles)[:, None] - 2.0 * np.cos(angles)[None, :])
    return phi_sq @ inverse_eigen @ phi_sq.T


def boundary_distance(n: int) -> np.ndarray:
    """d(t, complement of the box) = min(i, j, N+1-i, N+1-j), 1-based sites"""
    idx = np.arange(1, n + 1)
    along = np.minimum(idx, n + 1 - idx)
    return np.minimum(along[:, None], along[None, :])


def ratio_bound_check(n: int, site: Tuple[int, int]) -> Tuple[float, float]:
    """
    Single-site ratio Z_{B minus t}/Z_B against sqrt(log(1 + d(t, B^c)))

    By Cramer's rule det Q_{B minus t}/det Q_B = Var(X_t), so the ratio is
    1/sqrt(2 pi Var(X_t)).

    Args:
        n: Box side
        site: 1-based (i, j)

    Returns:
        (ratio, sqrt(log(1 + d)))
    """
    i, j = site
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"Site {site} is outside the box of side {n}")
    variance = site_variances(n)[i - 1, j - 1]
    distance = boundary_distance(n)[i - 1, j - 1]
    return 1.0 / math.sqrt(2.0 * math.pi * variance), math.sqrt(math.log1p(distance))


def empirical_ratio_constant(n: int) -> float:
    """Largest c with ratio >= c / sqrt(log(1 + d)) at every site of the box"""
    ratios = 1.0 / np.sqrt(2.0 * np.pi * site_variances(n))
    return float(np.min(ratios * np.sqrt(np.log1p(boundary_distance(n)))))


def good_region_pinning_bound(instance: GffInstance, cell_side: int, rho: float,
                              zeta: float) -> float:
    """
    Explicit lower bound on log(Z_eta/Z_0) from one pinned site per good cell

    Only sets A with exactly one site in each good cell of each good row are
    kept. Pinning the sites one at a time, each factor Z_{B minus t}/Z_B is at
    least the same ratio in the full box (the variance only shrinks as sites
    get pinned), hence at least c/sqrt(log(1 + D)) with c the box constant and
    D >= d(t, box complement). D is the larger of the distance to the next good
    cell of the row (or the right side) and the cell's farthest distance to
    the box boundary. Summing over the site choices factorizes by cell.

    Returns:
        log(1 + exp(S)), S the log mass of the restricted class; 0 when empty
    """
    analysis = analyze_cells(instance.env, cell_side, rho, zeta)
    if instance.eta == 0 or not analysis.good_rows.any():
        if instance.eta > 0 and instance.env.ones > 0:
            cprint("⚠️ No good rows: the good-region bound degenerates to 0", "yellow")
        return 0.0

    n = instance.n
    k = cell_side
    cells = n // k
    c = empirical_ratio_constant(n)
    distance = boundary_distance(n)
    log_eta = math.log(instance.eta)

    total = 0.0
    for row in np.flatnonzero(analysis.good_rows):
        columns = analysis.good_cells_in_row(row)
        for position, col in enumerate(columns):
            if position + 1 < len(columns):
                reach = (columns[position + 1] - col + 2) * k - 2
            else:
                reach = (cells - col) * k
            cell_depth = int(distance[row * k:(row + 1) * k, col * k:(col + 1) * k].max())
            far = max(reach, cell_depth)
            count = int(analysis.cell_counts[row, col])
            total += log_eta + math.log(count) + math.log(c) - 0.5 * math.log(math.log1p(far))
    return float(np.logaddexp(0.0, total))

