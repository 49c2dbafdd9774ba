"""
🌙 Renewal Solver
Exact partition function and contact probabilities of the diluted pinning polymer

Expanding exp(eta 1{X_i = 0}) = 1 + w 1{X_i = 0} with w = e^eta - 1 over the
reward sites turns Z into a sum over pinned sets A, and the Markov property
factors P_0(X = 0 on A) into return probabilities of the gaps. The forward
pass sums over the part of A before a site, the backward pass over the part
after it.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy.integrate import trapezoid
from scipy.special import logsumexp

from configs.pinning_configs import CONFIG
from environments.environment import Environment, contact_sites, density
from walks.walk_kernel import ReturnProbTable, WalkKernel, return_probabilities


@dataclass(frozen=True)
class PinningInstance:
    """Environment on the segment, reference walk and pinning strength eta >= 0"""
    env: Environment
    kernel: WalkKernel
    eta: float

    def __post_init__(self):
        if self.env.geometry != 'segment':
            raise ValueError(f"The polymer lives over a segment environment. Got: {self.env.geometry}")
        if not self.eta >= 0 or not math.isfinite(self.eta):
            raise ValueError(f"eta must be finite and >= 0. Got: {self.eta}")

    @property
    def n(self) -> int:
        return self.env.n

    @property
    def w(self) -> float:
        """e^eta - 1, inf once it leaves the float range"""
        return math.expm1(self.eta) if self.eta < 700 else math.inf

    @property
    def log_w(self) -> float:
        return self.eta + math.log(-math.expm1(-self.eta)) if self.eta > 0 else -math.inf

    def sites(self) -> np.ndarray:
        """t_0 = 0, t_1, ..., t_m"""
        return contact_sites(self.env).with_origin()


@dataclass(frozen=True)
class PinningSolution:
    """
    Solved instance

    forward_scaled / backward_scaled hold each f_j (B_j) divided by exp of its
    ledger entry, so log f_j = log forward_scaled[j] + forward_ledger[j].
    log_inner[j] is log F_j = log sum_{i<j} f_i p(t_j - t_i), j >= 1.
    """
    instance: PinningInstance
    sites: np.ndarray
    log_z: float
    log_z_backward: float
    forward_scaled: np.ndarray
    forward_ledger: np.ndarray
    backward_scaled: np.ndarray
    backward_ledger: np.ndarray
    log_inner: np.ndarray
    contact_probs: np.ndarray

    @property
    def m(self) -> int:
        return len(self.sites) - 1

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def log_forward(self) -> np.ndarray:
        with np.errstate(divide='ignore'):
            return np.log(self.forward_scaled) + self.forward_ledger

    @property
    def log_backward(self) -> np.ndarray:
        return np.log(self.backward_scaled) + self.backward_ledger

    @property
    def expected_contacts(self) -> float:
        return float(self.contact_probs.sum())

    @property
    def contact_fraction(self) -> float:
        return self.expected_contacts / self.n

    def pinned_marginals(self) -> np.ndarray:
        """P(t_j in A) = f_j B_j / Z for j = 1..m"""
        log_marg = self.log_forward[1:] + self.log_backward[1:] - self.log_z
        return np.exp(log_marg)

    def summary(self) -> dict:
        return {
            'N': self.n,
            'eta': self.instance.eta,
            'dim': self.instance.kernel.dimension,
            'density': density(self.instance.env),
            'logZ': self.log_z,
            'expected_contacts': self.expected_contacts,
            'contact_fraction': self.contact_fraction,
        }


def _forward_pass(sites: np.ndarray, p: np.ndarray, w: float, log_w: float, threshold: float):
    """
    f_0 = 1, f_j = w F_j with F_j = sum_{i<j} f_i p(t_j - t_i)

    A working copy of f shares one running log scale; it is divided through
    whenever a new entry exceeds the threshold. The factor w enters through
    log_w, so a large eta never overflows before the rescale.
    """
    m = len(sites) - 1
    log_threshold = math.log(threshold)
    work = np.zeros(m + 1)
    work[0] = 1.0
    running_scale = 0.0
    scaled = np.zeros(m + 1)
    ledger = np.zeros(m + 1)
    log_inner = np.full(m + 1, -np.inf)
    scaled[0] = 1.0

    for j in range(1, m + 1):
        inner = float(np.dot(work[:j], p[sites[j] - sites[:j]]))
        if inner > 0:
            log_inner[j] = math.log(inner) + running_scale
            log_value = math.log(inner) + log_w
        else:
            log_value = -math.inf
        if log_value > log_threshold:
            work[:j] *= math.exp(-log_value)
            running_scale += log_value
            value = 1.0
        else:
            value = w * inner if math.isfinite(w) else math.exp(log_value)
        work[j] = value
        scaled[j] = value
        ledger[j] = running_scale
    return scaled, ledger, log_inner


def _backward_pass(sites: np.ndarray, p: np.ndarray, w: float, log_w: float, threshold: float):
    """B_m = 1, B_j = 1 + w sum_{k>j} p(t_k - t_j) B_k, down to B_0 = Z"""
    m = len(sites) - 1
    log_threshold = math.log(threshold)
    work = np.zeros(m + 1)
    work[m] = 1.0
    running_scale = 0.0
    scaled = np.zeros(m + 1)
    ledger = np.zeros(m + 1)
    scaled[m] = 1.0

    for j in range(m - 1, -1, -1):
        tail = float(np.dot(work[j + 1:], p[sites[j + 1:] - sites[j]]))
        log_term = math.log(tail) + log_w if tail > 0 else -math.inf
        log_value = float(np.logaddexp(-running_scale, log_term))
        if log_value > log_threshold:
            work[j + 1:] *= math.exp(-log_value)
            running_scale += log_value
            value = 1.0
        else:
            value = math.exp(-running_scale) + w * tail if math.isfinite(w) else math.exp(log_value)
        work[j] = value
        scaled[j] = value
        ledger[j] = running_scale
    return scaled, ledger


def solve(instance: PinningInstance, table: ReturnProbTable,
          rescale_threshold: Optional[float] = None) -> PinningSolution:
    """
    Run the renewal DP

    Args:
        instance: Environment, kernel and eta
        table: Return probabilities covering times up to N
        rescale_threshold: Working-array rescale level (default: CONFIG['RESCALE_THRESHOLD'])

    Returns:
        PinningSolution with log Z, the scaled DP arrays and the contact probabilities
    """
    if table.dimension != instance.kernel.dimension:
        raise ValueError(f"Table dimension {table.dimension} does not match kernel dimension {instance.kernel.dimension}")
    if not table.covers(instance.n):
        raise ValueError(f"Return table covers times up to {table.max_time}, need {instance.n}")
    threshold = rescale_threshold or CONFIG['RESCALE_THRESHOLD']
    if threshold <= 1.0:
        raise ValueError(f"Rescale threshold must be > 1. Got: {threshold}")

    sites = instance.sites()
    w, log_w = instance.w, instance.log_w
    f_scaled, f_ledger, log_inner = _forward_pass(sites, table.p, w, log_w, threshold)
    b_scaled, b_ledger = _backward_pass(sites, table.p, w, log_w, threshold)

    with np.errstate(divide='ignore'):
        log_f = np.log(f_scaled) + f_ledger
    log_b = np.log(b_scaled) + b_ledger
    log_z = float(logsumexp(log_f))
    log_z_backward = float(log_b[0])

    log_mu = log_inner[1:] + instance.eta + log_b[1:] - log_z
    contact_probs = np.exp(log_mu)

    if not math.isfinite(log_z) or np.isnan(contact_probs).any():
        raise FloatingPointError(
            f"Renewal DP produced non-finite values (N={instance.n}, eta={instance.eta}, logZ={log_z})"
        )
    contact_probs = np.clip(contact_probs, 0.0, 1.0)

    return PinningSolution(
        instance=instance,
        sites=sites,
        log_z=log_z,
        log_z_backward=log_z_backward,
        forward_scaled=f_scaled,
        forward_ledger=f_ledger,
        backward_scaled=b_scaled,
        backward_ledger=b_ledger,
        log_inner=log_inner,
        contact_probs=contact_probs,
    )


def solve_env(env: Environment, kernel: WalkKernel, eta: float,
              table: Optional[ReturnProbTable] = None) -> PinningSolution:
    """Convenience wrapper building the return table when none is given"""
    table = table or return_probabilities(kernel, env.n)
    return solve(PinningInstance(env=env, kernel=kernel, eta=eta), table)


def contact_fraction(solution: PinningSolution) -> float:
    """E[sum_i 1{X_i = 0} omega_i] / N"""
    return solution.contact_fraction


def expected_contacts_curve(env: Environment, kernel: WalkKernel, eta_grid: Sequence[float],
                            table: Optional[ReturnProbTable] = None) -> np.ndarray:
    """Expected contact count at every eta of the grid"""
    table = table or return_probabilities(kernel, env.n)
    return np.array([
        solve(PinningInstance(env=env, kernel=kernel, eta=float(eta)), table).expected_contacts
        for eta in eta_grid
    ])


def free_energy_integral_check(env: Environment, kernel: WalkKernel, eta_max: float,
                               grid_points: int, table: Optional[ReturnProbTable] = None) -> float:
    """
    |log Z(eta_max) - integral_0^eta_max E_eta[contacts] d eta|

    The integral is the composite trapezoid rule on a uniform grid, so the
    residual shrinks like grid_points^-2.

    Args:
        env: Segment environment
        kernel: Reference walk
        eta_max: Upper end of the integral
        grid_points: Number of nodes, >= 2

    Returns:
        Absolute residual
    """
    if grid_points < 2:
        raise ValueError(f"grid_points must be >= 2. Got: {grid_points}")
    if eta_max < 0:
        raise ValueError(f"eta_max must be >= 0. Got: {eta_max}")
    table = table or return_probabilities(kernel, env.n)
    if env.ones == 0:
        return 0.0

    grid = np.linspace(0.0, eta_max, grid_points)
    curve = expected_contacts_curve(env, kernel, grid, table)
    integral = float(trapezoid(curve, grid))
    log_z = solve(PinningInstance(env=env, kernel=kernel, eta=eta_max), table).log_z
    return abs(log_z - integral)


def theorem1_lower_bound(delta: float, eta: float, n: int, m: int, r: int, k: int,
                         clt_c: float) -> Tuple[float, float]:
    """
    Explicit lower bounds on log Z in 1+1 and 1+2 dimensions

    1+1: r log(K c w sqrt(r/N))
    1+2: log of (c w)^r (log K)^(r-1) / (Delta^(r-1) N), Delta = (N+1)/m

    clt_c must satisfy p_k >= c k^(-d/2) for every k >= 1 in the dimension the
    bound is read for (see walk_kernel.local_clt_lower_constant).

    Args:
        delta: Density level with m > delta N
        eta: Pinning strength
        n: Polymer length N
        m: Number of reward sites
        r: Number of chosen sites, r = m / K
        k: Window length K
        clt_c: Local CLT constant

    Returns:
        (bound_1d, bound_2d) in log form; -inf when the bound is trivial
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must be in (0, 1]. Got: {delta}")
    if eta < 0:
        raise ValueError(f"eta must be >= 0. Got: {eta}")
    if n < 1 or m < 1 or r < 1 or k < 1:
        raise ValueError(f"N, m, r and K must be >= 1. Got N={n}, m={m}, r={r}, K={k}")
    if r * k != m:
        raise ValueError(f"r = m/K must be an integer with r K = m. Got m={m}, K={k}, r={r}")
    if m <= delta * n:
        raise ValueError(f"Need m > delta N. Got m={m}, delta N={delta * n}")
    if clt_c <= 0:
        raise ValueError(f"clt_c must be > 0. Got: {clt_c}")

    w = math.expm1(eta)
    if w <= 0:
        return -math.inf, -math.inf
    log_cw = math.log(clt_c) + math.log(w)

    bound_1d = r * (math.log(k) + log_cw + 0.5 * (math.log(r) - math.log(n)))

    if r == 1:
        bound_2d = log_cw - math.log(n)
    elif k == 1:
        bound_2d = -math.inf
    else:
        spacing = (n + 1) / m
        bound_2d = (r * log_cw + (r - 1) * math.log(math.log(k))
                    - (r - 1) * math.log(spacing) - math.log(n))
    return bound_1d, bound_2d


def log_partition_mp(instance: PinningInstance, dps: Optional[int] = None) -> float:
    """
    log Z recomputed in mpmath arithmetic

    The return probabilities are rebuilt from the exact recurrence at the same
    working precision, so nothing is shared with the float DP.
    """
    dps = dps or CONFIG['EXTENDED_PRECISION_DPS']
    sites = [int(t) for t in instance.sites()]
    dim = instance.kernel.dimension

    with mpmath.workdps(dps):
        p = [mpmath.mpf(1)]
        for k in range(instance.n):
            p.append(p[-1] * mpmath.mpf(2 * k + 1) / mpmath.mpf(2 * k + 2))
        p = [value ** dim for value in p]

        w = mpmath.expm1(mpmath.mpf(instance.eta))
        f = [mpmath.mpf(1)]
        for j in range(1, len(sites)):
            inner = mpmath.fsum(f[i] * p[sites[j] - sites[i]] for i in range(j))
            f.append(w * inner)
        return float(mpmath.log(mpmath.fsum(f)))


def contact_set_size_distribution(solution: PinningSolution,
                                  max_sites: Optional[int] = None) -> np.ndarray:
    """
    Exact law of |A| under the pinned-set measure

    g[j, s] is the weight of chains with s sites ending at t_j, built in log
    space. Cost O(m^3).

    Returns:
        Array law[s] = P(|A| = s), s = 0..m
    """
    max_sites = max_sites or CONFIG['SIZE_LAW_MAX_SITES']
    m = solution.m
    if m > max_sites:
        raise ValueError(f"Size law needs m <= {max_sites}. Got m={m}")
    log_p = return_probabilities(solution.instance.kernel, solution.n).log_p
    log_w = solution.instance.log_w
    sites = solution.sites

    log_g = np.full((m + 1, m + 1), -np.inf)
    log_g[0, 0] = 0.0
    with np.errstate(divide='ignore', invalid='ignore'):
        for j in range(1, m + 1):
            lags = log_p[sites[j] - sites[:j]]
            log_g[j, 1:] = log_w + logsumexp(log_g[:j, :-1] + lags[:, None], axis=0)
        law = np.exp(logsumexp(log_g, axis=0) - solution.log_z)
    return law / law.sum()
