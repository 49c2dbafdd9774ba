"""
🌙 Psi Optimizer
Gap-product sums over increasing r-tuples of reward sites and their periodized version

For gaps Delta_1..Delta_m with t_i = Delta_1 + ... + Delta_i and t_0 = 0:

    psi     = sum over 0 < l_1 < ... < l_r <= m of prod_i 1/(t_{l_i} - t_{l_{i-1}})
    psi_per = same sum, with the first factor replaced by the wrap-around gap
              1/(budget - (t_{l_r} - t_{l_1}))

Both are evaluated by a chain recursion over the strictly lower triangular
matrix of inverse site distances, batched over many gap vectors.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from configs.pinning_configs import CONFIG


@dataclass(frozen=True)
class GapVector:
    """
    Positive gaps Delta_1..Delta_m with sum <= budget

    When the sum equals the budget the vector is in periodized coordinates
    (Delta~_1 = budget - sum_{i>=2} Delta_i).
    """
    gaps: np.ndarray
    budget: float

    def __post_init__(self):
        gaps = np.asarray(self.gaps, dtype=np.float64)
        if gaps.ndim != 1 or len(gaps) < 1:
            raise ValueError("Gap vector must be a non-empty 1-D array")
        if not (gaps > 0).all():
            raise ValueError(f"All gaps must be > 0. Got min {gaps.min()}")
        if gaps.sum() > self.budget * (1 + 1e-12):
            raise ValueError(f"Gaps sum to {gaps.sum()}, above the budget {self.budget}")
        gaps.flags.writeable = False
        object.__setattr__(self, 'gaps', gaps)

    @property
    def m(self) -> int:
        return len(self.gaps)

    @property
    def sites(self) -> np.ndarray:
        """t_1..t_m"""
        return np.cumsum(self.gaps)

    def periodized(self) -> 'GapVector':
        """Replace Delta_1 so that the entries sum to the budget"""
        gaps = np.array(self.gaps)
        gaps[0] = self.budget - gaps[1:].sum()
        return GapVector(gaps=gaps, budget=self.budget)

    def distance_to_uniform(self) -> float:
        return float(np.max(np.abs(self.gaps - self.budget / self.m)))

    @classmethod
    def uniform(cls, m: int, budget: float) -> 'GapVector':
        return cls(gaps=np.full(m, budget / m), budget=budget)

    @classmethod
    def from_sites(cls, sites, n: int) -> 'GapVector':
        """Gaps of integer sites t_1 < ... < t_m in 1..N, budget N + 1"""
        sites = np.asarray(sites, dtype=np.float64)
        return cls(gaps=np.diff(np.concatenate([[0.0], sites])), budget=float(n + 1))


def _check_order(m: int, r: int, max_sites: Optional[int] = None):
    max_sites = max_sites or CONFIG['PSI_MAX_SITES']
    if m > max_sites:
        raise ValueError(f"m={m} is above the enumeration cap {max_sites}")
    if not 1 <= r <= m:
        raise ValueError(f"r must satisfy 1 <= r <= m={m}. Got: {r}")


def _inverse_distances(sites: np.ndarray) -> np.ndarray:
    """inv[..., j, i] = 1/(t_j - t_i) for i < j, zero elsewhere"""
    diff = sites[..., :, None] - sites[..., None, :]
    lower = np.tril(np.ones(diff.shape[-2:], dtype=bool), k=-1)
    inv = np.zeros_like(diff)
    np.divide(1.0, diff, out=inv, where=np.broadcast_to(lower, diff.shape))
    return inv


def psi_batch(gaps: np.ndarray, r: int) -> np.ndarray:
    """psi for every row of a (B, m) gap array"""
    gaps = np.atleast_2d(gaps)
    _check_order(gaps.shape[1], r)
    sites = np.cumsum(gaps, axis=1)
    inv = _inverse_distances(sites)
    chains = 1.0 / sites
    for _ in range(r - 1):
        chains = np.einsum('bji,bi->bj', inv, chains)
    return chains.sum(axis=1)


def psi_per_batch(gaps: np.ndarray, budget: float, r: int) -> np.ndarray:
    """psi_per for every row of a (B, m) gap array; Delta_1 is not used"""
    gaps = np.atleast_2d(gaps)
    m = gaps.shape[1]
    _check_order(m, r)
    sites = np.cumsum(gaps, axis=1)
    inv = _inverse_distances(sites)
    chains = np.linalg.matrix_power(inv, r - 1) if r > 1 else np.broadcast_to(np.eye(m), inv.shape)

    # chains[b, j, s]: weight of chains with r - 1 steps from l_1 = s to l_r = j
    wrap = budget - (sites[:, :, None] - sites[:, None, :])
    closing = np.tril(np.ones((m, m), dtype=bool))
    return np.where(closing, chains / wrap, 0.0).sum(axis=(1, 2))


def psi(g: GapVector, r: int) -> float:
    """Exact psi over all C(m, r) increasing tuples"""
    return float(psi_batch(g.gaps[None, :], r)[0])


def psi_per(g: GapVector, r: int) -> float:
    """Exact psi_per, invariant under cyclic shifts and reversal of the periodized gaps"""
    return float(psi_per_batch(g.gaps[None, :], g.budget, r)[0])


def random_gap_vectors(m: int, budget: float, count: int, rng: np.random.Generator,
                       slack: bool = False) -> np.ndarray:
    """
    Dirichlet(2) gap vectors scaled to the budget

    With slack, an (m+1)-th gap is drawn and dropped, so rows sum below the budget.
    """
    width = m + 1 if slack else m
    draws = rng.dirichlet(np.full(width, 2.0), size=count) * budget
    return draws[:, :m]


def check_convexity(m: int, r: int, budget: float, trials: int, rng: np.random.Generator,
                    function: str = 'psi_per', tolerance: Optional[float] = None) -> int:
    """
    Count midpoint-convexity violations on random pairs of the simplex

    A pair violates when f((g1 + g2)/2) > (f(g1) + f(g2))/2 + tol max(1, rhs).

    Args:
        m: Number of gaps, <= CONFIG['PSI_OPT_MAX_SITES']
        r: Tuple length
        budget: Simplex total
        trials: Number of random pairs
        rng: Random generator
        function: 'psi_per' or 'psi'

    Returns:
        Number of violations
    """
    if m > CONFIG['PSI_OPT_MAX_SITES']:
        raise ValueError(f"m={m} is above the optimization cap {CONFIG['PSI_OPT_MAX_SITES']}")
    if function not in ('psi', 'psi_per'):
        raise ValueError(f"function must be 'psi' or 'psi_per'. Got: {function}")
    tolerance = CONFIG['PSI_CONVEXITY_TOL'] if tolerance is None else tolerance

    first = random_gap_vectors(m, budget, trials, rng)
    second = random_gap_vectors(m, budget, trials, rng)
    mid = 0.5 * (first + second)
    if function == 'psi':
        values = [psi_batch(x, r) for x in (first, second, mid)]
    else:
        values = [psi_per_batch(x, budget, r) for x in (first, second, mid)]
    rhs = 0.5 * (values[0] + values[1])
    return int((values[2] > rhs + tolerance * np.maximum(1.0, rhs)).sum())


def project_onto_simplex(v: np.ndarray, total: float = 1.0) -> np.ndarray:
    """
    Euclidean projection onto {x >= 0, sum x = total}

    Sort-based: theta is fixed by the largest j with
    u_j - (sum_{i<=j} u_i - total)/j > 0 over the sorted entries u.
    """
    if total <= 0:
        raise ValueError(f"Simplex total must be > 0. Got: {total}")
    u = np.sort(v)[::-1]
    u_cumsum = np.cumsum(u)
    index = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - (u_cumsum - total) / index > 0)[0][-1]
    theta = (u_cumsum[rho] - total) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


class PsiPerObjective:
    """
    psi_per with its analytic gradient in all m periodized coordinates

    incidence[i, T, e] = 1 when entry e belongs to the i-th factor's gap in tuple T.
    Factor 0 is the wrap-around gap, made of entries l_r..m-1 and 0..l_1-1
    (0-based); factor i >= 1 covers entries l_{i-1}..l_i - 1.
    """

    def __init__(self, m: int, r: int):
        _check_order(m, r, CONFIG['PSI_OPT_MAX_SITES'])
        tuples = list(itertools.combinations(range(1, m + 1), r))
        incidence = np.zeros((r, len(tuples), m))
        for t, ell in enumerate(tuples):
            incidence[0, t, ell[-1]:] = 1.0
            incidence[0, t, :ell[0]] = 1.0
            for i in range(1, r):
                incidence[i, t, ell[i - 1]:ell[i]] = 1.0
        self.m = m
        self.r = r
        self.incidence = incidence

    def value(self, x: np.ndarray) -> float:
        denominators = self.incidence @ x
        return float(np.sum(1.0 / np.prod(denominators, axis=0)))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        denominators = self.incidence @ x
        terms = 1.0 / np.prod(denominators, axis=0)
        return -np.einsum('t,it,ite->e', terms, 1.0 / denominators, self.incidence)


def _project_with_floor(y: np.ndarray, budget: float, floor: float) -> np.ndarray:
    return floor + project_onto_simplex(y - floor, budget - len(y) * floor)


def minimize_psi_per(m: int, r: int, budget: float, tolerance: Optional[float] = None,
                     rng: Optional[np.random.Generator] = None, start: Optional[np.ndarray] = None,
                     max_iter: Optional[int] = None) -> GapVector:
    """
    Projected-gradient minimization of psi_per on the simplex

    Armijo backtracking from a doubled previous step; iterates are kept at
    least CONFIG['PSI_FLOOR_FRACTION'] * budget from the boundary.

    Args:
        m: Number of gaps, <= CONFIG['PSI_OPT_MAX_SITES']
        r: Tuple length, 2 <= r <= m (psi_per is constant for r = 1)
        budget: Simplex total
        tolerance: Required max distance to budget/m (default: CONFIG['VERIFY_MINIMIZER_TOL'])
        rng: Generator for the Dirichlet start when start is None
        start: Explicit starting point
        max_iter: Iteration cap (default: CONFIG['PSI_MAX_ITER'])

    Returns:
        GapVector at the minimizer
    """
    if r < 2:
        raise ValueError("psi_per is constant on the simplex for r = 1; there is no unique minimizer")
    if budget <= 0:
        raise ValueError(f"Budget must be > 0. Got: {budget}")
    tolerance = tolerance or CONFIG['VERIFY_MINIMIZER_TOL']
    max_iter = max_iter or CONFIG['PSI_MAX_ITER']
    sigma = CONFIG['PSI_ARMIJO_SIGMA']
    floor = CONFIG['PSI_FLOOR_FRACTION'] * budget
    objective = PsiPerObjective(m, r)

    if start is None:
        rng = rng if rng is not None else np.random.default_rng(CONFIG['SEED'])
        start = random_gap_vectors(m, budget, 1, rng)[0]
    x = _project_with_floor(np.asarray(start, dtype=np.float64), budget, floor)
    value = objective.value(x)
    grad = objective.gradient(x)
    step = 0.1 * budget / max(np.max(np.abs(grad)), 1e-300)

    accepted_step = step
    for _ in range(max_iter):
        step *= 2.0
        accepted = False
        for _ in range(80):
            candidate = _project_with_floor(x - step * grad, budget, floor)
            move = candidate - x
            candidate_value = objective.value(candidate)
            if candidate_value <= value + sigma * float(grad @ move):
                accepted = True
                break
            step *= 0.5
        if not accepted or np.max(np.abs(move)) <= 1e-15 * budget:
            break
        accepted_step = step
        x, value = candidate, candidate_value
        grad = objective.gradient(x)

    # Function values stop resolving progress near the minimum long before the
    # gradient does; finish with fixed short steps driven by the gradient alone.
    step = 0.5 * accepted_step
    last_move = np.inf
    for _ in range(max_iter):
        candidate = _project_with_floor(x - step * grad, budget, floor)
        move = float(np.max(np.abs(candidate - x)))
        if move <= 1e-15 * budget:
            break
        if move > last_move:
            step *= 0.5
        last_move = move
        x = candidate
        grad = objective.gradient(x)

    if not np.isfinite(x).all():
        raise FloatingPointError("Projected gradient produced non-finite iterates")
    result = GapVector(gaps=x, budget=budget)
    if result.distance_to_uniform() > tolerance:
        raise RuntimeError(
            f"Projected gradient stopped {result.distance_to_uniform():.3e} from uniform (m={m}, r={r})"
        )
    return result


def compare_psi_psiper(g: GapVector, r: int) -> Tuple[float, float, float]:
    """
    (psi(g), psi_per(periodized g), psi_per(uniform))

    For gaps summing to at most the budget the values are non-increasing.
    """
    return psi(g, r), psi_per(g.periodized(), r), psi_per(GapVector.uniform(g.m, g.budget), r)


def psi_per_uniform_lower_bound(m: int, r: int, k: int, budget: float) -> float:
    """
    (log K)^(r-1) / (Delta^(r-1) N) with Delta = budget/m and N = budget - 1

    Restricting to tuples whose index steps are all <= K leaves at least
    m - (r-1)K >= 2 first indices, each contributing a harmonic factor
    H_K >= log K per step; the wrap-around gap is at most N.
    """
    if k < 2:
        raise ValueError(f"K must be >= 2. Got: {k}")
    if r < 1 or m - (r - 1) * k < 2:
        raise ValueError(f"Infeasible combination m={m}, r={r}, K={k}: need m - (r-1)K >= 2")
    n = budget - 1.0
    if n < 1 or budget < m:
        raise ValueError(f"Budget {budget} must be >= max(m, 2)")
    spacing = budget / m
    return math.log(k) ** (r - 1) / (spacing ** (r - 1) * n)


def harmonic_log_margin(k_max: int) -> float:
    """min over 1 <= K <= k_max of H_K - log K (positive)"""
    k = np.arange(1, k_max + 1, dtype=np.float64)
    return float(np.min(np.cumsum(1.0 / k) - np.log(k)))


def jensen_gap_bound(t_sites, r: int, n: int, rng: Optional[np.random.Generator] = None,
                     max_tuples: Optional[int] = None) -> Tuple[float, float]:
    """
    Smallest prod_i (t_{l_i} - t_{l_{i-1}})^(-1/2) over r-tuples versus (r/N)^(r/2)

    All C(m, r) tuples are used when there are at most max_tuples of them,
    otherwise max_tuples sorted random tuples.

    Returns:
        (lhs_min, rhs)
    """
    sites = np.asarray(t_sites, dtype=np.float64)
    m = len(sites)
    if not 1 <= r <= m:
        raise ValueError(f"r must satisfy 1 <= r <= m={m}. Got: {r}")
    if (np.diff(sites) <= 0).any() or sites[0] <= 0 or sites[-1] > n:
        raise ValueError("Sites must be increasing and lie in 1..N")
    max_tuples = max_tuples or CONFIG['JENSEN_MAX_TUPLES']

    if math.comb(m, r) <= max_tuples:
        tuples = np.array(list(itertools.combinations(range(m), r)), dtype=np.int64)
    else:
        rng = rng if rng is not None else np.random.default_rng(CONFIG['SEED'])
        tuples = np.sort(np.array([rng.choice(m, size=r, replace=False) for _ in range(max_tuples)]), axis=1)

    chosen = sites[tuples]
    gaps = np.diff(np.concatenate([np.zeros((len(chosen), 1)), chosen], axis=1), axis=1)
    log_lhs = -0.5 * np.log(gaps).sum(axis=1)
    rhs = math.exp(-0.5 * r * math.log(n / r))
    return float(math.exp(log_lhs.min())), rhs


def perturbation_gap(m: int, r: int, budget: float, h: float) -> float:
    """psi_per(Delta + h, Delta - h, Delta, ...) - psi_per(Delta, ..., Delta)"""
    spacing = budget / m
    if abs(h) >= spacing:
        raise ValueError(f"|h| must be below the spacing {spacing}. Got: {h}")
    if m < 2:
        raise ValueError("Perturbation needs m >= 2")
    gaps = np.full(m, spacing)
    gaps[0] += h
    gaps[1] -= h
    return psi_per(GapVector(gaps=gaps, budget=budget), r) - psi_per(GapVector.uniform(m, budget), r)
