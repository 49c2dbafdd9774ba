"""
🌙 Verify Experiment
Property suites for the solver, the sampler, the psi functions and the interface

Each suite returns {'suite', 'passed', 'metrics'}; the suites are independent
and run as tasks of one pool.
"""

import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from termcolor import cprint

from environments.cell_analysis import counting_bounds_hold
from environments.environment import contact_sites, from_bits, gen_bernoulli, gen_periodic
from models.gff_pinning import (
    GffInstance,
    empirical_ratio_constant,
    exact_expansion_small,
    good_region_pinning_bound,
    pinned_set_law,
)
from models.renewal_solver import (
    PinningInstance,
    expected_contacts_curve,
    free_energy_integral_check,
    log_partition_mp,
    solve,
    theorem1_lower_bound,
)
from optimizers.psi_optimizer import (
    GapVector,
    check_convexity,
    compare_psi_psiper,
    jensen_gap_bound,
    minimize_psi_per,
    perturbation_gap,
    random_gap_vectors,
)
from oracles.enumeration import compare_with_solver, decomposition_sum, enumerate_polymer, gff_ratio_by_quadrature
from samplers.path_sampler import sample_bridge, sample_path
from samplers.rng import make_rng
from walks.walk_kernel import (
    local_clt_lower_constant,
    make_lazy_walk,
    point_probability,
    return_probabilities,
)

from .base_experiment import BaseExperiment

PSI_BUDGET = 101.0
CHAIN_RTOL = 1e-12


def _result(suite: str, passed: bool, metrics: Dict) -> Dict:
    return {'suite': suite, 'passed': bool(passed), 'metrics': metrics}


def suite_dp_oracle(config: Dict, seed: int) -> Dict:
    """Solver against path enumeration, subset enumeration and mpmath"""
    worst = compare_with_solver(config['VERIFY_ORACLE_MAX_N'], config['VERIFY_ORACLE_ETAS'], (1, 2))

    kernel = make_lazy_walk(1)
    env = gen_bernoulli(10, density=0.5, seed=seed)
    exact = enumerate_polymer(env, kernel, 1.0)
    decomposition_error = abs(decomposition_sum(env, kernel, 1.0) - exact.z) / exact.z

    normalization = abs(enumerate_polymer(gen_bernoulli(8, density=0.5, seed=seed), kernel, 0.0).z - 1.0)

    big = gen_bernoulli(400, density=0.5, seed=seed)
    instance = PinningInstance(env=big, kernel=kernel, eta=1.0)
    log_z = solve(instance, return_probabilities(kernel, big.n)).log_z
    log_z_mp = log_partition_mp(instance)
    mp_error = abs(log_z - log_z_mp) / abs(log_z_mp)

    tol = config['VERIFY_ORACLE_TOL']
    passed = worst <= tol and decomposition_error <= 1e-12 and normalization <= 1e-12 and mp_error <= tol
    return _result('dp-oracle', passed, {
        'worst_relative_error': worst,
        'decomposition_error': decomposition_error,
        'normalization_error': normalization,
        'extended_precision_error': mp_error,
        'tolerance': tol,
    })


def suite_identity(config: Dict, seed: int) -> Dict:
    """log Z as the eta-integral of the expected contact count"""
    kernel = make_lazy_walk(1)
    env = gen_periodic(200, 'segment', 4)
    table = return_probabilities(kernel, env.n)
    nodes = config['VERIFY_IDENTITY_NODES']
    residuals = [free_energy_integral_check(env, kernel, 2.0, points, table)
                 for points in (nodes // 4, nodes // 2, nodes)]
    curve = expected_contacts_curve(env, kernel, np.linspace(0.0, 2.0, 21), table)
    increasing = bool((np.diff(curve) > 0).all())
    shrink = residuals[0] / max(residuals[-1], 1e-300)

    passed = residuals[-1] <= config['VERIFY_IDENTITY_TOL'] and shrink >= 4.0 and increasing
    return _result('identity', passed, {
        'nodes': nodes,
        'residual': residuals[-1],
        'residuals': residuals,
        'shrink_factor': shrink,
        'expected_contacts_increasing': increasing,
    })


def suite_psi(config: Dict, seed: int) -> Dict:
    """Convexity, equal-spacing minimizer, psi >= psi_per >= uniform and the Jensen bound"""
    rng = make_rng(seed, 'psi')

    violations = 0
    for m in range(2, 9):
        for r in range(1, min(m, 4) + 1):
            violations += check_convexity(m, r, PSI_BUDGET, config['VERIFY_CONVEXITY_TRIALS'], rng)

    worst_distance = 0.0
    failed_starts = 0
    for m in range(2, 7):
        for r in range(2, min(m, 4) + 1):
            for _ in range(config['VERIFY_MINIMIZER_STARTS']):
                try:
                    found = minimize_psi_per(m, r, PSI_BUDGET, rng=rng)
                    worst_distance = max(worst_distance, found.distance_to_uniform())
                except RuntimeError:
                    failed_starts += 1

    chain_violations = 0
    for m in range(2, 9):
        for r in range(1, min(m, 4) + 1):
            for gaps in random_gap_vectors(m, PSI_BUDGET, config['VERIFY_CHAIN_VECTORS'], rng, slack=True):
                full, periodic, uniform = compare_psi_psiper(GapVector(gaps=gaps, budget=PSI_BUDGET), r)
                if full < periodic * (1 - CHAIN_RTOL) or periodic < uniform * (1 - CHAIN_RTOL):
                    chain_violations += 1

    jensen_violations = 0
    n = 40
    for m in range(1, 13):
        sites = np.sort(rng.choice(np.arange(1, n + 1), size=m, replace=False))
        for r in range(1, m + 1):
            lhs, rhs = jensen_gap_bound(sites, r, n)
            if lhs < rhs * (1 - CHAIN_RTOL):
                jensen_violations += 1

    perturbation_ok = all(
        perturbation_gap(m, r, PSI_BUDGET, h) > 0
        for m in range(3, 7) for r in range(2, m) for h in (1e-2, -1e-2, 1.0)
    )

    passed = (violations == 0 and failed_starts == 0 and chain_violations == 0
              and jensen_violations == 0 and perturbation_ok
              and worst_distance <= config['VERIFY_MINIMIZER_TOL'])
    return _result('psi', passed, {
        'convexity_violations': violations,
        'minimizer_worst_distance': worst_distance,
        'minimizer_failed_starts': failed_starts,
        'chain_violations': chain_violations,
        'jensen_violations': jensen_violations,
        'perturbation_positive': perturbation_ok,
    })


def suite_gff(config: Dict, seed: int) -> Dict:
    """Gibbs law against the exact expansion, eta-derivative identity and the ratio constant"""
    instance = GffInstance(env=from_bits(np.ones((3, 3), dtype=np.uint8)), eta=2.0)
    chains = config['GFF_CHAINS']
    burnin = config['VERIFY_GFF_BURNIN']
    sweeps = max(config['VERIFY_GFF_SWEEPS'] // chains, 1) + burnin
    law = pinned_set_law(instance, sweeps, burnin, make_rng(seed, 'gibbs'), chains)
    exact = exact_expansion_small(instance)
    tv = law.total_variation(exact.set_law)

    h = 1e-4
    derivative_error = 0.0
    for n in (2, 3):
        ones = from_bits(np.ones((n, n), dtype=np.uint8))
        eta = 1.5
        upper = exact_expansion_small(GffInstance(env=ones, eta=eta + h)).log_ratio
        lower = exact_expansion_small(GffInstance(env=ones, eta=eta - h)).log_ratio
        centre = exact_expansion_small(GffInstance(env=ones, eta=eta)).expected_size / eta
        derivative_error = max(derivative_error, abs((upper - lower) / (2 * h) - centre))

    constants = [empirical_ratio_constant(n) for n in (4, 8, 12)]
    spread = max(constants) / min(constants)

    tiny = GffInstance(env=from_bits(np.array([[1, 0], [1, 1]], dtype=np.uint8)), eta=2.0)
    quadrature_error = abs(math.log(gff_ratio_by_quadrature(tiny)) - exact_expansion_small(tiny).log_ratio)

    full = GffInstance(env=from_bits(np.ones((4, 4), dtype=np.uint8)), eta=2.0)
    region_bound = good_region_pinning_bound(full, 2, 0.2, 0.05)
    region_exact = exact_expansion_small(full).log_ratio

    passed = (tv <= 3.0 * law.mc_error and derivative_error <= 1e-6 and spread <= 2.0
              and quadrature_error <= 1e-8 and region_bound <= region_exact)
    return _result('gff', passed, {
        'total_variation': tv,
        'mc_error': law.mc_error,
        'samples': law.samples,
        'derivative_error': derivative_error,
        'ratio_constants': constants,
        'ratio_constant_spread': spread,
        'quadrature_error': quadrature_error,
        'good_region_bound': region_bound,
        'log_ratio': region_exact,
    })


def suite_cells(config: Dict, seed: int, delta: float = 0.5, rho: float = 0.2,
                zeta: float = 0.05, n: int = 24, cell_side: int = 4) -> Dict:
    """Good-cell and good-row counting on random dense environments"""
    rng = make_rng(seed, 'cells')
    trials = config['VERIFY_CELL_TRIALS']
    cell_violations = 0
    row_violations = 0
    skipped = 0
    for trial in range(trials):
        env = gen_bernoulli(n, 'square', float(rng.uniform(0.55, 1.0)), seed=seed + trial)
        if env.ones < delta * env.size:
            skipped += 1
            continue
        check = counting_bounds_hold(env, cell_side, rho, zeta)
        cell_violations += not check['cell_ok']
        row_violations += not check['row_ok']
    passed = cell_violations == 0 and row_violations == 0
    return _result('cells', passed, {
        'trials': trials,
        'skipped_below_density': skipped,
        'cell_violations': cell_violations,
        'row_violations': row_violations,
    })


def suite_bounds(config: Dict, seed: int) -> Dict:
    """Explicit lower bounds never exceed the measured log Z on periodic environments"""
    violations = 0
    checked = 0
    for dim in (1, 2):
        kernel = make_lazy_walk(dim)
        for n in (120, 480):
            table = return_probabilities(kernel, n)
            c = local_clt_lower_constant(table)
            for gap in (2, 3, 4):
                env = gen_periodic(n, 'segment', gap)
                m = contact_sites(env).m
                delta = 0.9 * m / n
                for eta in (0.5, 1.0, 2.0):
                    log_z = solve(PinningInstance(env=env, kernel=kernel, eta=eta), table).log_z
                    for k in (1, 2, 4, 5, 10):
                        if m % k:
                            continue
                        bounds = theorem1_lower_bound(delta, eta, n, m, m // k, k, c)
                        checked += 1
                        violations += bounds[dim - 1] > log_z
    return _result('bounds', violations == 0, {'checked': checked, 'violations': violations})


def suite_sampler(config: Dict, seed: int) -> Dict:
    """Sampled contact counts and bridge marginals within three standard errors"""
    kernel = make_lazy_walk(1)
    env = gen_periodic(200, 'segment', 4)
    instance = PinningInstance(env=env, kernel=kernel, eta=1.0)
    table = return_probabilities(kernel, env.n)
    solution = solve(instance, table)
    paths = sample_path(instance, table, config['VERIFY_SAMPLER_PATHS'], make_rng(seed, 'sampler'),
                        solution=solution, keep_trajectories=False)
    z_contacts = abs(paths.mean_contacts - solution.expected_contacts) / paths.stderr_contacts

    rng = make_rng(seed, 'bridge')
    samples = config['VERIFY_BRIDGE_SAMPLES']
    middles = np.array([sample_bridge(kernel, 4, rng)[2, 0] for _ in range(samples)])
    worst_bridge_z = 0.0
    for x in range(-2, 3):
        exact = point_probability(kernel, 2, x) ** 2 / point_probability(kernel, 4, 0)
        freq = float((middles == x).mean())
        sigma = math.sqrt(exact * (1 - exact) / samples)
        worst_bridge_z = max(worst_bridge_z, abs(freq - exact) / sigma)

    passed = z_contacts <= 3.0 and worst_bridge_z <= 3.0
    return _result('sampler', passed, {
        'sampled_mean': paths.mean_contacts,
        'exact_mean': solution.expected_contacts,
        'stderr': paths.stderr_contacts,
        'contacts_z': z_contacts,
        'bridge_worst_z': worst_bridge_z,
    })


SUITES: Dict[str, Callable[[Dict, int], Dict]] = {
    'dp-oracle': suite_dp_oracle,
    'identity': suite_identity,
    'psi': suite_psi,
    'gff': suite_gff,
    'cells': suite_cells,
    'bounds': suite_bounds,
    'sampler': suite_sampler,
}


class VerifyExperiment(BaseExperiment):
    """Runs the selected suites, one pool task each"""

    def __init__(self, suites: Optional[Sequence[str]] = None, **kwargs):
        super().__init__(**kwargs)
        self.suites = list(suites or SUITES)
        unknown = [suite for suite in self.suites if suite not in SUITES]
        if unknown:
            raise ValueError(f"Unknown suite(s): {', '.join(unknown)}. Available: {', '.join(SUITES)}")

    @property
    def name(self) -> str:
        return 'verify'

    @property
    def sort_columns(self) -> List[str]:
        return ['suite']

    def build_tasks(self) -> List[Dict]:
        return [{'suite': suite} for suite in self.suites]

    def run_task(self, task: Dict) -> Dict:
        result = SUITES[task['suite']](self.config, self.seed)
        if self.verbose:
            color = 'green' if result['passed'] else 'red'
            mark = '✅' if result['passed'] else '❌'
            cprint(f"{mark} {task['suite']}: {result['metrics']}", color)
        return result

    def report(self, frame: pd.DataFrame) -> Dict:
        return {
            'seed': self.seed,
            'passed': bool(frame['passed'].all()),
            'suites': frame.to_dict(orient='records'),
        }
