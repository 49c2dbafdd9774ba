"""
🌙 sparse-pinning command line

Subcommands:
    gen-env   write an environment JSON (bernoulli | periodic | block | vanishing)
    solve     renewal DP on an environment: CSV j,t_j,mu_j + JSON summary
    sample    exact polymer paths: CSV i,X_i (or i,X_i_1,X_i_2) + contact set JSON
    sweep     contact fraction versus N: CSV family,N,dim,eta,replica,seed,density,logZ,
              expected_contacts,contact_fraction,stderr
    verify    property suites, JSON report
    psi       CSV m,r,K,psi_uniform,lower_bound,min_found,distance_to_uniform
    gff       interface snapshot: height grid CSV, pinned mask CSV, JSON summary
    returns   CSV k,p_k

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 verification failure.
"""

import argparse
import math
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from termcolor import cprint

from configs.pinning_configs import ACCEPTANCE_CONFIG, BLOCK_CONFIG, CONFIG, QUICK_CONFIG
from data_formatters.environment_formatter import EnvironmentFormatter
from data_formatters.output_writer import write_csv, write_json
from data_formatters.solution_formatter import SolutionFormatter
from data_formatters.trajectory_formatter import TrajectoryFormatter
from environments.environment import from_bits, generate
from experiments.sweep_experiment import FAMILIES, SweepExperiment, stabilization_summary
from experiments.verify_experiment import SUITES, VerifyExperiment
from models.gff_pinning import GffInstance, batch_means_stderr, run_chain
from models.renewal_solver import PinningInstance, solve
from optimizers.psi_optimizer import GapVector, minimize_psi_per, psi_per, psi_per_uniform_lower_bound
from samplers.path_sampler import sample_path
from samplers.rng import make_rng
from walks.walk_kernel import make_lazy_walk, return_probabilities

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFICATION = 3

PRESETS = {
    'default': CONFIG,
    'quick': QUICK_CONFIG,
    'acceptance': ACCEPTANCE_CONFIG,
}

SWEEP_PRESETS = dict(PRESETS, block=BLOCK_CONFIG)


class UsageError(Exception):
    """Bad command-line flags"""


class PinningArgumentParser(argparse.ArgumentParser):
    """argparse raises instead of exiting, so main() owns the exit code"""

    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError as e:
        raise UsageError(f"Expected a comma-separated list of numbers. Got: {text}") from e


def _ints(text: str) -> List[int]:
    values = _floats(text)
    if any(v != int(v) for v in values):
        raise UsageError(f"Expected a comma-separated list of integers. Got: {text}")
    return [int(v) for v in values]


def _output(path: Optional[str], default_name: str) -> Path:
    return Path(path) if path else Path(CONFIG['OUTPUT_DIR']) / default_name


def _sidecar(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}{suffix}")


def cmd_gen_env(args) -> int:
    profile = tuple(_floats(args.profile))
    if len(profile) != 3:
        raise UsageError(f"--profile needs three densities. Got: {args.profile}")
    env = generate(args.kind, args.n, geometry=args.geometry, density=args.density, gap=args.gap,
                   profile=profile, seed=args.seed)
    formatter = EnvironmentFormatter()
    out = formatter.save(env, _output(args.out, f"env_{args.kind}_{args.n}.json"), args.timestamp)
    if args.sites_out:
        formatter.save_sites(env, args.sites_out, args.timestamp)
    cprint(f"✅ Environment written to {out} ({env.ones} reward sites, density {env.ones / env.size:.4f})", "green")
    return EXIT_OK


def cmd_solve(args) -> int:
    env = EnvironmentFormatter().load(args.env)
    kernel = make_lazy_walk(args.dim)
    solution = solve(PinningInstance(env=env, kernel=kernel, eta=args.eta), return_probabilities(kernel, env.n))
    out = _output(args.out, 'solution.csv')
    SolutionFormatter().save(solution, out, args.summary_out or _sidecar(out, '_summary.json'), args.timestamp)
    cprint(f"✅ logZ = {solution.log_z:.12g}, contact fraction = {solution.contact_fraction:.6g}", "green")
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.samples < 1:
        raise UsageError(f"--samples must be >= 1. Got: {args.samples}")
    env = EnvironmentFormatter().load(args.env)
    kernel = make_lazy_walk(args.dim)
    instance = PinningInstance(env=env, kernel=kernel, eta=args.eta)
    table = return_probabilities(kernel, env.n)
    paths = sample_path(instance, table, args.samples, make_rng(args.seed, 'sampler'))

    formatter = TrajectoryFormatter()
    out = _output(args.out, 'trajectory.csv')
    if args.samples == 1:
        write_csv(formatter.trajectory_frame(paths.trajectories[0]), out, args.timestamp)
    else:
        write_csv(formatter.trajectories_frame(paths.trajectories), out, args.timestamp)
    write_json({
        'contact_sets': [formatter.contact_set_payload(t)['contact_set'] for t in paths.trajectories],
        'N': env.n,
        'mean_contacts': paths.mean_contacts,
    }, args.contacts_out or _sidecar(out, '_contacts.json'), args.timestamp)
    cprint(f"✅ {args.samples} path(s) written to {out}, mean contacts {paths.mean_contacts:.4f}", "green")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = SWEEP_PRESETS[args.preset]
    experiment = SweepExperiment(
        family=args.env_family,
        n_list=_ints(args.n_list) if args.n_list else None,
        eta_list=_floats(args.eta_list) if args.eta_list else None,
        dim=args.dim,
        replicas=args.replicas,
        model=args.model,
        density=args.density,
        gap=args.gap,
        profile=_floats(args.profile) if args.profile else None,
        seed=args.seed,
        threads=args.threads,
        verbose=args.verbose,
        config=config,
    )
    frame = experiment.run()
    out = _output(args.out, f"sweep_{experiment.family}.csv")
    write_csv(frame, out, args.timestamp)
    summary = stabilization_summary(frame, config['STABILIZATION_TOLERANCE'])
    write_csv(summary, args.summary_out or _sidecar(out, '_stabilization.csv'), args.timestamp)
    for row in summary.itertuples():
        stable = 'not reached' if math.isnan(row.stabilization_N) else f"N >= {int(row.stabilization_N)}"
        cprint(f"📊 {row.family} dim={row.dim} eta={row.eta}: fraction {row.final_fraction:.6g}, "
               f"stable {stable}", "cyan")
    cprint(f"✅ Sweep written to {out}", "green")
    return EXIT_OK


def cmd_verify(args) -> int:
    suites = list(SUITES) if args.suite == 'all' else [args.suite]
    experiment = VerifyExperiment(suites=suites, config=PRESETS[args.preset], seed=args.seed,
                                  threads=args.threads, verbose=args.verbose)
    frame = experiment.run()
    report = experiment.report(frame)
    out = _output(args.out, 'verify.json')
    write_json(report, out, args.timestamp)
    if not report['passed']:
        failed = ', '.join(frame.loc[~frame['passed'], 'suite'])
        cprint(f"❌ Verification failed: {failed} (report: {out})", "red")
        return EXIT_VERIFICATION
    cprint(f"✅ All suites passed (report: {out})", "green")
    return EXIT_OK


def cmd_psi(args) -> int:
    budget = args.n + 1.0
    rng = make_rng(args.seed, 'psi')
    rows = []
    for m in _ints(args.m_list):
        for r in _ints(args.r_list):
            if not 1 <= r <= m:
                continue
            uniform = GapVector.uniform(m, budget)
            psi_uniform = psi_per(uniform, r)
            if r >= 2 and m <= CONFIG['PSI_OPT_MAX_SITES']:
                found = minimize_psi_per(m, r, budget, rng=rng)
                min_found, distance = psi_per(found, r), found.distance_to_uniform()
            else:
                min_found, distance = psi_uniform, 0.0
            for k in _ints(args.k_list):
                try:
                    lower = psi_per_uniform_lower_bound(m, r, k, budget)
                except ValueError:
                    lower = math.nan
                rows.append({
                    'm': m, 'r': r, 'K': k,
                    'psi_uniform': psi_uniform,
                    'lower_bound': lower,
                    'min_found': min_found,
                    'distance_to_uniform': distance,
                })
    if not rows:
        raise UsageError("No admissible (m, r) pair: need 1 <= r <= m")
    out = _output(args.out, 'psi.csv')
    write_csv(SolutionFormatter().psi_frame(rows), out, args.timestamp)
    cprint(f"✅ {len(rows)} psi rows written to {out}", "green")
    return EXIT_OK


def cmd_gff(args) -> int:
    if args.env:
        env = EnvironmentFormatter().load(args.env)
    else:
        env = from_bits(np.ones((args.n, args.n), dtype=np.uint8), family='full')
    instance = GffInstance(env=env, eta=args.eta)
    state, fractions, _ = run_chain(instance, args.sweeps, args.burnin, make_rng(args.seed, 'gibbs'), args.chains)
    pinned_fraction = float(fractions.mean())
    stderr = batch_means_stderr(fractions, CONFIG['GFF_BATCHES'])

    formatter = TrajectoryFormatter()
    prefix = _output(args.out, 'gff')
    write_csv(formatter.height_grid_frame(state.heights[0]), _sidecar(prefix, '_heights.csv'), args.timestamp)
    write_csv(formatter.pinned_mask_frame(state.pinned[0]), _sidecar(prefix, '_pinned.csv'), args.timestamp)
    write_json(formatter.gff_summary(instance, pinned_fraction, stderr),
               _sidecar(prefix, '_summary.json'), args.timestamp)
    cprint(f"✅ Pinned fraction {pinned_fraction:.6g} +/- {stderr:.2g} (files: {prefix}_*)", "green")
    return EXIT_OK


def cmd_returns(args) -> int:
    table = return_probabilities(make_lazy_walk(args.dim), args.max_time)
    out = _output(args.out, f"returns_d{args.dim}.csv")
    write_csv(SolutionFormatter().returns_frame(table), out, args.timestamp)
    cprint(f"✅ Return probabilities up to k={args.max_time} written to {out}", "green")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = PinningArgumentParser(prog='sparse-pinning', description='Diluted pinning: solver, sampler and checks')
    parser.add_argument('--no-timestamp', dest='timestamp', action='store_false', default=None,
                        help='Omit the generated_at line/field (byte-identical reruns)')
    parser.add_argument('--threads', type=int, default=None, help='Work pool size')
    parser.add_argument('--quiet', dest='verbose', action='store_false', default=None)
    sub = parser.add_subparsers(dest='command', required=True, parser_class=PinningArgumentParser)

    p = sub.add_parser('gen-env', help='Generate an environment')
    p.add_argument('--kind', choices=FAMILIES, required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--geometry', choices=('segment', 'square'), default='segment')
    p.add_argument('--density', type=float, default=0.5)
    p.add_argument('--gap', type=int, default=2)
    p.add_argument('--profile', default='0.8,0,0.8')
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--out')
    p.add_argument('--sites-out', help='CSV index,t of the reward sites')
    p.set_defaults(handler=cmd_gen_env)

    p = sub.add_parser('solve', help='Solve the polymer on an environment')
    p.add_argument('--env', required=True)
    p.add_argument('--eta', type=float, required=True)
    p.add_argument('--dim', type=int, choices=(1, 2), default=1)
    p.add_argument('--out')
    p.add_argument('--summary-out')
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser('sample', help='Sample exact polymer paths')
    p.add_argument('--env', required=True)
    p.add_argument('--eta', type=float, required=True)
    p.add_argument('--dim', type=int, choices=(1, 2), default=1)
    p.add_argument('--samples', type=int, default=1)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--out')
    p.add_argument('--contacts-out')
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser('sweep', help='Contact fraction versus N')
    p.add_argument('--preset', choices=list(SWEEP_PRESETS), default='default',
                   help='Settings for every flag left out')
    p.add_argument('--env-family', choices=FAMILIES, default=None)
    p.add_argument('--n-list', default=None)
    p.add_argument('--eta-list', default=None)
    p.add_argument('--dim', type=int, choices=(1, 2), default=None)
    p.add_argument('--model', choices=('polymer', 'interface'), default='polymer')
    p.add_argument('--replicas', type=int, default=None)
    p.add_argument('--density', type=float, default=None)
    p.add_argument('--gap', type=int, default=None)
    p.add_argument('--profile', default=None)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--out')
    p.add_argument('--summary-out')
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser('verify', help='Run property suites')
    p.add_argument('--suite', choices=list(SUITES) + ['all'], default='all')
    p.add_argument('--preset', choices=list(PRESETS), default='default')
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser('psi', help='Psi_per minimizer and bounds table')
    p.add_argument('--m-list', required=True)
    p.add_argument('--r-list', required=True)
    p.add_argument('--k-list', default='2')
    p.add_argument('--n', type=int, required=True, help='Polymer length; the gap budget is N+1')
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_psi)

    p = sub.add_parser('gff', help='Gibbs sampler snapshot of the pinned interface')
    p.add_argument('--n', type=int, default=8)
    p.add_argument('--env', help='Square environment JSON (default: every site rewarded)')
    p.add_argument('--eta', type=float, required=True)
    p.add_argument('--sweeps', type=int, default=CONFIG['INTERFACE_SWEEPS'])
    p.add_argument('--burnin', type=int, default=CONFIG['INTERFACE_BURNIN'])
    p.add_argument('--chains', type=int, default=1)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--out', help='Output prefix')
    p.set_defaults(handler=cmd_gff)

    p = sub.add_parser('returns', help='Return probability table')
    p.add_argument('--dim', type=int, choices=(1, 2), default=1)
    p.add_argument('--max-time', type=int, required=True)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_returns)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse flags, run one subcommand and map failures to exit codes"""
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except (UsageError, ValueError, FileNotFoundError) as e:
        cprint(f"❌ {e}", "red")
        return EXIT_USAGE
    except (FloatingPointError, RuntimeError, OverflowError) as e:
        cprint(f"❌ Numerical failure: {e}", "red")
        return EXIT_NUMERICAL
