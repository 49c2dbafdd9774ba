"""
sparse-pinning
Exact solver, sampler and numerical checks for a directed polymer pinned on a
diluted defect line (1+1 and 1+2 dimensions) and for the delta-pinned Gaussian
interface in 2+1 dimensions.

Quick Start:
    from environments.environment import gen_bernoulli
    from models.renewal_solver import solve_env
    from walks.walk_kernel import make_lazy_walk

    env = gen_bernoulli(4096, density=0.5, seed=7)
    solution = solve_env(env, make_lazy_walk(1), eta=1.0)
    print(solution.contact_fraction)

Or run directly:
    python run.py sweep --env-family bernoulli --n-list 256,1024,4096
"""

__version__ = "1.0.0"
