"""
🌙 Sparse Pinning Configuration
SINGLE SOURCE OF TRUTH - Edit all settings here

To use:
    from configs.pinning_configs import CONFIG

    experiment = SweepExperiment(
        family='bernoulli',
        n_list=CONFIG['SWEEP_N_LIST'],
        ...
    )

    Or just run with defaults:
    experiment = SweepExperiment()  # Uses all CONFIG defaults

Optional overrides are read from a .env file at the repo root:
    PINNING_THREADS=8
    PINNING_OUTPUT_DIR=results/
"""

import os
from pathlib import Path
from dotenv import load_dotenv

env_path = Path(__file__).parent.parent / '.env'
if env_path.exists():
    load_dotenv(dotenv_path=env_path)

# ============================================================================
# 🎲 REPRODUCIBILITY
# ============================================================================

CONFIG = {
    'SEED': 20240607,                    # Root seed, every substream is derived from it

    # ============================================================================
    # 🚶 WALK KERNEL
    # ============================================================================

    'CLT_MIN_TIME': 1000,                # Shortest table for which the CLT plateau is read
    'CLT_PLATEAU_TOLERANCE': 1e-2,       # Max relative change over the last decade of k

    # ============================================================================
    # 🧮 RENEWAL SOLVER
    # ============================================================================

    'RESCALE_THRESHOLD': 1e100,          # Forward/backward arrays are rescaled above this
    'EXTENDED_PRECISION_DPS': 50,        # mpmath digits for the log Z cross-check
    'SIZE_LAW_MAX_SITES': 200,           # Exact |A| law is O(m^3), linear arithmetic

    # ============================================================================
    # 📐 PSI OPTIMIZER
    # ============================================================================

    'PSI_MAX_SITES': 24,                 # Enumeration cap for psi / psi_per values
    'PSI_OPT_MAX_SITES': 12,             # Cap for convexity / minimization loops
    'PSI_CONVEXITY_TOL': 1e-12,          # Midpoint convexity slack
    'PSI_FLOOR_FRACTION': 1e-9,          # Interior clamp, as a fraction of the budget
    'PSI_MAX_ITER': 20000,               # Projected-gradient iteration cap
    'PSI_ARMIJO_SIGMA': 1e-4,            # Sufficient decrease constant
    'JENSEN_MAX_TUPLES': 200000,         # Exhaustive below this many tuples, sampled above

    # ============================================================================
    # 🧱 GFF INTERFACE
    # ============================================================================

    'GFF_MAX_PINNABLE': 16,              # 2^|Omega| enumeration cap
    'GFF_MAX_CHAIN_SIDE': 64,            # Largest lattice for the Gibbs sampler
    'GFF_BATCHES': 20,                   # Batch-means batches for standard errors
    'GFF_CHAINS': 100,                   # Independent chains advanced together
    'INTERFACE_SWEEPS': 2000,            # Sweeps per chain for the interface model
    'INTERFACE_BURNIN': 200,
    'INTERFACE_CHAINS': 4,

    # ============================================================================
    # 🔍 ORACLE
    # ============================================================================

    'ORACLE_MAX_N_1D': 12,               # 3^N step sequences
    'ORACLE_MAX_N_2D': 8,                # 9^N step sequences
    'ORACLE_VECTOR_DEPTH_1D': 12,        # Steps expanded as one numpy block
    'ORACLE_VECTOR_DEPTH_2D': 6,

    # ============================================================================
    # 📊 SWEEPS
    # ============================================================================

    'SWEEP_FAMILY': 'bernoulli',
    'SWEEP_DENSITY': 0.5,
    'SWEEP_GAP': 2,
    'SWEEP_PROFILE': (0.8, 0.0, 0.8),
    'SWEEP_N_LIST': [256, 512, 1024, 2048, 4096, 8192],
    'SWEEP_ETA_LIST': [1.0],
    'SWEEP_DIM': 1,
    'SWEEP_REPLICAS': 1,
    'STABILIZATION_TOLERANCE': 0.10,     # Relative change below which the fraction is "stable"
    'THREADS': int(os.getenv('PINNING_THREADS', '4')),

    # ============================================================================
    # ✅ VERIFICATION SUITES
    # ============================================================================

    'VERIFY_ORACLE_MAX_N': 8,
    'VERIFY_ORACLE_ETAS': (0.5, 0.6931471805599453, 2.0),
    'VERIFY_ORACLE_TOL': 1e-10,
    'VERIFY_IDENTITY_NODES': 10000,
    'VERIFY_IDENTITY_TOL': 1e-6,
    'VERIFY_CONVEXITY_TRIALS': 10000,
    'VERIFY_MINIMIZER_STARTS': 50,
    'VERIFY_MINIMIZER_TOL': 1e-6,
    'VERIFY_CHAIN_VECTORS': 1000,
    'VERIFY_GFF_SWEEPS': 1000000,
    'VERIFY_GFF_BURNIN': 1000,
    'VERIFY_CELL_TRIALS': 1000,
    'VERIFY_SAMPLER_PATHS': 10000,
    'VERIFY_BRIDGE_SAMPLES': 100000,

    # ============================================================================
    # 📝 OUTPUT
    # ============================================================================

    'OUTPUT_DIR': os.getenv('PINNING_OUTPUT_DIR', 'results/'),
    'FLOAT_FORMAT': '%.12g',             # Fixed float formatting keeps CSVs byte-stable
    'INCLUDE_TIMESTAMP': True,           # Header line with the generation time

    # ============================================================================
    # 🖥️ UI SETTINGS
    # ============================================================================

    'VERBOSE_MODE': True,                # Print progress to console
}

# ============================================================================
# 🎨 QUICK PRESETS
# ============================================================================

# Fast preset (smoke runs and CI)
QUICK_CONFIG = CONFIG.copy()
QUICK_CONFIG.update({
    'SWEEP_N_LIST': [128, 256, 512],
    'VERIFY_ORACLE_MAX_N': 6,
    'VERIFY_IDENTITY_NODES': 2000,
    'VERIFY_IDENTITY_TOL': 1e-5,
    'VERIFY_CONVEXITY_TRIALS': 500,
    'VERIFY_MINIMIZER_STARTS': 10,
    'VERIFY_CHAIN_VECTORS': 100,
    'VERIFY_GFF_SWEEPS': 100000,
    'VERIFY_CELL_TRIALS': 200,
    'VERIFY_SAMPLER_PATHS': 2000,
    'VERIFY_BRIDGE_SAMPLES': 20000,
})

# Acceptance preset (full-size exhibits)
ACCEPTANCE_CONFIG = CONFIG.copy()
ACCEPTANCE_CONFIG.update({
    'SWEEP_N_LIST': [256, 1024, 4096, 8192],
    'VERIFY_ORACLE_MAX_N': 8,
})

# Block-profile preset (1+1 dimensions, empty middle third)
BLOCK_CONFIG = CONFIG.copy()
BLOCK_CONFIG.update({
    'SWEEP_FAMILY': 'block',
    'SWEEP_PROFILE': (0.8, 0.0, 0.8),
    'SWEEP_N_LIST': [900],
    'SWEEP_ETA_LIST': [1.0],
    'SWEEP_DIM': 1,
})
