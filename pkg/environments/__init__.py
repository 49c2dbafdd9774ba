"""
🌙 Environments Module for sparse-pinning
Dilution fields and their cell coarse-graining
"""

from .environment import (
    Environment,
    ContactSites,
    gen_bernoulli,
    gen_periodic,
    gen_block,
    gen_vanishing,
    generate,
    from_bits,
    from_contact_sites,
    with_site,
    density,
    contact_sites,
)
from .cell_analysis import (
    CellAnalysis,
    analyze_cells,
    cell_fraction_bound,
    row_fraction_bound,
    rho_is_admissible,
    zeta_is_admissible,
)

__all__ = [
    'Environment',
    'ContactSites',
    'gen_bernoulli',
    'gen_periodic',
    'gen_block',
    'gen_vanishing',
    'generate',
    'from_bits',
    'from_contact_sites',
    'with_site',
    'density',
    'contact_sites',
    'CellAnalysis',
    'analyze_cells',
    'cell_fraction_bound',
    'row_fraction_bound',
    'rho_is_admissible',
    'zeta_is_admissible',
]
