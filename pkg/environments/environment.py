"""
🌙 Environments
Dilution fields omega on the segment {1..N} or the square {1..N}^2

The generators cover the families used by the sweeps: Bernoulli, periodic,
three-block profiles and the vanishing-density prefix family.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from samplers.rng import make_rng

GEOMETRIES = ('segment', 'square')


@dataclass(frozen=True)
class Environment:
    """
    A 0/1 dilution field on Lambda_N

    bits has shape (N,) for the segment and (N, N) for the square. Site i of
    the segment is bits[i - 1]; site (i, j) of the square is bits[i - 1, j - 1].
    """
    geometry: str
    n: int
    bits: np.ndarray
    seed: Optional[int] = None
    family: str = 'custom'

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"Geometry must be one of {GEOMETRIES}. Got: {self.geometry}")
        if self.n < 1:
            raise ValueError(f"N must be >= 1. Got: {self.n}")
        expected = (self.n,) if self.geometry == 'segment' else (self.n, self.n)
        if self.bits.shape != expected:
            raise ValueError(f"Bits shape {self.bits.shape} does not match {self.geometry} with N={self.n}")
        if not np.isin(self.bits, (0, 1)).all():
            raise ValueError("Environment bits must be 0 or 1")
        bits = self.bits.astype(np.uint8)
        bits.flags.writeable = False
        object.__setattr__(self, 'bits', bits)

    @property
    def size(self) -> int:
        """|Lambda_N|"""
        return int(self.bits.size)

    @property
    def ones(self) -> int:
        return int(self.bits.sum())

    @property
    def dimension(self) -> int:
        return 1 if self.geometry == 'segment' else 2


@dataclass(frozen=True)
class ContactSites:
    """
    Ordered reward sites t_1 < ... < t_m

    For the segment, positions is a 1-D int array of sites in 1..N.
    For the square, positions is an (m, 2) array in raster order.
    """
    positions: np.ndarray
    n: int
    geometry: str = 'segment'

    @property
    def m(self) -> int:
        return int(len(self.positions))

    def with_origin(self) -> np.ndarray:
        """Sites with t_0 = 0 prepended (segment only)"""
        if self.geometry != 'segment':
            raise ValueError("t_0 = 0 is only defined on the segment")
        return np.concatenate([[0], self.positions]).astype(np.int64)

    def gaps(self) -> np.ndarray:
        """Increments t_i - t_{i-1}, i = 1..m"""
        return np.diff(self.with_origin())


def _validate_n(n: int):
    if int(n) != n or n < 1:
        raise ValueError(f"N must be a positive integer. Got: {n}")


def _shape(n: int, geometry: str) -> Tuple[int, ...]:
    if geometry == 'segment':
        return (n,)
    if geometry == 'square':
        return (n, n)
    raise ValueError(f"Geometry must be one of {GEOMETRIES}. Got: {geometry}")


def gen_bernoulli(n: int, geometry: str = 'segment', density: float = 0.5,
                  seed: Optional[int] = None) -> Environment:
    """
    Independent Bernoulli(density) bits

    Args:
        n: Side length N
        geometry: 'segment' or 'square'
        density: Probability of a reward site, in [0, 1]
        seed: Root seed; bits come from the 'environment' substream

    Returns:
        Environment reproducible from (seed, n, geometry, density)
    """
    _validate_n(n)
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"Density must be in [0, 1]. Got: {density}")
    rng = make_rng(seed, 'environment')
    bits = (rng.random(_shape(n, geometry)) < density).astype(np.uint8)
    return Environment(geometry=geometry, n=n, bits=bits, seed=seed, family='bernoulli')


def gen_periodic(n: int, geometry: str = 'segment', gap: int = 2) -> Environment:
    """
    Reward sites at the multiples of gap

    On the square, (i, j) is a reward site iff gap divides both i and j.
    """
    _validate_n(n)
    if int(gap) != gap or gap < 1:
        raise ValueError(f"Gap must be an integer >= 1. Got: {gap}")
    _shape(n, geometry)
    line = (np.arange(1, n + 1) % gap == 0).astype(np.uint8)
    bits = line if geometry == 'segment' else np.outer(line, line)
    return Environment(geometry=geometry, n=n, bits=bits, family='periodic')


def block_edges(n: int) -> Tuple[int, int, int, int]:
    """0-based boundaries of the three thirds of the segment"""
    return 0, n // 3, (2 * n) // 3, n


def gen_block(n: int, thirds_density: Sequence[float] = (0.8, 0.0, 0.8),
              seed: Optional[int] = None, geometry: str = 'segment') -> Environment:
    """
    Bernoulli bits with a separate density on each third of the segment

    Args:
        n: Segment length N
        thirds_density: Densities of the first, middle and last third
        seed: Root seed
        geometry: Must be 'segment'

    Returns:
        Environment with family 'block'
    """
    if geometry != 'segment':
        raise ValueError(f"Block profiles are defined on the segment only. Got: {geometry}")
    _validate_n(n)
    if len(thirds_density) != 3:
        raise ValueError(f"Need exactly three densities. Got: {thirds_density}")
    for value in thirds_density:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"Densities must be in [0, 1]. Got: {thirds_density}")

    rng = make_rng(seed, 'environment')
    edges = block_edges(n)
    bits = np.zeros(n, dtype=np.uint8)
    for third, value in enumerate(thirds_density):
        lo, hi = edges[third], edges[third + 1]
        bits[lo:hi] = rng.random(hi - lo) < value
    return Environment(geometry='segment', n=n, bits=bits, seed=seed, family='block')


def gen_vanishing(n: int, geometry: str = 'segment') -> Environment:
    """Reward sites exactly on the prefix i <= ceil(sqrt(N))"""
    if geometry != 'segment':
        raise ValueError(f"The vanishing family is defined on the segment only. Got: {geometry}")
    _validate_n(n)
    prefix = math.isqrt(n - 1) + 1
    bits = np.zeros(n, dtype=np.uint8)
    bits[:prefix] = 1
    return Environment(geometry='segment', n=n, bits=bits, family='vanishing')


def from_bits(bits: Sequence, geometry: Optional[str] = None, seed: Optional[int] = None,
              family: str = 'custom') -> Environment:
    """Wrap an explicit 0/1 array (1-D for the segment, square 2-D for the square)"""
    array = np.asarray(bits, dtype=np.uint8)
    if geometry is None:
        geometry = 'segment' if array.ndim == 1 else 'square'
    return Environment(geometry=geometry, n=int(array.shape[0]), bits=array, seed=seed, family=family)


def density(env: Environment) -> float:
    """(sum of omega_i) / |Lambda_N|"""
    return env.ones / env.size


def contact_sites(env: Environment) -> ContactSites:
    """Reward sites in ascending (raster) order, 1-based"""
    if env.geometry == 'segment':
        positions = np.flatnonzero(env.bits) + 1
    else:
        positions = np.argwhere(env.bits) + 1
    return ContactSites(positions=positions.astype(np.int64), n=env.n, geometry=env.geometry)


def from_contact_sites(sites: ContactSites) -> Environment:
    """Rebuild omega from its reward sites"""
    bits = np.zeros(_shape(sites.n, sites.geometry), dtype=np.uint8)
    if sites.m:
        if sites.geometry == 'segment':
            bits[sites.positions - 1] = 1
        else:
            bits[sites.positions[:, 0] - 1, sites.positions[:, 1] - 1] = 1
    return Environment(geometry=sites.geometry, n=sites.n, bits=bits)


def with_site(env: Environment, site) -> Environment:
    """Copy of env with one more reward site (1-based index or (i, j))"""
    bits = env.bits.copy()
    if env.geometry == 'segment':
        bits[int(site) - 1] = 1
    else:
        bits[int(site[0]) - 1, int(site[1]) - 1] = 1
    return Environment(geometry=env.geometry, n=env.n, bits=bits, seed=env.seed, family=env.family)


def generate(kind: str, n: int, geometry: str = 'segment', density: float = 0.5, gap: int = 2,
             profile: Sequence[float] = (0.8, 0.0, 0.8), seed: Optional[int] = None) -> Environment:
    """Dispatch to the generator named by kind"""
    if kind == 'bernoulli':
        return gen_bernoulli(n, geometry, density, seed)
    if kind == 'periodic':
        return gen_periodic(n, geometry, gap)
    if kind == 'block':
        return gen_block(n, profile, seed, geometry)
    if kind == 'vanishing':
        return gen_vanishing(n, geometry)
    raise ValueError(f"Unknown environment kind: {kind}. Use bernoulli, periodic, block or vanishing")
