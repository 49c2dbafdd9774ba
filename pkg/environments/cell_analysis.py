"""
🌙 Cell Analysis
Coarse-graining of a square environment into K x K cells

A cell is good when it holds at least rho K^2 reward sites. A row of cells is
good when it holds at least zeta N/K good cells.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .environment import Environment, density


@dataclass(frozen=True)
class CellAnalysis:
    """
    Good/bad classification of the cells and rows of cells

    Cell (a, b) covers sites (a K + 1 .. (a + 1) K) x (b K + 1 .. (b + 1) K);
    row a is the set of cells (a, 0..R-1) with R = N / K.
    """
    cell_side: int
    rho: float
    zeta: float
    cell_counts: np.ndarray
    good_cells: np.ndarray
    good_rows: np.ndarray

    @property
    def cells_per_side(self) -> int:
        return int(self.good_cells.shape[0])

    @property
    def good_cell_fraction(self) -> float:
        return float(self.good_cells.mean())

    @property
    def good_row_fraction(self) -> float:
        return float(self.good_rows.mean())

    def good_cells_in_row(self, row: int) -> List[int]:
        """Column indices of the good cells of one row, ascending"""
        return [int(b) for b in np.flatnonzero(self.good_cells[row])]

    def to_dict(self) -> dict:
        return {
            'cell_side': self.cell_side,
            'rho': self.rho,
            'zeta': self.zeta,
            'good_cell_fraction': self.good_cell_fraction,
            'good_row_fraction': self.good_row_fraction,
            'good_rows': int(self.good_rows.sum()),
        }


def rho_is_admissible(rho: float, delta: float) -> bool:
    """rho < delta / (2 - delta), the range where the good-cell count goes through"""
    return 0.0 < rho < delta / (2.0 - delta)


def zeta_is_admissible(rho: float, zeta: float) -> bool:
    """
    True when the good-row count goes through for this (rho, zeta)

    If more than a fraction rho/(1+rho) of cells are good and bad rows hold
    fewer than zeta R good cells, the good-row fraction x satisfies
    x >= (g - zeta)/(1 - zeta), which is >= zeta/(1+zeta) as soon as
    2 zeta/(1+zeta) <= rho/(1+rho).
    """
    return 0.0 < zeta < 1.0 and 2.0 * zeta / (1.0 + zeta) <= cell_fraction_bound(rho)


def cell_fraction_bound(rho: float) -> float:
    """Lower bound rho/(1+rho) on the good-cell fraction"""
    return rho / (1.0 + rho)


def row_fraction_bound(zeta: float) -> float:
    """Lower bound zeta/(1+zeta) on the good-row fraction"""
    return zeta / (1.0 + zeta)


def cell_counts(env: Environment, cell_side: int) -> np.ndarray:
    """Number of reward sites per cell, shape (R, R)"""
    if env.geometry != 'square':
        raise ValueError(f"Cell analysis needs a square environment. Got: {env.geometry}")
    if cell_side < 1 or env.n % cell_side != 0:
        raise ValueError(f"Cell side K={cell_side} must divide N={env.n}")
    cells = env.n // cell_side
    return env.bits.astype(np.int64).reshape(cells, cell_side, cells, cell_side).sum(axis=(1, 3))


def analyze_cells(env: Environment, cell_side: int, rho: float, zeta: float,
                  delta: Optional[float] = None) -> CellAnalysis:
    """
    Classify cells and rows of cells

    Args:
        env: Square environment
        cell_side: K, must divide N
        rho: Cell threshold, good iff count >= rho K^2
        zeta: Row threshold, good iff good cells >= zeta N/K
        delta: If given, rho must satisfy rho < delta/(2 - delta)

    Returns:
        CellAnalysis with per-cell and per-row flags
    """
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must be in (0, 1]. Got: {rho}")
    if not 0.0 < zeta <= 1.0:
        raise ValueError(f"zeta must be in (0, 1]. Got: {zeta}")
    if delta is not None and not rho_is_admissible(rho, delta):
        raise ValueError(f"rho={rho} is not below delta/(2-delta)={delta / (2.0 - delta):.6g}")

    counts = cell_counts(env, cell_side)
    good_cells = counts >= rho * cell_side ** 2
    row_threshold = zeta * env.n / cell_side
    good_rows = good_cells.sum(axis=1) >= row_threshold
    return CellAnalysis(
        cell_side=cell_side,
        rho=rho,
        zeta=zeta,
        cell_counts=counts,
        good_cells=good_cells,
        good_rows=good_rows,
    )


def counting_bounds_hold(env: Environment, cell_side: int, rho: float, zeta: float) -> dict:
    """
    Check both counting bounds on one environment

    Returns:
        Dict with the measured fractions, the bounds and whether each bound holds.
        The row bound is only asserted when zeta is admissible for rho.
    """
    analysis = analyze_cells(env, cell_side, rho, zeta)
    cell_ok = analysis.good_cell_fraction > cell_fraction_bound(rho)
    row_checked = zeta_is_admissible(rho, zeta)
    row_ok = analysis.good_row_fraction >= row_fraction_bound(zeta) if row_checked else True
    return {
        'density': density(env),
        'good_cell_fraction': analysis.good_cell_fraction,
        'cell_bound': cell_fraction_bound(rho),
        'cell_ok': bool(cell_ok),
        'good_row_fraction': analysis.good_row_fraction,
        'row_bound': row_fraction_bound(zeta),
        'row_checked': row_checked,
        'row_ok': bool(row_ok),
    }
