"""
Dense and sparse GF(2) linear algebra for the bar oracle.

Rank is computed by Gaussian elimination with XOR row operations on numpy
uint8 arrays.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Set, Tuple

import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class SparseMatrixF2:
    """A matrix over F_2 given by the positions of its nonzero entries."""
    rows: int
    cols: int
    entries: Set[Tuple[int, int]] = field(default_factory=set)

    def toggle(self, row: int, col: int) -> None:
        """Add 1 at (row, col)."""
        self.entries ^= {(row, col)}

    @property
    def nbytes(self) -> int:
        return self.rows * self.cols

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for row, col in self.entries:
            dense[row, col] = 1
        return dense

    def rank(self) -> int:
        if not self.entries:
            return 0
        return rank_gf2(self.to_dense())


def row_echelon_gf2(matrix: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Row-reduce a binary matrix; returns the echelon form and its pivot columns."""
    reduced = (np.asarray(matrix, dtype=np.uint8) % 2).copy()
    m, n = reduced.shape
    pivots: List[int] = []
    pivot_row = 0
    for col in range(n):
        if pivot_row == m:
            break
        nonzero = np.flatnonzero(reduced[pivot_row:, col])
        if nonzero.size == 0:
            continue
        found = pivot_row + int(nonzero[0])
        if found != pivot_row:
            reduced[[pivot_row, found]] = reduced[[found, pivot_row]]
        below = pivot_row + 1 + np.flatnonzero(reduced[pivot_row + 1:, col])
        reduced[below] ^= reduced[pivot_row]
        pivots.append(col)
        pivot_row += 1
    return reduced, pivots


def rank_gf2(matrix: np.ndarray) -> int:
    if matrix.size == 0:
        return 0
    return len(row_echelon_gf2(matrix)[1])


def product_gf2(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Matrix product reduced mod 2."""
    return (left.astype(np.int64) @ right.astype(np.int64)) % 2


def is_zero_gf2(matrices: Iterable[np.ndarray]) -> bool:
    return all(not np.any(m) for m in matrices)
