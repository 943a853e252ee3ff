"""
Brute-force bar-construction oracle at p = 2.

For the trivial Poly_R-algebra M on one generator x, level s of the bar
construction Bar(id, Poly_R, M) is Poly_R^{∘s}(M). The faces are

    d_0          the augmentation on the outermost layer (weight-1 part),
    d_1..d_{s-1} the monad multiplication of two adjacent layers,
    d_s          the trivial action on the innermost layer.

The complex is normalized by discarding degenerate basis monomials (some
layer made only of bare arguments), splits into blocks of fixed internal
degree and weight, and its homology is compared with the E²-page counts of
the unstable Ext basis.
"""

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from src.algebra.dyer_lashof import (PolyGenerator, PolyRMonomial, polyR_functor, polyR_monad_mult,
                                     polyR_monomials)
from src.algebra.errors import ResourceLimitExceeded
from src.algebra.fp_core import accumulate
from src.algebra.koszul_dual import unstable_ext_basis
from src.oracles.gf2 import SparseMatrixF2, is_zero_gf2, product_gf2
from src.utils.config import get_settings
from src.utils.output import DimTable

logger = logging.getLogger(__name__)

MAX_WEIGHT = 4
Cell = Tuple[int, int]


# ---------------------------------------------------------------------------
# simplicial structure
# ---------------------------------------------------------------------------

def _is_bare(obj: Any) -> bool:
    if not isinstance(obj, PolyRMonomial) or len(obj.factors) != 1:
        return False
    factor, mult = obj.factors[0]
    return mult == 1 and not factor.word.letters


def is_degenerate(obj: Any, level: int) -> bool:
    """True if some layer of a level-``level`` monomial consists of bare arguments only."""
    layer = [obj]
    for _ in range(level):
        if all(_is_bare(item) for item in layer):
            return True
        layer = [factor.arg for item in layer for factor, _ in item.factors]
    return False


def augmentation(obj: PolyRMonomial) -> Dict[Any, int]:
    return {obj.factors[0][0].arg: 1} if _is_bare(obj) else {}


def face(i: int, level: int, obj: PolyRMonomial) -> Dict[Any, int]:
    """The face d_i of a level-``level`` basis monomial."""
    if i == 0 or level == 1:
        return augmentation(obj)
    if i == 1 and level > 1 and i < level:
        return polyR_monad_mult(obj)
    return polyR_functor(obj, lambda arg: face(i - 1, level - 1, arg))


def boundary(obj: Any, level: int) -> Dict[Any, int]:
    out: Dict[Any, int] = {}
    for i in range(level + 1):
        for term, coeff in face(i, level, obj).items():
            accumulate(out, term, coeff, 2)
    return out


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

@dataclass
class BarBlock:
    """The normalized complex in one (internal degree, weight) block."""
    degree: int
    weight: int
    bases: List[List[Any]] = field(default_factory=list)
    boundaries: List[Optional[SparseMatrixF2]] = field(default_factory=list)

    def dims(self) -> List[int]:
        return [len(basis) for basis in self.bases]

    def ranks(self) -> List[int]:
        """rank of ∂_s for s = 0..top (∂_0 = 0)."""
        return [0 if matrix is None else matrix.rank() for matrix in self.boundaries]

    def homology(self) -> List[int]:
        dims, ranks = self.dims(), self.ranks() + [0]
        return [dims[s] - ranks[s] - ranks[s + 1] for s in range(len(dims))]

    def boundary_squares_vanish(self) -> bool:
        products = []
        for s in range(2, len(self.boundaries)):
            lower, upper = self.boundaries[s - 1], self.boundaries[s]
            if lower is not None and upper is not None and lower.rows and upper.cols:
                products.append(product_gf2(lower.to_dense(), upper.to_dense()))
        return is_zero_gf2(products)


@dataclass
class BarComplex:
    gen_degree: int
    weight_cap: int
    degree_window: Tuple[int, int]
    blocks: Dict[Cell, BarBlock] = field(default_factory=dict)

    @property
    def top_level(self) -> int:
        return self.weight_cap - 1

    def level_basis(self, level: int, weight: Optional[int] = None) -> List[Any]:
        found = []
        for (_, w), block in sorted(self.blocks.items()):
            if (weight is None or w == weight) and level < len(block.bases):
                found.extend(block.bases[level])
        return found

    def boundary_squares_vanish(self) -> bool:
        return all(block.boundary_squares_vanish() for block in self.blocks.values())


def _arg_window(gen_degree: int, hi: int, weight_cap: int) -> Tuple[int, int]:
    # an argument of weight w has degree >= w * gen_degree, and at most the
    # degree of its factor once that is positive
    low = min(gen_degree, (weight_cap - 1) * gen_degree)
    return low, max(0, hi - min(0, (weight_cap - 1) * gen_degree))


def _level_objects(gen: PolyGenerator, level: int, window: Tuple[int, int], weight_cap: int,
                   arg_cap: int) -> List[Any]:
    """Basis of Poly_R^{∘level}(M) in a degree window, all layers below the top capped at arg_cap."""
    if level == 0:
        lo, hi = window
        return [gen] if lo <= gen.degree <= hi else []
    arg_window = _arg_window(gen.degree, window[1], weight_cap)
    args = _level_objects(gen, level - 1, arg_window, arg_cap, arg_cap)
    return polyR_monomials(args, window, weight_cap, 2)


def _check_memory(blocks: Dict[Cell, BarBlock]) -> None:
    budget = get_settings().mem_mb * 2 ** 20
    needed = 0
    for block in blocks.values():
        dims = block.dims()
        needed += sum(dims[s - 1] * dims[s] for s in range(1, len(dims)))
    if needed > budget:
        raise ResourceLimitExceeded(
            f"bar complex needs about {needed >> 20} MB of matrices; PARTITION_OPS_MEM_MB allows {budget >> 20} MB")


def build_bar_complex(gen_degree: int, weight_cap: int, degree_window: Tuple[int, int],
                      shuffle_seed: Optional[int] = None) -> BarComplex:
    """
    The normalized bar complex of the trivial algebra on x in degree
    ``gen_degree``, truncated to weight <= weight_cap. ``degree_window``
    bounds the total degree (internal degree + level) of the homology to be
    computed; every block that can reach it is assembled in full.

    Raises ValueError for weight caps outside 1..4 and ResourceLimitExceeded
    when the matrices would exceed PARTITION_OPS_MEM_MB.
    """
    if not 1 <= weight_cap <= MAX_WEIGHT:
        raise ValueError(f"bar oracle supports weight caps 1..{MAX_WEIGHT}, got {weight_cap}")
    lo, hi = degree_window
    complex_ = BarComplex(gen_degree, weight_cap, (lo, hi))
    if hi < lo:
        return complex_
    top = weight_cap - 1
    internal = (lo - top, hi)
    gen = PolyGenerator("x", gen_degree)
    rng = random.Random(shuffle_seed) if shuffle_seed is not None else None

    levels: List[List[Any]] = []
    for level in range(top + 1):
        objects = _level_objects(gen, level, internal, weight_cap, weight_cap - 1)
        chains = [obj for obj in objects if not is_degenerate(obj, level)]
        levels.append(chains)
        logger.debug("bar level %d: %d of %d monomials nondegenerate", level, len(chains), len(objects))

    blocks: Dict[Cell, BarBlock] = {}
    for level, chains in enumerate(levels):
        for obj in chains:
            cell = (obj.degree, obj.weight)
            block = blocks.setdefault(cell, BarBlock(obj.degree, obj.weight, [[] for _ in range(top + 1)]))
            block.bases[level].append(obj)
    if rng is not None:
        for cell in sorted(blocks):
            for basis in blocks[cell].bases:
                rng.shuffle(basis)
    _check_memory(blocks)

    for cell in sorted(blocks):
        block = blocks[cell]
        block.boundaries = [None]
        for level in range(1, top + 1):
            rows, cols = block.bases[level - 1], block.bases[level]
            index = {obj: k for k, obj in enumerate(rows)}
            matrix = SparseMatrixF2(len(rows), len(cols))
            for col, obj in enumerate(cols):
                for term in boundary(obj, level):
                    if term in index:
                        matrix.toggle(index[term], col)
                    elif not is_degenerate(term, level - 1):
                        raise RuntimeError(f"boundary term {term} of {obj} missing from level {level - 1}")
            block.boundaries.append(matrix)
    complex_.blocks = blocks
    logger.info("bar complex on degree %d, weight <= %d: %d blocks", gen_degree, weight_cap, len(blocks))
    return complex_


def homology_dims(complex_: BarComplex) -> DimTable:
    """Homology per (total degree, weight) cell inside the complex's window."""
    lo, hi = complex_.degree_window
    counts: Dict[Cell, int] = {}
    for (degree, weight), block in complex_.blocks.items():
        for level, dim in enumerate(block.homology()):
            total = degree + level
            if dim and lo <= total <= hi:
                counts[(total, weight)] = counts.get((total, weight), 0) + dim
    return DimTable(counts)


# ---------------------------------------------------------------------------
# comparison with the E² page
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellComparison:
    degree: int
    weight: int
    bar: int
    e2: int

    @property
    def equal(self) -> bool:
        return self.bar == self.e2


@dataclass
class E2Comparison:
    j: int
    weight_cap: int
    degree_window: Tuple[int, int]
    cells: List[CellComparison] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(cell.equal for cell in self.cells)

    def mismatches(self) -> List[CellComparison]:
        return [cell for cell in self.cells if not cell.equal]

    def rows(self) -> List[Dict[str, Any]]:
        return [{"degree": c.degree, "weight": c.weight, "bar": c.bar, "e2": c.e2, "equal": c.equal}
                for c in self.cells]


def e2_dims(j: int, weight_cap: int, degree_window: Tuple[int, int]) -> DimTable:
    """Counts of the full-variant unstable Ext basis per (total degree, weight)."""
    filtration_cap = int(math.log2(weight_cap))
    words = unstable_ext_basis(j, "full", filtration_cap, degree_window, p=2)
    counts: Dict[Cell, int] = {}
    for word in words:
        cell = (word.target_total, word.weight)
        counts[cell] = counts.get(cell, 0) + 1
    return DimTable(counts)


def compare_with_E2(j: int, weight_cap: int = MAX_WEIGHT,
                    degree_window: Optional[Tuple[int, int]] = None) -> E2Comparison:
    """
    Compare the linear dual of the bar homology on a class of degree -j with
    the E² counts on a class of degree j, cell by cell. The window is in the
    dual (cohomological) total degree and defaults to (j - 22, j + 1).
    """
    lo, hi = degree_window if degree_window is not None else (j - 22, j + 1)
    complex_ = build_bar_complex(-j, weight_cap, (-hi, -lo))
    bar = homology_dims(complex_)
    e2 = e2_dims(j, weight_cap, (lo, hi))
    report = E2Comparison(j, weight_cap, (lo, hi))
    for degree in range(hi, lo - 1, -1):
        for weight in range(1, weight_cap + 1):
            cell = CellComparison(degree, weight, bar[(-degree, weight)], e2[(degree, weight)])
            report.cells.append(cell)
            if not cell.equal:
                logger.warning("bar/E2 mismatch at degree %d weight %d: bar %d, E2 %d",
                               degree, weight, cell.bar, cell.e2)
    logger.info("bar vs E2 for j=%d, W=%d: %d cells, %d mismatches",
                j, weight_cap, len(report.cells), len(report.mismatches()))
    return report
