"""
Free algebras over the power ring with a compatible shifted restricted Lie
structure.

A basis element is an admissible R-word applied to the standard bracketing
of a Lyndon word. Restriction iterates are not separate symbols: x^{[p]} is
the bottom letter on x, so the restricted Lie part of the basis is exactly
the elements whose word is a chain of bottom letters (optionally ending in
the self-bracket B at odd p).

The reference basis indexed by sequences (i_1, ..., i_k; e; w) is built
independently in ``bm_basis``; the two must agree cell by cell.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from src.algebra.dyer_lashof import generator_names
from src.algebra.errors import DegreeMismatchError, MixedPrimeError, RestrictionUndefined
from src.algebra.fp_core import accumulate, add_scaled, check_prime, inverse_mod
from src.algebra.power_ring import PowerOp, RWord, compose, normalize_rword, op_basis, r_bottom
from src.lie.shifted_lie import FreeShiftedLie, LieElement, LieSymbol, Word, lyndon_words
from src.utils.output import DimTable

logger = logging.getLogger(__name__)

DegreeWindow = Tuple[int, Optional[int]]


@dataclass(frozen=True, order=True)
class FreeBasisElement:
    """α(P(w)): an admissible R-word on a Lyndon word."""
    op: RWord
    word: Word
    degree: int
    weight: int


@dataclass(frozen=True, order=True)
class BMSequence:
    """
    (i_1, ..., i_k; e; w) with i_1 outermost. Each i is 0 or 1 mod 2(p-1),
    i_j < p i_{j+1}, and i_k is capped by the degree of w.
    """
    indices: Tuple[int, ...]
    e: int
    word: Word
    degree: int
    weight: int


FreeSum = Dict[FreeBasisElement, int]


def _in_window(degree: int, window: DegreeWindow) -> bool:
    lo, hi = window
    return lo <= degree and (hi is None or degree <= hi)


def _max_letters(p: int, base_weight: int, weight_cap: int) -> int:
    k = 0
    while base_weight * p ** (k + 1) <= weight_cap:
        k += 1
    return k


# ---------------------------------------------------------------------------
# sequence basis
# ---------------------------------------------------------------------------

def _largest_valid_index(p: int, n: int) -> int:
    modulus = 2 * (p - 1)
    while n % modulus not in (0, 1):
        n -= 1
    return n


def _bm_max_reachable(p: int, degree: int, last: int, letters_left: int) -> int:
    best = degree
    for _ in range(letters_left):
        last = _largest_valid_index(p, p * last - 1)
        degree += last - 1
        best = max(best, degree)
    return best


def _bm_sequences(p: int, base: int, bound: int, cap: int,
                  window: DegreeWindow) -> List[Tuple[Tuple[int, ...], int]]:
    lo = window[0]
    found: List[Tuple[Tuple[int, ...], int]] = []

    def visit(inner_first: List[int], degree: int) -> None:
        if _in_window(degree, window):
            found.append((tuple(reversed(inner_first)), degree))
        if len(inner_first) == cap:
            return
        upper = bound if not inner_first else p * inner_first[-1] - 1
        left = cap - len(inner_first) - 1
        index = _largest_valid_index(p, upper)
        while _bm_max_reachable(p, degree + index - 1, index, left) >= lo:
            visit(inner_first + [index], degree + index - 1)
            index = _largest_valid_index(p, index - 1)

    visit([], base)
    return found


def bm_basis(gen_degrees: Sequence[int], p: int, degree_window: DegreeWindow,
             weight_cap: int) -> List[BMSequence]:
    """Every valid sequence whose degree lies in the window and weight is at most the cap."""
    check_prime(p)
    gen_degrees = tuple(gen_degrees)
    lie = FreeShiftedLie(p, gen_degrees)
    out: List[BMSequence] = []
    for word in lyndon_words(len(gen_degrees), weight_cap):
        d = lie.word_degree(word)
        iota = 1 if p != 2 and d % 2 == 0 else 0
        for e in sorted({0, iota}):
            base_weight = len(word) * (1 + e)
            if base_weight > weight_cap:
                continue
            cap = _max_letters(p, base_weight, weight_cap)
            base = (1 + e) * d - e
            bound = (p - 1) * (1 + e) * d - iota
            for indices, degree in _bm_sequences(p, base, bound, cap, degree_window):
                out.append(BMSequence(indices, e, word, degree, base_weight * p ** len(indices)))
    out.sort(key=lambda s: (s.weight, -s.degree, s.word, s.e, s.indices))
    logger.debug("bm_basis(p=%d, gens=%s): %d sequences", p, gen_degrees, len(out))
    return out


# ---------------------------------------------------------------------------
# the free algebra
# ---------------------------------------------------------------------------

@dataclass
class FreePartitionLie:
    """
    The free algebra on generators of the given degrees. ``units`` holds the
    scalar λ_t with x^{[p]} = λ_t · (bottom letter)(x) on degree t; missing
    degrees use 1. A Lie symbol restricted k times therefore matches its
    bottom chain scaled by the product of the λ's along the chain.
    """
    p: int
    gen_degrees: Tuple[int, ...]
    names: Optional[Tuple[str, ...]] = None
    units: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        check_prime(self.p)
        self.gen_degrees = tuple(self.gen_degrees)
        if self.names is None:
            self.names = tuple(generator_names(len(self.gen_degrees)))
        self.lie = FreeShiftedLie(self.p, self.gen_degrees, self.names)
        self.units = dict(self.units)
        for degree, unit in self.units.items():
            if unit % self.p == 0:
                raise ValueError(f"λ_{degree} = {unit} is not a unit mod {self.p}")

    # -- elements ----------------------------------------------------------

    def element(self, op: RWord, word: Word) -> FreeBasisElement:
        word = tuple(word)
        if op.p != self.p:
            raise MixedPrimeError(f"R-word over p={op.p} in an algebra over p={self.p}")
        d = self.lie.word_degree(word)
        if op.bracket and (self.p == 2 or d % 2):
            raise DegreeMismatchError(f"B needs an even-degree class at odd p, got degree {d}")
        return FreeBasisElement(op, word, op.target(d), len(word) * op.weight)

    def generator(self, index: int) -> FreeBasisElement:
        return self.element(RWord(self.p), (index,))

    def as_sum(self, elem: FreeBasisElement, coeff: int = 1) -> FreeSum:
        return {elem: coeff % self.p} if coeff % self.p else {}

    def add(self, *sums: Mapping[FreeBasisElement, int]) -> FreeSum:
        out: FreeSum = {}
        for s in sums:
            add_scaled(out, s, 1, self.p)
        return out

    def scale(self, s: Mapping[FreeBasisElement, int], factor: int) -> FreeSum:
        out: FreeSum = {}
        add_scaled(out, s, factor, self.p)
        return out

    def format_element(self, elem: FreeBasisElement) -> str:
        text = "".join(self.names[i] for i in elem.word)
        if elem.op.is_identity:
            return text
        return f"{elem.op}({text})"

    def format(self, s: Mapping[FreeBasisElement, int]) -> str:
        if not s:
            return "0"
        parts = []
        for elem in sorted(s, key=lambda e: (e.weight, -e.degree, e)):
            c = s[elem]
            text = self.format_element(elem)
            parts.append(text if c == 1 else f"{c} {text}")
        return " + ".join(parts)

    def rows(self, items: Union[Iterable[FreeBasisElement], Mapping[FreeBasisElement, int]]) -> List[dict]:
        """Output rows; a mapping carries its coefficients along."""
        if isinstance(items, Mapping):
            return [{"word": self.format_element(e), "degree": e.degree, "weight": e.weight, "coeff": c}
                    for e, c in sorted(items.items(), key=lambda kv: (kv[0].weight, -kv[0].degree, kv[0]))]
        return [{"word": self.format_element(e), "degree": e.degree, "weight": e.weight} for e in items]

    # -- basis -------------------------------------------------------------

    def basis(self, degree_window: DegreeWindow, weight_cap: int) -> List[FreeBasisElement]:
        out: List[FreeBasisElement] = []
        for word in lyndon_words(len(self.gen_degrees), weight_cap):
            d = self.lie.word_degree(word)
            cap = _max_letters(self.p, len(word), weight_cap)
            for op in op_basis(d, cap, degree_window, self.p):
                if len(word) * op.weight <= weight_cap:
                    out.append(self.element(op, word))
        out.sort(key=lambda e: (e.weight, -e.degree, e.word, e.op))
        logger.debug("free basis(p=%d, gens=%s): %d elements", self.p, self.gen_degrees, len(out))
        return out

    # -- operations --------------------------------------------------------

    def op_of(self, elem: FreeBasisElement) -> PowerOp:
        """The operation part of a basis element, as an element of the power ring."""
        d = self.lie.word_degree(elem.word)
        if elem.op.is_identity:
            return PowerOp.unit(self.p, d)
        return normalize_rword(self.p, elem.op, d)

    def apply_op(self, op: PowerOp, elem: FreeBasisElement) -> FreeSum:
        """op(α(w)) = (op ∘ α)(w), re-normalized in the power ring."""
        if op.p != self.p:
            raise MixedPrimeError(f"operation over p={op.p} applied in an algebra over p={self.p}")
        if op.source != elem.degree:
            raise DegreeMismatchError(
                f"operation starts in degree {op.source} but {self.format_element(elem)} has degree {elem.degree}")
        result = compose(op, self.op_of(elem))
        out: FreeSum = {}
        for word, c in result.as_rwords().items():
            accumulate(out, self.element(word, elem.word), c, self.p)
        return out

    def apply_sum(self, op: PowerOp, s: Mapping[FreeBasisElement, int]) -> FreeSum:
        out: FreeSum = {}
        for elem, c in s.items():
            add_scaled(out, self.apply_op(op, elem), c, self.p)
        return out

    # -- restricted Lie structure -----------------------------------------

    def _bottom_chain(self, start: int, length: int) -> Tuple[Tuple[int, int], ...]:
        inner_first = []
        total = start
        for _ in range(length):
            letter = r_bottom(self.p, total)
            if letter is None:
                raise RestrictionUndefined(f"degree {total} at p={self.p}")
            inner_first.append(letter)
            total = total * self.p - self.p + 1
        return tuple(reversed(inner_first))

    def _chain_start(self, word: Word, square: bool) -> int:
        d = self.lie.word_degree(word)
        return 2 * d - 1 if square else d

    def chain_unit(self, sym: LieSymbol) -> int:
        """Product of λ_t over the degrees t the restrictions of ``sym`` start from."""
        unit, total = 1, self._chain_start(sym.word, sym.square)
        for _ in range(sym.restriction):
            unit = unit * self.units.get(total, 1) % self.p
            total = total * self.p - self.p + 1
        return unit

    def lie_symbol(self, elem: FreeBasisElement) -> Optional[LieSymbol]:
        """
        The restricted Lie symbol whose bottom chain is ``elem``, or None.
        ``elem`` equals the symbol divided by its chain unit.
        """
        start = self._chain_start(elem.word, elem.op.bracket)
        if elem.op.letters != self._chain_or_none(start, elem.op.length):
            return None
        return LieSymbol(elem.word, elem.op.length, elem.op.bracket)

    def to_lie(self, elem: FreeBasisElement) -> Optional[LieElement]:
        sym = self.lie_symbol(elem)
        if sym is None:
            return None
        return self.lie.element(sym, inverse_mod(self.chain_unit(sym), self.p))

    def _chain_or_none(self, start: int, length: int) -> Optional[Tuple[Tuple[int, int], ...]]:
        try:
            return self._bottom_chain(start, length)
        except RestrictionUndefined:
            return None

    def from_lie(self, elem: LieElement) -> FreeSum:
        out: FreeSum = {}
        for sym, c in elem.terms:
            start = self._chain_start(sym.word, sym.square)
            op = RWord(self.p, self._bottom_chain(start, sym.restriction), sym.square)
            accumulate(out, self.element(op, sym.word), c * self.chain_unit(sym), self.p)
        return out

    def bracket_eval(self, a: Mapping[FreeBasisElement, int],
                     b: Mapping[FreeBasisElement, int]) -> FreeSum:
        """
        Bilinear extension of the bracket. Elements carrying a positive-weight
        operation that is not an iterated restriction bracket to zero.
        """
        out: FreeSum = {}
        for left, ca in a.items():
            u = self.to_lie(left)
            if u is None:
                continue
            for right, cb in b.items():
                v = self.to_lie(right)
                if v is None:
                    continue
                product = self.lie.bracket(u, v)
                add_scaled(out, self.from_lie(product), ca * cb, self.p)
        return out

    def _restrict_term(self, elem: FreeBasisElement, coeff: int) -> FreeSum:
        bottom = PowerOp.letter(self.p, elem.degree, r_bottom(self.p, elem.degree))
        unit = self.units.get(elem.degree, 1)
        return self.scale(self.apply_op(bottom, elem), pow(coeff, self.p, self.p) * unit)

    def s_coefficients(self, x: Mapping[FreeBasisElement, int],
                       y: Mapping[FreeBasisElement, int]) -> List[FreeSum]:
        """s_i(x, y): the coefficient of t^{i-1} in ad(tx + y)^{p-1}(x)."""
        by_power: Dict[int, FreeSum] = {0: dict(x)}
        for _ in range(self.p - 1):
            step: Dict[int, FreeSum] = {}
            for k, term in by_power.items():
                step[k] = self.add(step.get(k, {}), self.bracket_eval(term, y))
                step[k + 1] = self.add(step.get(k + 1, {}), self.bracket_eval(term, x))
            by_power = step
        return [by_power.get(i - 1, {}) for i in range(1, self.p)]

    def restriction_eval(self, s: Mapping[FreeBasisElement, int]) -> FreeSum:
        """
        x^{[p]} on a sum: λ times the bottom letter on each term, plus the
        cross terms Σ s_i/i. At odd p every term needs odd degree.
        """
        if self.p != 2:
            for elem in s:
                if elem.degree % 2 == 0:
                    raise RestrictionUndefined(
                        f"{self.format_element(elem)} has even degree {elem.degree} at p={self.p}")
        out: FreeSum = {}
        partial: FreeSum = {}
        for elem, c in sorted(s.items()):
            if not c % self.p:
                continue
            term = self.as_sum(elem, c)
            out = self.add(out, self._restrict_term(elem, c))
            if partial:
                for i, cross in enumerate(self.s_coefficients(partial, term), start=1):
                    add_scaled(out, cross, inverse_mod(i, self.p), self.p)
            partial = self.add(partial, term)
        return out


def free_basis(gen_degrees: Sequence[int], p: int, degree_window: DegreeWindow,
               weight_cap: int) -> List[FreeBasisElement]:
    return FreePartitionLie(p, tuple(gen_degrees)).basis(degree_window, weight_cap)


def dims(basis: Iterable[Union[FreeBasisElement, BMSequence]]) -> DimTable:
    return DimTable.from_items(basis)
