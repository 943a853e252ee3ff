"""
Free shifted restricted Lie algebras over F_p on a Lyndon basis.

Elements are computed inside the tensor algebra on the generators: a word
of letters x_{i1}...x_{in} has degree Σ(|x_i| - 1) + 1, the bracket is the
twisted commutator

    [a, b] = (-1)^{|a|(|b|+1)} (ab - (-1)^{(|a|-1)(|b|-1)} ba),

which satisfies [a, b] = (-1)^{|a||b|}[b, a] and the graded Jacobi identity,
and the restriction of an odd-degree class (any class at p = 2) is its p-th
power. Results are read back in the basis

    P(w)                 standard bracketing of a Lyndon word w
    [P(w), P(w)]         w of even degree, odd p
    ...^{[p]^e}          iterated restrictions of odd-degree basis elements

by peeling off the smallest word, which is the leading word of exactly one
basis element.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from src.algebra.dyer_lashof import generator_names
from src.algebra.errors import DegreeMismatchError, MixedPrimeError, RestrictionUndefined
from src.algebra.fp_core import accumulate, add_scaled, check_prime, inverse_mod

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]
Poly = Dict[Word, int]


# ---------------------------------------------------------------------------
# Lyndon words
# ---------------------------------------------------------------------------

def is_lyndon(word: Sequence[int]) -> bool:
    """Strictly smaller than all of its proper rotations."""
    word = tuple(word)
    if not word:
        return False
    return all(word < word[i:] + word[:i] for i in range(1, len(word)))


def lyndon_words(alphabet_size: int, max_length: int) -> List[Word]:
    """All Lyndon words of length <= max_length, sorted by (length, word)."""
    if alphabet_size < 1 or max_length < 1:
        return []
    found: List[Word] = []
    w = [-1]
    while w:
        w[-1] += 1
        found.append(tuple(w))
        m = len(w)
        while len(w) < max_length:
            w.append(w[-m])
        while w and w[-1] == alphabet_size - 1:
            w.pop()
    found.sort(key=lambda word: (len(word), word))
    return found


def standard_factorization(word: Word) -> Tuple[Word, Word]:
    """w = uv with v the longest proper Lyndon suffix."""
    for i in range(1, len(word)):
        if is_lyndon(word[i:]):
            return word[:i], word[i:]
    raise ValueError(f"{word} has no standard factorization")


def primitive_root(word: Word) -> Tuple[Word, int]:
    n = len(word)
    for period in range(1, n + 1):
        if n % period == 0 and word[:period] * (n // period) == word:
            return word[:period], n // period
    raise ValueError("empty word")


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class LieSymbol:
    """A basis element: P(word), optionally squared, then restricted ``restriction`` times."""
    word: Word
    restriction: int = 0
    square: bool = False


@dataclass(frozen=True)
class LieElement:
    """An F_p-combination of basis symbols."""
    p: int
    terms: Tuple[Tuple[LieSymbol, int], ...] = ()

    @classmethod
    def from_dict(cls, p: int, terms: Mapping[LieSymbol, int]) -> "LieElement":
        reduced = {sym: c % p for sym, c in terms.items() if c % p}
        return cls(p, tuple(sorted(reduced.items())))

    def as_dict(self) -> Dict[LieSymbol, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def symbols(self) -> List[LieSymbol]:
        return [sym for sym, _ in self.terms]

    def scaled(self, factor: int) -> "LieElement":
        return LieElement.from_dict(self.p, {sym: c * factor for sym, c in self.terms})

    def __add__(self, other: "LieElement") -> "LieElement":
        if self.p != other.p:
            raise MixedPrimeError(f"cannot add elements over F_{self.p} and F_{other.p}")
        merged = self.as_dict()
        add_scaled(merged, other.as_dict(), 1, self.p)
        return LieElement.from_dict(self.p, merged)

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + other.scaled(-1)


# ---------------------------------------------------------------------------
# the algebra
# ---------------------------------------------------------------------------

@dataclass
class FreeShiftedLie:
    """
    The free shifted restricted Lie algebra over F_p on generators of the
    given degrees. At p = 3 the relation [x, [x, x]] = 0 holds automatically
    in the tensor algebra.
    """
    p: int
    gen_degrees: Tuple[int, ...]
    names: Optional[Tuple[str, ...]] = None
    _expansions: Dict[LieSymbol, Poly] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        check_prime(self.p)
        self.gen_degrees = tuple(self.gen_degrees)
        if self.names is None:
            self.names = tuple(generator_names(len(self.gen_degrees)))

    # -- degrees -----------------------------------------------------------

    def word_degree(self, word: Word) -> int:
        return sum(self.gen_degrees[i] - 1 for i in word) + 1

    def symbol_degree(self, sym: LieSymbol) -> int:
        d = self.word_degree(sym.word)
        if sym.square:
            d = 2 * d - 1
        for _ in range(sym.restriction):
            d = self.p * d - self.p + 1
        return d

    def symbol_weight(self, sym: LieSymbol) -> int:
        return len(sym.word) * self.p ** sym.restriction * (2 if sym.square else 1)

    def degrees_of(self, elem: LieElement) -> List[int]:
        return sorted({self.symbol_degree(sym) for sym in elem.symbols()})

    def lyndon_basis(self, weight_cap: int) -> List[Tuple[Word, int]]:
        """Lyndon words of length <= weight_cap with their degrees."""
        return [(w, self.word_degree(w)) for w in lyndon_words(len(self.gen_degrees), weight_cap)]

    def format_symbol(self, sym: LieSymbol) -> str:
        text = "".join(self.names[i] for i in sym.word)
        if sym.square:
            text = f"[{text},{text}]"
        if sym.restriction:
            text = f"{text}^[{self.p ** sym.restriction}]"
        return text

    def format(self, elem: LieElement) -> str:
        if elem.is_zero():
            return "0"
        parts = []
        for sym, c in elem.terms:
            text = self.format_symbol(sym)
            parts.append(text if c == 1 else f"{c} {text}")
        return " + ".join(parts)

    # -- constructors ------------------------------------------------------

    def generator(self, index: int) -> LieElement:
        return self.element(LieSymbol((index,)))

    def element(self, sym: LieSymbol, coeff: int = 1) -> LieElement:
        return LieElement.from_dict(self.p, {sym: coeff})

    def zero(self) -> LieElement:
        return LieElement(self.p)

    # -- tensor algebra ----------------------------------------------------

    def _twisted_commutator(self, f: Mapping[Word, int], g: Mapping[Word, int]) -> Poly:
        out: Poly = {}
        for a, ca in f.items():
            da = self.word_degree(a)
            for b, cb in g.items():
                db = self.word_degree(b)
                twist = -1 if (da * (db + 1)) % 2 else 1
                swap = -1 if ((da - 1) * (db - 1)) % 2 else 1
                accumulate(out, a + b, twist * ca * cb, self.p)
                accumulate(out, b + a, -twist * swap * ca * cb, self.p)
        return out

    def _product(self, f: Mapping[Word, int], g: Mapping[Word, int]) -> Poly:
        out: Poly = {}
        for a, ca in f.items():
            for b, cb in g.items():
                accumulate(out, a + b, ca * cb, self.p)
        return out

    def tensor_power(self, f: Mapping[Word, int], n: int) -> Poly:
        result: Poly = dict(f)
        for _ in range(n - 1):
            result = self._product(result, f)
        return result

    def expand(self, sym: LieSymbol) -> Poly:
        """The image of a basis symbol in the tensor algebra."""
        cached = self._expansions.get(sym)
        if cached is not None:
            return cached
        if sym.restriction:
            base = self.expand(LieSymbol(sym.word, sym.restriction - 1, sym.square))
            poly = self.tensor_power(base, self.p)
        elif sym.square:
            base = self.expand(LieSymbol(sym.word))
            poly = self._twisted_commutator(base, base)
        elif len(sym.word) == 1:
            poly = {sym.word: 1}
        else:
            u, v = standard_factorization(sym.word)
            poly = self._twisted_commutator(self.expand(LieSymbol(u)), self.expand(LieSymbol(v)))
        self._expansions[sym] = poly
        return poly

    def to_tensor(self, elem: LieElement) -> Poly:
        out: Poly = {}
        for sym, c in elem.terms:
            add_scaled(out, self.expand(sym), c, self.p)
        return out

    def _symbol_leading(self, word: Word) -> LieSymbol:
        root, k = primitive_root(word)
        if not is_lyndon(root):
            raise ValueError(f"{word} is not the leading word of a Lie element")
        square = False
        if self.p != 2 and self.word_degree(root) % 2 == 0 and k % 2 == 0:
            square, k = True, k // 2
        e = 0
        while k % self.p == 0:
            k //= self.p
            e += 1
        if k != 1:
            raise ValueError(f"{word} is not the leading word of a Lie element")
        return LieSymbol(root, e, square)

    def from_tensor(self, poly: Mapping[Word, int]) -> LieElement:
        """Read a Lie polynomial back in the basis."""
        remaining: Poly = {w: c % self.p for w, c in poly.items() if c % self.p}
        out: Dict[LieSymbol, int] = {}
        while remaining:
            word = min(remaining, key=lambda w: (len(w), w))
            sym = self._symbol_leading(word)
            expansion = self.expand(sym)
            c = remaining[word] * inverse_mod(expansion[word], self.p)
            add_scaled(remaining, expansion, -c, self.p)
            accumulate(out, sym, c, self.p)
        return LieElement.from_dict(self.p, out)

    # -- structure maps ----------------------------------------------------

    def bracket(self, u: LieElement, v: LieElement) -> LieElement:
        """The shifted bracket, of degree |u| + |v| - 1."""
        return self.from_tensor(self._twisted_commutator(self.to_tensor(u), self.to_tensor(v)))

    def ad_power(self, x: LieElement, y: LieElement, n: int) -> LieElement:
        """[[...[y, x], x]..., x] with n brackets."""
        if n < 0:
            raise ValueError(f"n must be non-negative, got {n}")
        result = y
        for _ in range(n):
            result = self.bracket(result, x)
        return result

    def _check_restrictable(self, elem: LieElement) -> None:
        if self.p == 2:
            return
        for sym in elem.symbols():
            if self.symbol_degree(sym) % 2 == 0:
                raise RestrictionUndefined(
                    f"{self.format_symbol(sym)} has even degree {self.symbol_degree(sym)} at p={self.p}")

    def restriction(self, elem: LieElement) -> LieElement:
        """x^{[p]}, computed as the p-th power in the tensor algebra."""
        self._check_restrictable(elem)
        if elem.is_zero():
            return elem
        return self.from_tensor(self.tensor_power(self.to_tensor(elem), self.p))

    def restriction_expand(self, elem: LieElement) -> LieElement:
        """
        x^{[p]} without the tensor algebra. A basis symbol c·P lifts to
        c·P^{[p]} (c^p = c); a sum u + v expands as
        u^{[p]} + v^{[p]} + Σ_i s_i(u, v) / i, peeling one symbol at a time.
        """
        self._check_restrictable(elem)
        if len(self.degrees_of(elem)) > 1:
            raise DegreeMismatchError(f"restriction of an inhomogeneous element: {self.format(elem)}")
        if elem.is_zero():
            return elem
        (sym, c), rest = elem.terms[0], elem.terms[1:]
        head = self.element(LieSymbol(sym.word, sym.restriction + 1, sym.square), c)
        if not rest:
            return head
        u = self.element(sym, c)
        v = LieElement(self.p, rest)
        total = head + self.restriction_expand(v)
        for i, s in enumerate(self.s_coefficients(u, v), start=1):
            total = total + s.scaled(inverse_mod(i, self.p))
        return total

    def s_coefficients(self, x: LieElement, y: LieElement) -> List[LieElement]:
        """
        s_1, ..., s_{p-1}: s_i is the coefficient of t^{i-1} in
        ad(tx + y)^{p-1}(x), so that
        (x + y)^{[p]} = x^{[p]} + y^{[p]} + Σ_i s_i / i.
        """
        by_power: Dict[int, LieElement] = {0: x}
        for _ in range(self.p - 1):
            step: Dict[int, LieElement] = {}
            for k, term in by_power.items():
                step[k] = step.get(k, self.zero()) + self.bracket(term, y)
                step[k + 1] = step.get(k + 1, self.zero()) + self.bracket(term, x)
            by_power = step
        return [by_power.get(i - 1, self.zero()) for i in range(1, self.p)]

    def polarized_restriction(self, xs: Sequence[LieElement]) -> LieElement:
        """Σ over σ with σ(1) = 1 of [[...[x_σ(1), x_σ(2)], ...], x_σ(p)]."""
        if len(xs) != self.p:
            raise ValueError(f"polarized restriction takes {self.p} arguments, got {len(xs)}")
        for x in xs:
            self._check_restrictable(x)
        total = self.zero()
        for tail in itertools.permutations(range(1, self.p)):
            nested = xs[0]
            for i in tail:
                nested = self.bracket(nested, xs[i])
            total = total + nested
        return total


def iter_multilinear(poly: Mapping[Word, int], letters: Sequence[int]) -> Iterator[Tuple[Word, int]]:
    """Terms of a tensor polynomial using each of the given letters exactly once."""
    wanted = sorted(letters)
    for word, c in poly.items():
        if sorted(word) == wanted:
            yield word, c
