"""
The primal mod-p Dyer-Lashof algebra.

Words in the operations Q^i (β^ε Q^i at odd p), Adem rewriting to the
admissible basis, unstability on a class, and the free Poly_R-algebra on
graded generators together with its monad multiplication (p = 2).

Words are stored outermost letter first, so ``Q^5 Q^1`` applies Q^1 first.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import (Any, Callable, Dict, Iterable, List, Mapping, NamedTuple,
                    Optional, Sequence, Tuple, Union)

from src.algebra.errors import UnsupportedPrimeError
from src.algebra.fp_core import accumulate, add_scaled, binom_mod, check_prime, sign
from src.algebra.rewriting import normalize, pick_pair, splice

logger = logging.getLogger(__name__)


class PrimalLetter(NamedTuple):
    """β^bockstein Q^index; the Bockstein is always 0 at p = 2."""
    bockstein: int
    index: int


def letter_degree(p: int, letter: PrimalLetter) -> int:
    if p == 2:
        return letter.index
    return 2 * (p - 1) * letter.index - letter.bockstein


def _as_letter(p: int, raw) -> PrimalLetter:
    if isinstance(raw, PrimalLetter):
        letter = raw
    elif isinstance(raw, int):
        letter = PrimalLetter(0, raw)
    else:
        letter = PrimalLetter(int(raw[0]), int(raw[1]))
    if letter.bockstein not in (0, 1) or (p == 2 and letter.bockstein):
        raise ValueError(f"invalid Dyer-Lashof letter {raw!r} at p={p}")
    return letter


@dataclass(frozen=True, order=True)
class PrimalWord:
    """A word of Dyer-Lashof operations, outermost letter first."""
    p: int
    letters: Tuple[PrimalLetter, ...] = ()

    @classmethod
    def of(cls, p: int, letters: Iterable = ()) -> "PrimalWord":
        """Build from ints (p = 2) or (ε, i) pairs."""
        check_prime(p)
        return cls(p, tuple(_as_letter(p, raw) for raw in letters))

    @property
    def length(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return self.p ** len(self.letters)

    @property
    def degree(self) -> int:
        return sum(letter_degree(self.p, letter) for letter in self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(("b" if e else "") + f"Q{i}" for e, i in self.letters)


def is_admissible_pair(p: int, outer: PrimalLetter, inner: PrimalLetter) -> bool:
    if p == 2:
        return outer.index <= 2 * inner.index
    return outer.index <= p * inner.index - inner.bockstein


def is_admissible_primal(word: PrimalWord) -> bool:
    letters = word.letters
    return all(is_admissible_pair(word.p, letters[k], letters[k + 1])
               for k in range(len(letters) - 1))


@lru_cache(maxsize=None)
def primal_pair_expansion(p: int, outer: PrimalLetter,
                          inner: PrimalLetter) -> Dict[Tuple[PrimalLetter, ...], int]:
    """
    Adem relation for one inadmissible pair, as {(outer', inner'): coeff}.

    p = 2, r > 2s:
        Q^r Q^s = Σ_i binom(i-s-1, 2i-r) Q^{r+s-i} Q^i
    odd p, r > ps:
        β^ε Q^r Q^s = Σ_i (-1)^{r+i} binom((p-1)(i-s)-1, pi-r) β^ε Q^{r+s-i} Q^i
    odd p, r >= ps:
        β^ε Q^r βQ^s = Σ_i (-1)^{r+i} binom((p-1)(i-s), pi-r) β^ε β Q^{r+s-i} Q^i
                     - Σ_i (-1)^{r+i} binom((p-1)(i-s)-1, pi-r-1) β^ε Q^{r+s-i} βQ^i
    """
    r, s = outer.index, inner.index
    out: Dict[Tuple[PrimalLetter, ...], int] = {}
    if p == 2:
        for i in range(-(-r // 2), r - s + 1):
            coeff = binom_mod(i - s - 1, 2 * i - r, 2)
            if coeff:
                accumulate(out, (PrimalLetter(0, r + s - i), PrimalLetter(0, i)), coeff, 2)
        return out

    eps = outer.bockstein
    low = -(-r // p)
    high = r - (p - 1) * s
    for i in range(low, high + 1):
        sgn = sign(r + i)
        if not inner.bockstein:
            coeff = binom_mod((p - 1) * (i - s) - 1, p * i - r, p)
            if coeff:
                accumulate(out, (PrimalLetter(eps, r + s - i), PrimalLetter(0, i)), sgn * coeff, p)
            continue
        if not eps:
            coeff = binom_mod((p - 1) * (i - s), p * i - r, p)
            if coeff:
                accumulate(out, (PrimalLetter(1, r + s - i), PrimalLetter(0, i)), sgn * coeff, p)
        coeff = binom_mod((p - 1) * (i - s) - 1, p * i - r - 1, p)
        if coeff:
            accumulate(out, (PrimalLetter(eps, r + s - i), PrimalLetter(1, i)), -sgn * coeff, p)
    return out


def _primal_step(p: int, strategy: str) -> Callable[[Tuple[PrimalLetter, ...]], Optional[Dict]]:
    def step(letters: Tuple[PrimalLetter, ...]):
        bad = [k for k in range(len(letters) - 1)
               if not is_admissible_pair(p, letters[k], letters[k + 1])]
        position = pick_pair(bad, strategy)
        if position is None:
            return None
        expansion = primal_pair_expansion(p, letters[position], letters[position + 1])
        return splice(letters, position, expansion)
    return step


def primal_adem_rewrite(word: PrimalWord, strategy: str = "leftmost") -> Dict[PrimalWord, int]:
    """
    Expand a word in the admissible basis.

    Example:
        >>> primal_adem_rewrite(PrimalWord.of(2, [5, 1]))
        {PrimalWord(p=2, letters=(PrimalLetter(bockstein=0, index=3), PrimalLetter(bockstein=0, index=3))): 1}
    """
    p = word.p
    normal = normalize({word.letters: 1}, _primal_step(p, strategy), p, label="primal adem")
    return {PrimalWord(p, letters): coeff for letters, coeff in normal.items()}


def rewrite_combination(terms: Mapping[PrimalWord, int], p: int,
                        strategy: str = "leftmost") -> Dict[PrimalWord, int]:
    out: Dict[PrimalWord, int] = {}
    for word, coeff in terms.items():
        add_scaled(out, primal_adem_rewrite(word, strategy), coeff, p)
    return out


# ---------------------------------------------------------------------------
# Poly_R monomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyGenerator:
    """A named generator of the free Poly_R-algebra."""
    name: str
    degree: int
    weight: int = 1

    def sort_key(self) -> tuple:
        return (0, self.name, self.degree)

    def __str__(self) -> str:
        return self.name


class PolyRFactor(NamedTuple):
    """Q^K applied to an argument (a generator, or any object with degree/weight/sort_key)."""
    word: PrimalWord
    arg: Any

    @property
    def degree(self) -> int:
        return self.word.degree + self.arg.degree

    @property
    def weight(self) -> int:
        return self.word.weight * self.arg.weight

    def sort_key(self) -> tuple:
        return (tuple(self.word.letters), self.arg.sort_key())

    def __str__(self) -> str:
        arg = str(self.arg)
        if isinstance(self.arg, PolyRMonomial) and len(self.arg.expanded()) > 1:
            arg = f"({arg})"
        return arg if not self.word.letters else f"{self.word} {arg}"


@dataclass(frozen=True)
class PolyRMonomial:
    """
    A commutative monomial in factors Q^K(arg), stored as sorted
    (factor, multiplicity) pairs. The bottom operation never appears inside
    a factor: Q^{|x|} x is stored as the factor x with multiplicity p.
    """
    p: int
    factors: Tuple[Tuple[PolyRFactor, int], ...]
    _hash: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.p, self.factors)))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def from_factors(cls, p: int, factors: Sequence[PolyRFactor]) -> Optional[Tuple[int, "PolyRMonomial"]]:
        """
        Normalize an ordered product of factors into (sign, monomial).

        Returns None when the product vanishes: at odd p an odd-degree factor
        squares to zero, and reordering odd factors costs a sign.
        """
        keyed = [(factor.sort_key(), factor) for factor in factors]
        sgn = 1
        if p != 2:
            odd_keys = [key for key, factor in keyed if factor.degree % 2]
            if len(set(odd_keys)) < len(odd_keys):
                return None
            inversions = sum(1 for a in range(len(odd_keys)) for b in range(a + 1, len(odd_keys))
                             if odd_keys[a] > odd_keys[b])
            sgn = sign(inversions)
        keyed.sort(key=lambda pair: pair[0])
        merged: List[List] = []
        for key, factor in keyed:
            if merged and merged[-1][0] == key:
                merged[-1][2] += 1
            else:
                merged.append([key, factor, 1])
        return sgn, cls(p, tuple((factor, mult) for _, factor, mult in merged))

    @classmethod
    def single(cls, factor: PolyRFactor) -> "PolyRMonomial":
        return cls(factor.word.p, ((factor, 1),))

    @classmethod
    def generator(cls, p: int, gen: Any) -> "PolyRMonomial":
        return cls.single(PolyRFactor(PrimalWord(p, ()), gen))

    def expanded(self) -> List[PolyRFactor]:
        return [factor for factor, mult in self.factors for _ in range(mult)]

    @property
    def degree(self) -> int:
        return sum(factor.degree * mult for factor, mult in self.factors)

    @property
    def weight(self) -> int:
        return sum(factor.weight * mult for factor, mult in self.factors)

    def sort_key(self) -> tuple:
        return (1, tuple((factor.sort_key(), mult) for factor, mult in self.factors))

    def __str__(self) -> str:
        parts = []
        for factor, mult in self.factors:
            parts.extend([str(factor)] * mult)
        return "·".join(parts) if parts else "1"


def multiply(a: PolyRMonomial, b: PolyRMonomial) -> Optional[Tuple[int, PolyRMonomial]]:
    return PolyRMonomial.from_factors(a.p, a.expanded() + b.expanded())


def multiply_combinations(left: Mapping[PolyRMonomial, int], right: Mapping[PolyRMonomial, int],
                          p: int) -> Dict[PolyRMonomial, int]:
    out: Dict[PolyRMonomial, int] = {}
    for a, ca in left.items():
        for b, cb in right.items():
            product = multiply(a, b)
            if product is not None:
                sgn, mono = product
                accumulate(out, mono, sgn * ca * cb, p)
    return out


# ---------------------------------------------------------------------------
# unstability
# ---------------------------------------------------------------------------

def _unstable_status(p: int, letter: PrimalLetter, degree: int) -> str:
    """'zero', 'bottom' or 'free' for a letter acting on a class of this degree."""
    if p == 2:
        value, bottom = letter.index, letter.index == degree
    else:
        value = 2 * letter.index - letter.bockstein
        bottom = not letter.bockstein and 2 * letter.index == degree
    if value < degree:
        return "zero"
    return "bottom" if bottom else "free"


def is_allowable_factor(word: PrimalWord, degree: int) -> bool:
    """Every letter strictly above its bottom operation."""
    for letter in reversed(word.letters):
        if _unstable_status(word.p, letter, degree) != "free":
            return False
        degree += letter_degree(word.p, letter)
    return True


def _as_arg(p: int, generator: Union[int, Any]) -> Any:
    if isinstance(generator, int):
        return PolyGenerator("x", generator)
    return generator


def unstable_reduce(word: PrimalWord, generator: Union[int, Any]) -> Dict[PolyRMonomial, int]:
    """
    Evaluate an admissible word on a class x in a Poly_R-algebra.

    Letters below the bottom operation kill the term; the bottom operation
    becomes the p-th power, after which every outer letter must again be
    the bottom operation on the power. An integer stands for a generator x
    of that degree.
    """
    p = word.p
    arg = _as_arg(p, generator)
    degree = arg.degree
    letters = word.letters
    for position in range(len(letters) - 1, -1, -1):
        status = _unstable_status(p, letters[position], degree)
        if status == "zero":
            return {}
        if status == "bottom":
            base = PolyRFactor(PrimalWord(p, letters[position + 1:]), arg)
            power, current = p, p * degree
            for letter in reversed(letters[:position]):
                if _unstable_status(p, letter, current) != "bottom":
                    return {}
                power *= p
                current *= p
            product = PolyRMonomial.from_factors(p, [base] * power)
            return {} if product is None else {product[1]: product[0] % p}
        degree += letter_degree(p, letters[position])
    return {PolyRMonomial.single(PolyRFactor(word, arg)): 1}


# ---------------------------------------------------------------------------
# the monad structure at p = 2
# ---------------------------------------------------------------------------

def _require_two(p: int, what: str) -> None:
    if p != 2:
        raise UnsupportedPrimeError(f"{what} is implemented at p=2 only (got p={p})")


@lru_cache(maxsize=1 << 16)
def polyR_apply(index: int, monomial: PolyRMonomial) -> Dict[PolyRMonomial, int]:
    """Q^index on a basis monomial, via Cartan, Adem and unstability (p = 2)."""
    _require_two(monomial.p, "polyR_apply")
    flat = monomial.expanded()
    if len(flat) == 1:
        factor = flat[0]
        word = PrimalWord(2, (PrimalLetter(0, index),) + factor.word.letters)
        out: Dict[PolyRMonomial, int] = {}
        for admissible, coeff in primal_adem_rewrite(word).items():
            add_scaled(out, unstable_reduce(admissible, factor.arg), coeff, 2)
        return out

    head = PolyRMonomial.single(flat[0])
    rest = PolyRMonomial.from_factors(2, flat[1:])[1]
    out = {}
    for t in range(flat[0].degree, index - rest.degree + 1):
        left = polyR_apply(t, head)
        if not left:
            continue
        right = polyR_apply(index - t, rest)
        for mono, coeff in multiply_combinations(left, right, 2).items():
            accumulate(out, mono, coeff, 2)
    return out


def apply_word(word: PrimalWord, monomial: PolyRMonomial) -> Dict[PolyRMonomial, int]:
    """Apply the letters of a word innermost first."""
    current = {monomial: 1}
    for letter in reversed(word.letters):
        following: Dict[PolyRMonomial, int] = {}
        for mono, coeff in current.items():
            add_scaled(following, polyR_apply(letter.index, mono), coeff, 2)
        current = following
        if not current:
            break
    return current


def polyR_monad_mult(outer: PolyRMonomial) -> Dict[PolyRMonomial, int]:
    """
    Flatten a monomial whose arguments are themselves basis monomials.

    Each factor Q^K(m) is evaluated with ``apply_word``; the results are
    multiplied out (p = 2).
    """
    _require_two(outer.p, "polyR_monad_mult")
    result: Optional[Dict[PolyRMonomial, int]] = None
    for factor in outer.expanded():
        inner = factor.arg
        if not isinstance(inner, PolyRMonomial):
            inner = PolyRMonomial.generator(2, inner)
        value = apply_word(factor.word, inner)
        result = value if result is None else multiply_combinations(result, value, 2)
        if not result:
            return {}
    return result or {}


def polyR_functor(monomial: PolyRMonomial, func: Callable[[Any], Mapping[Any, int]]) -> Dict[PolyRMonomial, int]:
    """
    Poly_R applied to a linear map on arguments: every argument is replaced
    by its image and the product expanded multilinearly. Degree-preserving
    maps keep allowable words allowable.
    """
    p = monomial.p
    partial: Dict[Tuple[PolyRFactor, ...], int] = {(): 1}
    for factor in monomial.expanded():
        image = func(factor.arg)
        if not image:
            return {}
        extended: Dict[Tuple[PolyRFactor, ...], int] = {}
        for prefix, coeff in partial.items():
            for arg, c in image.items():
                accumulate(extended, prefix + (PolyRFactor(factor.word, arg),), coeff * c, p)
        partial = extended
    out: Dict[PolyRMonomial, int] = {}
    for factors, coeff in partial.items():
        product = PolyRMonomial.from_factors(p, factors)
        if product is not None:
            accumulate(out, product[1], product[0] * coeff, p)
    return out


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def generator_names(count: int) -> List[str]:
    if count <= 4:
        return list("xyzw"[:count])
    return [f"x{k + 1}" for k in range(count)]


def _min_step(p: int, degree: int) -> int:
    """Smallest degree reachable by one allowable, non-bottom letter."""
    if p == 2:
        return 2 * degree + 1
    s = -(-(degree + 1) // 2)
    return degree + 2 * (p - 1) * s - 1


def _min_after(p: int, degree: int, letters_left: int) -> int:
    for _ in range(letters_left):
        degree = _min_step(p, degree)
    return degree


def allowable_words(p: int, degree: int, length: int, max_degree: int) -> List[PrimalWord]:
    """
    Admissible words of the given length all of whose letters are strictly
    above the bottom operation on a class of ``degree``, with total target
    degree at most ``max_degree``.
    """
    found: List[PrimalWord] = []

    def extend(inner_first: List[PrimalLetter], current: int) -> None:
        left = length - len(inner_first)
        if left == 0:
            found.append(PrimalWord(p, tuple(reversed(inner_first))))
            return
        previous = inner_first[-1] if inner_first else None
        s = current + 1 if p == 2 else -(-(current + 1) // 2)
        while True:
            if _min_after(p, current + letter_degree(p, PrimalLetter(1 if p != 2 else 0, s)), left - 1) > max_degree:
                break
            for eps in ((0,) if p == 2 else (0, 1)):
                letter = PrimalLetter(eps, s)
                if previous is not None and not is_admissible_pair(p, letter, previous):
                    continue
                if _unstable_status(p, letter, current) != "free":
                    continue
                target = current + letter_degree(p, letter)
                if _min_after(p, target, left - 1) > max_degree:
                    continue
                extend(inner_first + [letter], target)
            if previous is not None and s > p * previous.index:
                break
            s += 1

    extend([], degree)
    return found


def polyR_monomials(args: Sequence[Any], degree_window: Tuple[Optional[int], int],
                    weight_cap: int, p: int = 2) -> List[PolyRMonomial]:
    """
    Monomial basis of the free Poly_R-algebra on the given arguments (any
    objects with degree, weight and sort_key), restricted to weight <=
    weight_cap and lo <= degree <= hi.

    Products of admissible allowable words on arguments; the bottom
    operation is the p-th power. Odd-degree factors are exterior at odd p.
    """
    check_prime(p)
    lo, hi = degree_window
    args = [arg for arg in args if arg.weight <= weight_cap]
    if weight_cap < 1 or (lo is not None and hi < lo) or not args:
        return []
    # every factor has degree >= weight * ratio
    ratio = min(Fraction(arg.degree, arg.weight) for arg in args)

    candidates: List[Tuple[tuple, PolyRFactor]] = []
    for arg in args:
        length = 0
        while p ** length * arg.weight <= weight_cap:
            weight = p ** length * arg.weight
            bound = hi - min(0, math.floor((weight_cap - weight) * ratio))
            for word in allowable_words(p, arg.degree, length, bound):
                factor = PolyRFactor(word, arg)
                candidates.append((factor.sort_key(), factor))
            length += 1
    candidates.sort(key=lambda pair: pair[0])
    factors = [factor for _, factor in candidates]
    logger.debug("polyR_monomials: %d candidate factors over %d arguments", len(factors), len(args))

    basis: List[PolyRMonomial] = []

    def choose(start: int, chosen: List[Tuple[PolyRFactor, int]], weight: int, degree: int) -> None:
        if chosen and (lo is None or degree >= lo) and degree <= hi:
            basis.append(PolyRMonomial(p, tuple(chosen)))
        for k in range(start, len(factors)):
            factor = factors[k]
            max_mult = 1 if (p != 2 and factor.degree % 2) else weight_cap
            mult = 1
            while mult <= max_mult and weight + mult * factor.weight <= weight_cap:
                choose(k + 1, chosen + [(factor, mult)], weight + mult * factor.weight,
                       degree + mult * factor.degree)
                mult += 1

    choose(0, [], 0, 0)
    basis.sort(key=lambda m: (m.weight, m.degree, m.sort_key()))
    return basis


def free_polyR_basis(gen_degrees: Sequence[int], degree_window: Tuple[Optional[int], int],
                     weight_cap: int, p: int = 2) -> List[PolyRMonomial]:
    """
    Monomial basis of the free Poly_R-algebra on generators of the given
    degrees, restricted to weight <= weight_cap and lo <= degree <= hi.
    """
    check_prime(p)
    if not gen_degrees:
        return []
    generators = [PolyGenerator(name, d) for name, d in zip(generator_names(len(gen_degrees)), gen_degrees)]
    return polyR_monomials(generators, degree_window, weight_cap, p)
