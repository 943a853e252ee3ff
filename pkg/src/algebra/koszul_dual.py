"""
Koszul-dual ringoids of the Dyer-Lashof algebra.

A dual word (β^ε1 Q^i1)^* ... (β^εk Q^ik)^* is sourced at an internal degree
j; each letter lowers the filtration by one and the internal degree by
i (p = 2) or 2(p-1)i - ε (odd p). Two variants are modelled:

- ``additive``: letters exist when i > -d (p = 2) or 2i > -d (odd p),
  d being the internal degree at the letter's source.
- ``full`` (p = 2): also admits the bottom letter i = -d, which is killed
  whenever another letter follows it. At odd p the variants coincide.

This module provides dual Adem rewriting to the admissible basis, suspension,
and the enumeration of unstable Ext bases.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Tuple

from src.algebra.dyer_lashof import PrimalLetter, is_admissible_pair, primal_pair_expansion
from src.algebra.errors import RelationNotApplicable
from src.algebra.fp_core import accumulate, binom_mod, check_prime, sign
from src.algebra.rewriting import normalize, pick_pair, splice

logger = logging.getLogger(__name__)

VARIANTS = ("additive", "full")


class DualLetter(NamedTuple):
    """(β^bockstein Q^index)^*; the Bockstein is always 0 at p = 2."""
    bockstein: int
    index: int


Letters = Tuple[DualLetter, ...]


def letter_drop(p: int, letter: DualLetter) -> int:
    """Internal degree lost by applying the letter."""
    if p == 2:
        return letter.index
    return 2 * (p - 1) * letter.index - letter.bockstein


def existence_bound(p: int, d: int, variant: str = "additive") -> int:
    """Smallest index of a letter that exists on internal degree d."""
    if p == 2:
        return -d if variant == "full" else -d + 1
    return -d // 2 + 1


def _letter_status(p: int, letter: DualLetter, d: int, variant: str) -> str:
    if letter.index < existence_bound(p, d, variant):
        return "absent"
    if p == 2 and variant == "full" and letter.index == -d:
        return "bottom"
    return "ok"


def source_degrees(p: int, source: int, letters: Letters) -> List[int]:
    """Internal degree at the source of each letter, aligned with ``letters``."""
    degrees = [0] * len(letters)
    d = source
    for k in range(len(letters) - 1, -1, -1):
        degrees[k] = d
        d -= letter_drop(p, letters[k])
    return degrees


def _as_letter(p: int, raw) -> DualLetter:
    if isinstance(raw, DualLetter):
        letter = raw
    elif isinstance(raw, int):
        letter = DualLetter(0, raw)
    else:
        letter = DualLetter(int(raw[0]), int(raw[1]))
    if letter.bockstein not in (0, 1) or (p == 2 and letter.bockstein):
        raise ValueError(f"invalid dual letter {raw!r} at p={p}")
    return letter


def _check_variant(p: int, variant: str) -> str:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; use one of {VARIANTS}")
    return variant if p == 2 else "additive"


@dataclass(frozen=True, order=True)
class DualOpWord:
    """
    A composable word of dual Dyer-Lashof generators, outermost first.

    ``auxiliary`` marks words sourced at the self-bracket class [x, x] of an
    even-degree generator at odd p; such words carry an extra factor 2 in
    their weight and ``source`` is the internal degree 2j - 1 of [x, x].
    """
    p: int
    source: int
    letters: Letters = ()
    variant: str = "additive"
    auxiliary: bool = False

    @classmethod
    def of(cls, p: int, source: int, letters: Iterable = (), variant: str = "additive",
           auxiliary: bool = False) -> "DualOpWord":
        check_prime(p)
        return cls(p, source, tuple(_as_letter(p, raw) for raw in letters),
                   _check_variant(p, variant), auxiliary)

    @property
    def length(self) -> int:
        return len(self.letters)

    @property
    def filtration(self) -> int:
        return -len(self.letters)

    @property
    def weight(self) -> int:
        return self.p ** len(self.letters) * (2 if self.auxiliary else 1)

    @property
    def target_internal(self) -> int:
        return self.source - sum(letter_drop(self.p, letter) for letter in self.letters)

    @property
    def target_total(self) -> int:
        return self.target_internal - len(self.letters)

    def degrees(self) -> List[int]:
        return source_degrees(self.p, self.source, self.letters)

    def exists(self) -> bool:
        """Every letter satisfies the existence bound at its position."""
        return all(_letter_status(self.p, letter, d, self.variant) != "absent"
                   for letter, d in zip(self.letters, self.degrees()))

    def __str__(self) -> str:
        return format_letters(self.letters)


def format_letters(letters: Letters) -> str:
    if not letters:
        return "1"
    return " ".join(("b" if e else "") + f"Q{i}*" for e, i in letters)


def _dual_pair_admissible(p: int, outer: DualLetter, inner: DualLetter) -> bool:
    if p == 2:
        return outer.index > 2 * inner.index
    return outer.index > p * inner.index - inner.bockstein


def is_admissible_dual(word: DualOpWord) -> bool:
    """
    Admissibility of a word that satisfies the existence bounds.

    Example:
        >>> is_admissible_dual(DualOpWord.of(2, 2, [3, 1]))
        True
    """
    letters = word.letters
    if not letters:
        return True
    if letters[-1].index < existence_bound(word.p, word.source, word.variant):
        return False
    return all(_dual_pair_admissible(word.p, letters[k], letters[k + 1])
               for k in range(len(letters) - 1))


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def dual_pair_relation(p: int, outer: DualLetter, inner: DualLetter, d: int) -> Dict[Letters, int]:
    """
    Right-hand side of the dual Adem relation of an inadmissible pair whose
    inner letter is sourced at internal degree d.

    p = 2, a <= 2b:
        (Q^a)*(Q^b)* = Σ_{a+b-c > 2c, c > -d} binom(b-c-1, a-2c-1) (Q^{a+b-c})*(Q^c)*
    odd p, with n = (p-1)(b-c) - 1 and 2c > -d throughout:
        (Q^a)*(Q^b)*, a <= pb:
            -Σ_{a+b-c > pc} (-1)^{a-c} binom(n, a-pc-1) (Q^{a+b-c})*(Q^c)*
        (βQ^a)*(Q^b)*, a <= pb:
            -Σ_{a+b-c >= pc} (-1)^{a-c} binom(n+1, a-pc) (Q^{a+b-c})*(βQ^c)*
            -Σ_{a+b-c > pc} (-1)^{a-c} binom(n, a-pc-1) (βQ^{a+b-c})*(Q^c)*
        (β^ε Q^a)*(βQ^b)*, a < pb:
            Σ_{a+b-c >= pc} (-1)^{a-c} binom(n, a-pc) (β^ε Q^{a+b-c})*(βQ^c)*

    Raises RelationNotApplicable when the pair is admissible or one of its
    letters does not exist at its position.
    """
    if _dual_pair_admissible(p, outer, inner):
        raise RelationNotApplicable(f"pair {format_letters((outer, inner))} is admissible")
    outer_degree = d - letter_drop(p, inner)
    if inner.index < existence_bound(p, d) or outer.index < existence_bound(p, outer_degree):
        raise RelationNotApplicable(
            f"{format_letters((outer, inner))} does not exist on degree {d}")

    a, b = outer.index, inner.index
    out: Dict[Letters, int] = {}
    if p == 2:
        c = max(a - b, existence_bound(2, d))
        while 3 * c < a + b:
            coeff = binom_mod(b - c - 1, a - 2 * c - 1, 2)
            if coeff:
                accumulate(out, (DualLetter(0, a + b - c), DualLetter(0, c)), coeff, 2)
            c += 1
        return out

    c = max(a - (p - 1) * b - 1, existence_bound(p, d))
    while a + b - c >= p * c:
        n = (p - 1) * (b - c) - 1
        sgn = sign(a - c)
        strict = a + b - c > p * c
        if inner.bockstein:
            coeff = binom_mod(n, a - p * c, p)
            if coeff:
                accumulate(out, (DualLetter(outer.bockstein, a + b - c), DualLetter(1, c)), sgn * coeff, p)
        elif not outer.bockstein:
            if strict:
                coeff = binom_mod(n, a - p * c - 1, p)
                if coeff:
                    accumulate(out, (DualLetter(0, a + b - c), DualLetter(0, c)), -sgn * coeff, p)
        else:
            coeff = binom_mod(n + 1, a - p * c, p)
            if coeff:
                accumulate(out, (DualLetter(0, a + b - c), DualLetter(1, c)), -sgn * coeff, p)
            if strict:
                coeff = binom_mod(n, a - p * c - 1, p)
                if coeff:
                    accumulate(out, (DualLetter(1, a + b - c), DualLetter(0, c)), -sgn * coeff, p)
        c += 1
    return out


# ---------------------------------------------------------------------------
# elements and normal forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualElement:
    """An F_p-combination of dual words sharing a source."""
    p: int
    source: int
    terms: Tuple[Tuple[Letters, int], ...] = ()
    variant: str = "additive"
    auxiliary: bool = False

    @classmethod
    def from_terms(cls, p: int, source: int, terms: Mapping[Letters, int], variant: str = "additive",
                   auxiliary: bool = False) -> "DualElement":
        reduced = {letters: coeff % p for letters, coeff in terms.items() if coeff % p}
        return cls(p, source, tuple(sorted(reduced.items())), _check_variant(p, variant), auxiliary)

    @classmethod
    def from_word(cls, word: DualOpWord, coeff: int = 1) -> "DualElement":
        return cls.from_terms(word.p, word.source, {word.letters: coeff}, word.variant, word.auxiliary)

    @classmethod
    def zero(cls, p: int, source: int, variant: str = "additive", auxiliary: bool = False) -> "DualElement":
        return cls(p, source, (), _check_variant(p, variant), auxiliary)

    def as_dict(self) -> Dict[Letters, int]:
        return dict(self.terms)

    def words(self) -> List[Tuple[DualOpWord, int]]:
        return [(DualOpWord(self.p, self.source, letters, self.variant, self.auxiliary), coeff)
                for letters, coeff in self.terms]

    def is_zero(self) -> bool:
        return not self.terms

    def with_terms(self, terms: Mapping[Letters, int]) -> "DualElement":
        return DualElement.from_terms(self.p, self.source, terms, self.variant, self.auxiliary)

    def bidegrees(self) -> set:
        """(filtration, target internal degree, weight) of every term."""
        return {(word.filtration, word.target_internal, word.weight) for word, _ in self.words()}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for letters, coeff in self.terms:
            text = format_letters(letters)
            parts.append(text if coeff == 1 else f"{coeff} {text}")
        return " + ".join(parts)


def _dual_step(p: int, source: int, variant: str, strategy: str):
    def step(letters: Letters) -> Optional[Dict[Letters, int]]:
        degrees = source_degrees(p, source, letters)
        last = len(letters) - 1
        for k, letter in enumerate(letters):
            status = _letter_status(p, letter, degrees[k], variant)
            if status == "absent" or (status == "bottom" and k != last):
                return {}
        bad = [k for k in range(last) if not _dual_pair_admissible(p, letters[k], letters[k + 1])]
        position = pick_pair(bad, strategy)
        if position is None:
            return None
        expansion = dual_pair_relation(p, letters[position], letters[position + 1], degrees[position + 1])
        return splice(letters, position, expansion)
    return step


def normal_form_dual(elem: DualElement, strategy: str = "leftmost") -> DualElement:
    """
    Rewrite to the admissible basis: inadmissible pairs are expanded by the
    dual Adem relations and words with a non-existent letter vanish.
    """
    step = _dual_step(elem.p, elem.source, elem.variant, strategy)
    normal = normalize(elem.as_dict(), step, elem.p, label="dual adem")
    return elem.with_terms(normal)


def normal_form_word(word: DualOpWord, strategy: str = "leftmost") -> DualElement:
    return normal_form_dual(DualElement.from_word(word), strategy)


def dual_adem_rewrite(p: int, outer, inner, d: int, variant: str = "additive") -> DualElement:
    """The relation of one inadmissible pair as an element sourced at d."""
    check_prime(p)
    pair = (_as_letter(p, outer), _as_letter(p, inner))
    return DualElement.from_terms(p, d, dual_pair_relation(p, pair[0], pair[1], d), variant)


def suspend(elem: DualElement, t: int) -> DualElement:
    """Re-source the words at j + t; admissible words stay admissible."""
    if t < 0:
        raise ValueError(f"suspension needs t >= 0, got {t}")
    return DualElement(elem.p, elem.source + t, elem.terms, elem.variant, elem.auxiliary)


# ---------------------------------------------------------------------------
# Koszul duality cross-check
# ---------------------------------------------------------------------------

def dual_relation_from_primal(p: int, outer, inner) -> Dict[Letters, int]:
    """
    The dual relation of an inadmissible dual pair, recovered as the
    annihilator of the primal Adem relations:

        π* = -Σ_ρ coeff(ρ -> π) ρ*

    over the inadmissible primal pairs ρ of the same degree and Bockstein
    count. It agrees with ``dual_pair_relation`` once d is large.
    """
    outer, inner = _as_letter(p, outer), _as_letter(p, inner)
    target = (PrimalLetter(*outer), PrimalLetter(*inner))
    a, b = outer.index, inner.index
    total = a + b
    bocksteins = outer.bockstein + inner.bockstein
    eps_choices = [(0, 0)] if p == 2 else [(e1, e2) for e1 in (0, 1) for e2 in (0, 1) if e1 + e2 == bocksteins]
    out: Dict[Letters, int] = {}
    for r in range((p * total) // (p + 1) - 1, p * b + 2):
        for e1, e2 in eps_choices:
            rho_outer, rho_inner = PrimalLetter(e1, r), PrimalLetter(e2, total - r)
            if is_admissible_pair(p, rho_outer, rho_inner):
                continue
            coeff = primal_pair_expansion(p, rho_outer, rho_inner).get(target, 0)
            if coeff:
                accumulate(out, (DualLetter(e1, r), DualLetter(e2, total - r)), -coeff, p)
    return out


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _next_min_index(p: int, previous: Optional[DualLetter], d: int, variant: str, innermost: bool) -> int:
    bound = existence_bound(p, d, variant if innermost else "additive")
    if previous is not None:
        admissible = 2 * previous.index + 1 if p == 2 else p * previous.index - previous.bockstein + 1
        bound = max(bound, admissible)
    return bound


def _max_reachable(p: int, total: int, d: int, last: DualLetter, letters_left: int, variant: str) -> int:
    """Largest target total degree over completions by up to ``letters_left`` letters."""
    best = total
    for _ in range(letters_left):
        index = _next_min_index(p, last, d, variant, False)
        last = DualLetter(1 if p != 2 else 0, index)
        d -= letter_drop(p, last)
        total -= letter_drop(p, last) + 1
        best = max(best, total)
    return best


def _enumerate_from(p: int, source: int, variant: str, filtration_cap: int, lo: int,
                    hi: Optional[int], auxiliary: bool) -> List[DualOpWord]:
    found: List[DualOpWord] = []
    eps_values = (0,) if p == 2 else (0, 1)

    def emit(inner_first: List[DualLetter], total: int) -> None:
        if lo <= total and (hi is None or total <= hi):
            found.append(DualOpWord(p, source, tuple(reversed(inner_first)), variant, auxiliary))

    def extend(inner_first: List[DualLetter], d: int, total: int) -> None:
        if len(inner_first) == filtration_cap:
            return
        previous = inner_first[-1] if inner_first else None
        index = _next_min_index(p, previous, d, variant, not inner_first)
        left = filtration_cap - len(inner_first) - 1
        while True:
            trial = DualLetter(eps_values[-1], index)
            trial_total = total - letter_drop(p, trial) - 1
            if _max_reachable(p, trial_total, d - letter_drop(p, trial), trial, left, variant) < lo:
                break
            for eps in eps_values:
                letter = DualLetter(eps, index)
                if previous is not None and not _dual_pair_admissible(p, letter, previous):
                    continue
                new_total = total - letter_drop(p, letter) - 1
                word = inner_first + [letter]
                emit(word, new_total)
                extend(word, d - letter_drop(p, letter), new_total)
            index += 1

    emit([], source)
    extend([], source, source)
    return found


def unstable_ext_basis(j: int, variant: str = "additive", filtration_cap: int = 1,
                       degree_window: Tuple[int, Optional[int]] = (-30, None), p: int = 2) -> List[DualOpWord]:
    """
    Admissible dual words from a generator of degree j, of length at most
    ``filtration_cap`` and target total degree in the window.

    At odd p and even j the words sourced at the self-bracket class [x, x]
    (internal degree 2j - 1, weight 2) are listed as well.
    """
    check_prime(p)
    variant = _check_variant(p, variant)
    lo, hi = degree_window
    if filtration_cap < 0 or (hi is not None and hi < lo):
        return []
    words = _enumerate_from(p, j, variant, filtration_cap, lo, hi, False)
    if p != 2 and j % 2 == 0:
        words += _enumerate_from(p, 2 * j - 1, variant, filtration_cap, lo, hi, True)
    words.sort(key=lambda w: (w.auxiliary, w.length, -w.target_total, w.letters))
    logger.debug("unstable_ext_basis(j=%d, p=%d): %d words", j, p, len(words))
    return words
