"""
The power ring of unary operations on homotopy groups.

An operation of weight p^w from total degree k is an element of the dual
ringoid sourced at internal degree k with w letters (the payload); its
target total degree is the internal target minus w. Composition is the
sheared Yoneda product: suspend the outer payload by w, juxtapose, and take
the normal form.

Operations are written in R-notation:

    p = 2:  R^a        <->  (Q^{a-1})^*        lowers total degree by a
    odd p:  β^ε R^i    <->  (β^{1-ε} Q^i)^*    lowers total degree by 2(p-1)i + ε

At odd p an even-degree class also carries the self-bracket B (degree
j -> 2j - 1, weight 2); it only ever appears innermost.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from src.algebra.errors import DegreeMismatchError, RelationNotApplicable
from src.algebra.fp_core import accumulate, add_scaled, binom_mod, check_prime, sign
from src.algebra.koszul_dual import (DualElement, DualLetter, DualOpWord, Letters,
                                     normal_form_dual)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class RWord:
    """
    β^{ε1}R^{i1} ... β^{εk}R^{ik} [B], outermost first. At p = 2 every
    Bockstein is 0 and the index is the a of R^a.
    """
    p: int
    letters: Tuple[Tuple[int, int], ...] = ()
    bracket: bool = False

    @classmethod
    def of(cls, p: int, letters: Iterable = (), bracket: bool = False) -> "RWord":
        check_prime(p)
        parsed = []
        for raw in letters:
            eps, index = (0, raw) if isinstance(raw, int) else (int(raw[0]), int(raw[1]))
            if eps not in (0, 1) or (p == 2 and eps):
                raise ValueError(f"invalid R letter {raw!r} at p={p}")
            parsed.append((eps, index))
        if bracket and p == 2:
            raise ValueError("the self-bracket B only exists at odd primes")
        return cls(p, tuple(parsed), bracket)

    @property
    def length(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return self.p ** len(self.letters) * (2 if self.bracket else 1)

    @property
    def is_identity(self) -> bool:
        return not self.letters and not self.bracket

    def drop(self) -> int:
        """Total degree lost by the R letters (B excluded)."""
        return sum(r_letter_drop(self.p, letter) for letter in self.letters)

    def target(self, source: int) -> int:
        start = 2 * source - 1 if self.bracket else source
        return start - self.drop()

    def __str__(self) -> str:
        parts = [("b" if eps else "") + f"R{i}" for eps, i in self.letters]
        if self.bracket:
            parts.append("B")
        return " ".join(parts) if parts else "1"


def r_letter_drop(p: int, letter: Tuple[int, int]) -> int:
    eps, index = letter
    return index if p == 2 else 2 * (p - 1) * index + eps


def r_letter_exists(p: int, letter: Tuple[int, int], total: int) -> bool:
    """R^a needs a >= -t + 1 (p = 2, the bottom being the restriction); β^ε R^i needs 2i > -t."""
    if p == 2:
        return letter[1] >= -total + 1
    return 2 * letter[1] > -total


def r_bottom(p: int, total: int) -> Optional[Tuple[int, int]]:
    """The restriction letter on a class of this total degree, if any."""
    if p == 2:
        return (0, 1 - total)
    if total % 2:
        return (0, (1 - total) // 2)
    return None


def is_admissible_rword(word: RWord, source: int) -> bool:
    letters = word.letters
    if not letters:
        return True
    start = 2 * source - 1 if word.bracket else source
    if not r_letter_exists(word.p, letters[-1], start):
        return False
    for outer, inner in zip(letters, letters[1:]):
        bound = 2 * inner[1] if word.p == 2 else word.p * inner[1] + inner[0]
        if outer[1] < bound:
            return False
    return True


# ---------------------------------------------------------------------------
# translation
# ---------------------------------------------------------------------------

def _to_r_letter(p: int, letter: DualLetter) -> Tuple[int, int]:
    if p == 2:
        return (0, letter.index + 1)
    return (1 - letter.bockstein, letter.index)


def _to_dual_letter(p: int, letter: Tuple[int, int]) -> DualLetter:
    eps, index = letter
    if p == 2:
        return DualLetter(0, index - 1)
    return DualLetter(1 - eps, index)


def to_R_notation(word: DualOpWord) -> RWord:
    return RWord(word.p, tuple(_to_r_letter(word.p, letter) for letter in word.letters), word.auxiliary)


def from_R_notation(word: RWord, source: int) -> DualOpWord:
    """The dual word of an R-word on a class of total degree ``source``."""
    if word.bracket and source % 2:
        raise DegreeMismatchError(f"B needs an even source degree, got {source}")
    internal = 2 * source - 1 if word.bracket else source
    variant = "full" if word.p == 2 else "additive"
    letters = tuple(_to_dual_letter(word.p, letter) for letter in word.letters)
    return DualOpWord(word.p, internal, letters, variant, word.bracket)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerOp:
    """
    An element of P^target_source[weight_exponent], stored as a normal-form
    payload in the dual ringoid. The unit ι_j is the empty word.
    """
    p: int
    source: int
    weight_exponent: int
    payload: DualElement
    target: int
    bracket: bool = False

    def __post_init__(self):
        for word, _ in self.payload.words():
            if word.target_total != self.target or word.length != self.weight_exponent:
                raise DegreeMismatchError(
                    f"payload word {word} does not lie in P^{self.target}_{self.source}[{self.weight_exponent}]")

    @classmethod
    def unit(cls, p: int, j: int) -> "PowerOp":
        check_prime(p)
        variant = "full" if p == 2 else "additive"
        return cls(p, j, 0, DualElement.from_terms(p, j, {(): 1}, variant), j)

    @classmethod
    def self_bracket(cls, p: int, j: int) -> "PowerOp":
        if p == 2 or j % 2:
            raise DegreeMismatchError(f"B is defined on even degrees at odd p (p={p}, j={j})")
        return normalize_rword(p, RWord(p, (), True), j)

    @classmethod
    def letter(cls, p: int, j: int, letter) -> "PowerOp":
        """A single R-letter, checked against the existence bound on degree j."""
        word = RWord.of(p, [letter])
        if not r_letter_exists(p, word.letters[0], j):
            raise DegreeMismatchError(f"{word} is not defined on degree {j}")
        return normalize_rword(p, word, j)

    @property
    def weight(self) -> int:
        return self.p ** self.weight_exponent * (2 if self.bracket else 1)

    @property
    def is_unit(self) -> bool:
        return (not self.bracket and self.weight_exponent == 0
                and self.payload.as_dict() == {(): 1})

    def is_zero(self) -> bool:
        return self.payload.is_zero()

    def as_rwords(self) -> Dict[RWord, int]:
        """The R-notation view of the payload."""
        return {to_R_notation(word): coeff for word, coeff in self.payload.words()}

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        if self.is_unit:
            return "ι"
        parts = []
        for word, coeff in sorted(self.as_rwords().items(), key=lambda kv: kv[0].letters):
            parts.append(str(word) if coeff == 1 else f"{coeff} {word}")
        return " + ".join(parts)


def _payload(p: int, internal: int, terms: Mapping[Letters, int], bracket: bool) -> DualElement:
    variant = "full" if p == 2 else "additive"
    return normal_form_dual(DualElement.from_terms(p, internal, terms, variant, bracket))


def normalize_rword(p: int, word: RWord, source: int) -> PowerOp:
    """The normal form of an arbitrary R-word applied on degree ``source``."""
    dual = from_R_notation(word, source)
    payload = _payload(p, dual.source, {dual.letters: 1}, word.bracket)
    return PowerOp(p, source, word.length, payload, word.target(source), word.bracket)


def normalize_combination(p: int, terms: Mapping[RWord, int], source: int) -> PowerOp:
    """Normal form of a combination of R-words of one weight and target."""
    words = list(terms)
    if not words:
        raise ValueError("empty combination has no degree")
    first = words[0]
    merged: Dict[Letters, int] = {}
    for word, coeff in terms.items():
        if (word.length, word.bracket, word.target(source)) != (first.length, first.bracket, first.target(source)):
            raise DegreeMismatchError("terms of a combination must share weight and target degree")
        accumulate(merged, from_R_notation(word, source).letters, coeff, p)
    internal = 2 * source - 1 if first.bracket else source
    payload = _payload(p, internal, merged, first.bracket)
    return PowerOp(p, source, first.length, payload, first.target(source), first.bracket)


def compose(beta: PowerOp, alpha: PowerOp) -> PowerOp:
    """
    The sheared Yoneda product β ∘ α in P^i_k[v + w].

    Raises DegreeMismatchError unless β starts where α ends.
    """
    if beta.p != alpha.p:
        raise DegreeMismatchError(f"cannot compose operations at p={beta.p} and p={alpha.p}")
    if beta.source != alpha.target:
        raise DegreeMismatchError(
            f"source of the outer operation ({beta.source}) differs from the target of the inner one ({alpha.target})")
    if alpha.is_unit:
        return beta
    if beta.is_unit:
        return alpha
    p = beta.p
    weight = beta.weight_exponent + alpha.weight_exponent
    if beta.bracket:
        # B is innermost, so nothing can sit below it
        zero = DualElement.zero(p, alpha.payload.source, alpha.payload.variant, alpha.bracket)
        return PowerOp(p, alpha.source, weight, zero, beta.target, alpha.bracket)
    terms: Dict[Letters, int] = {}
    for outer, c_outer in beta.payload.terms:
        for inner, c_inner in alpha.payload.terms:
            accumulate(terms, outer + inner, c_outer * c_inner, p)
    payload = _payload(p, alpha.payload.source, terms, alpha.bracket)
    return PowerOp(p, alpha.source, weight, payload, beta.target, alpha.bracket)


# ---------------------------------------------------------------------------
# Adem relations in R-notation
# ---------------------------------------------------------------------------

def _family(p: int, eps: Tuple[int, int]) -> str:
    if p == 2:
        return "two"
    if eps == (1, 1):
        return "bRbR"
    if eps == (0, 1):
        return "RbR"
    return "RR"


def adem_window_holds(p: int, a: int, b: int, j: int, eps: Tuple[int, int] = (0, 0)) -> bool:
    family = _family(p, eps)
    if family == "two":
        return b - j < a < 2 * b and b > -j + 1
    if family == "bRbR":
        return a <= p * b and 2 * b > -j and 2 * a > 2 * (p - 1) * b - j
    if family == "RbR":
        return a <= p * b and 2 * b > -j and 2 * a > 2 * (p - 1) * b + 1 - j
    return a < p * b and 2 * b > -j and 2 * a > 2 * (p - 1) * b - j


def adem_R_rhs(p: int, a: int, b: int, j: int, eps: Tuple[int, int] = (0, 0)) -> Dict[RWord, int]:
    """
    Right-hand side of the Adem relation for β^{ε1}R^a β^{ε2}R^b on degree j.

    p = 2:   R^a R^b = Σ_{a+b-c >= 2c, c > -j+1} binom(b-c-1, a-2c) R^{a+b-c} R^c
    odd p, with n = (p-1)(b-c) - 1 and 2c > -j:
        βR^a βR^b  = Σ_{a+b-c > pc} (-1)^{a-c+1} binom(n, a-pc-1) βR^{a+b-c} βR^c
        R^a βR^b   = -Σ_{a+b-c >= pc} (-1)^{a-c} binom(n+1, a-pc) βR^{a+b-c} R^c
                     -Σ_{a+b-c > pc} (-1)^{a-c} binom(n, a-pc-1) R^{a+b-c} βR^c
        β^ε R^a R^b = Σ_{a+b-c >= pc} (-1)^{a-c} binom(n, a-pc) β^ε R^{a+b-c} R^c
    """
    out: Dict[RWord, int] = {}

    def add(letters: Sequence[Tuple[int, int]], coeff: int) -> None:
        if coeff % p:
            accumulate(out, RWord(p, tuple(letters)), coeff, p)

    if p == 2:
        c = -j + 2
        while a + b - c >= 2 * c:
            add([(0, a + b - c), (0, c)], binom_mod(b - c - 1, a - 2 * c, 2))
            c += 1
        return out

    family = _family(p, eps)
    c = -j // 2 + 1
    while a + b - c >= p * c:
        n = (p - 1) * (b - c) - 1
        sgn = sign(a - c)
        strict = a + b - c > p * c
        if family == "bRbR":
            if strict:
                add([(1, a + b - c), (1, c)], -sgn * binom_mod(n, a - p * c - 1, p))
        elif family == "RbR":
            add([(1, a + b - c), (0, c)], -sgn * binom_mod(n + 1, a - p * c, p))
            if strict:
                add([(0, a + b - c), (1, c)], -sgn * binom_mod(n, a - p * c - 1, p))
        else:
            add([(eps[0], a + b - c), (0, c)], sgn * binom_mod(n, a - p * c, p))
        c += 1
    return out


def verify_adem_R(p: int, a: int, b: int, j: int, eps: Tuple[int, int] = (0, 0)) -> bool:
    """
    Evaluate both sides of an R-notation Adem relation and compare normal
    forms. The left side is a composite when both letters are operations on
    their degrees; otherwise the juxtaposed word is normalized directly.

    Raises RelationNotApplicable outside the applicability window.
    """
    check_prime(p)
    if not adem_window_holds(p, a, b, j, eps):
        raise RelationNotApplicable(f"a={a}, b={b}, eps={eps} on degree {j}")
    inner_letter, outer_letter = (eps[1], b), (eps[0], a)
    inner = PowerOp.letter(p, j, inner_letter)
    if r_letter_exists(p, outer_letter, inner.target):
        lhs = compose(PowerOp.letter(p, inner.target, outer_letter), inner)
    else:
        lhs = normalize_rword(p, RWord(p, (outer_letter, inner_letter)), j)
    rhs_terms = adem_R_rhs(p, a, b, j, eps)
    rhs: Dict[Letters, int] = {}
    for word, coeff in rhs_terms.items():
        add_scaled(rhs, normalize_rword(p, word, j).payload.as_dict(), coeff, p)
    ok = lhs.payload.as_dict() == rhs
    if not ok:
        logger.info("Adem mismatch for %s on degree %d: %s vs %s", (outer_letter, inner_letter), j, lhs, rhs)
    return ok


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _min_r_index(p: int, total: int, inner: Optional[Tuple[int, int]]) -> int:
    index = -total + 1 if p == 2 else -total // 2 + 1
    if inner is not None:
        admissible = 2 * inner[1] if p == 2 else p * inner[1] + inner[0]
        index = max(index, admissible)
    return index


def _max_r_reachable(p: int, total: int, last: Tuple[int, int], letters_left: int) -> int:
    best = total
    for _ in range(letters_left):
        last = (0, _min_r_index(p, total, last))
        total -= r_letter_drop(p, last)
        best = max(best, total)
    return best


def _enumerate_rwords(p: int, start: int, cap: int, lo: int, hi: Optional[int],
                      bracket: bool) -> List[Tuple[Tuple[int, int], ...]]:
    found: List[Tuple[Tuple[int, int], ...]] = []
    eps_values = (0,) if p == 2 else (0, 1)

    def visit(inner_first: List[Tuple[int, int]], total: int) -> None:
        if lo <= total and (hi is None or total <= hi):
            found.append(tuple(reversed(inner_first)))
        if len(inner_first) == cap:
            return
        previous = inner_first[-1] if inner_first else None
        index = _min_r_index(p, total, previous)
        left = cap - len(inner_first) - 1
        while True:
            trial = (0, index)
            if _max_r_reachable(p, total - r_letter_drop(p, trial), trial, left) < lo:
                break
            for eps in eps_values:
                letter = (eps, index)
                visit(inner_first + [letter], total - r_letter_drop(p, letter))
            index += 1

    visit([], start)
    return found


def op_basis(j: int, weight_exp_cap: int, degree_window: Tuple[int, Optional[int]],
             p: int = 2) -> List[RWord]:
    """
    Admissible R-words on a class of total degree j with at most
    ``weight_exp_cap`` letters and target degree in the window; at odd p and
    even j the B-terminated words are included.
    """
    check_prime(p)
    lo, hi = degree_window
    if weight_exp_cap < 0 or (hi is not None and hi < lo):
        return []
    words = [RWord(p, letters) for letters in _enumerate_rwords(p, j, weight_exp_cap, lo, hi, False)]
    if p != 2 and j % 2 == 0:
        words += [RWord(p, letters, True)
                  for letters in _enumerate_rwords(p, 2 * j - 1, weight_exp_cap, lo, hi, True)]
    words.sort(key=lambda w: (w.weight, -w.target(j), w.letters))
    logger.debug("op_basis(j=%d, p=%d): %d words", j, p, len(words))
    return words
