"""
S-linear operations: Steenrod letters mixed with the power-ring letters R.

Steenrod letters are graded homologically, so Sq^a (β^ε P^n) lowers the
degree of a class by a (2n(p-1) + ε) and leaves its weight alone. A mixed
word is a sequence of letters, outermost first, applied to a generator or
to a bracket of two mixed words. Canonical form:

    R-letters (admissible)  Steenrod letters (admissible)  generator
    R-letters (admissible)  [u, v]      u <= v canonical, restriction chains only

Steenrod letters are pushed inward through R by the Nishida relations and
through brackets by the Cartan formula.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from src.algebra.errors import DegreeMismatchError, RelationNotApplicable
from src.algebra.fp_core import accumulate, add_scaled, binom_mod, check_prime, inverse_mod, sign
from src.algebra.power_ring import (RWord, is_admissible_rword, normalize_rword, r_bottom,
                                    r_letter_drop, r_letter_exists)
from src.algebra.rewriting import normalize, pick_pair, splice
from src.lie.free_partition_lie import DegreeWindow, FreePartitionLie
from src.lie.shifted_lie import standard_factorization
from src.utils.output import DimTable

logger = logging.getLogger(__name__)

PLACEHOLDER = -1


# ---------------------------------------------------------------------------
# the Steenrod algebra
# ---------------------------------------------------------------------------

class SteenrodLetter(NamedTuple):
    """β^bockstein P^index at odd p, Sq^index at p = 2."""
    bockstein: int
    index: int


def steenrod_letter_degree(p: int, letter: SteenrodLetter) -> int:
    if p == 2:
        return letter.index
    return 2 * (p - 1) * letter.index + letter.bockstein


def _as_steenrod_letter(p: int, raw) -> SteenrodLetter:
    if isinstance(raw, SteenrodLetter):
        letter = raw
    elif isinstance(raw, int):
        letter = SteenrodLetter(0, raw)
    else:
        letter = SteenrodLetter(int(raw[0]), int(raw[1]))
    if letter.bockstein not in (0, 1) or (p == 2 and letter.bockstein) or letter.index < 0:
        raise ValueError(f"invalid Steenrod letter {raw!r} at p={p}")
    return letter


def format_steenrod_letter(p: int, letter: SteenrodLetter) -> str:
    if p == 2:
        return f"Sq{letter.index}"
    return ("b" if letter.bockstein else "") + f"P{letter.index}"


def _is_identity(letter: SteenrodLetter) -> bool:
    return letter == (0, 0)


@dataclass(frozen=True, order=True)
class SteenrodWord:
    """A monomial in the Steenrod algebra, outermost letter first."""
    p: int
    letters: Tuple[SteenrodLetter, ...] = ()

    @classmethod
    def of(cls, p: int, letters: Iterable = ()) -> "SteenrodWord":
        check_prime(p)
        return cls(p, tuple(_as_steenrod_letter(p, raw) for raw in letters))

    @property
    def degree(self) -> int:
        return sum(steenrod_letter_degree(self.p, letter) for letter in self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(format_steenrod_letter(self.p, letter) for letter in self.letters)


def is_admissible_steenrod_pair(p: int, outer: SteenrodLetter, inner: SteenrodLetter) -> bool:
    if p == 2:
        return outer.index >= 2 * inner.index
    return outer.index >= p * inner.index + inner.bockstein


def is_admissible_steenrod(word: SteenrodWord) -> bool:
    letters = word.letters
    if any(_is_identity(letter) for letter in letters):
        return False
    return all(is_admissible_steenrod_pair(word.p, a, b) for a, b in zip(letters, letters[1:]))


@lru_cache(maxsize=None)
def steenrod_pair_expansion(p: int, outer: SteenrodLetter,
                            inner: SteenrodLetter) -> Dict[Tuple[SteenrodLetter, ...], int]:
    """
    The Adem relation for an inadmissible pair, identity letters dropped.

    p = 2, a < 2b:
        Sq^a Sq^b = Σ_c binom(b-c-1, a-2c) Sq^{a+b-c} Sq^c
    odd p, a < pb:
        P^a P^b = Σ_i (-1)^{a+i} binom((p-1)(b-i)-1, a-pi) P^{a+b-i} P^i
    odd p, a <= pb:
        P^a βP^b = Σ_i (-1)^{a+i} binom((p-1)(b-i), a-pi) βP^{a+b-i} P^i
                 + Σ_i (-1)^{a+i+1} binom((p-1)(b-i)-1, a-pi-1) P^{a+b-i} βP^i
    and an outer β multiplies on the left (β² = 0).
    """
    a, b = outer.index, inner.index
    raw: Dict[Tuple[SteenrodLetter, ...], int] = {}

    def add(letters: Sequence[SteenrodLetter], coeff: int) -> None:
        if coeff % p:
            word = tuple(letter for letter in letters if not _is_identity(letter))
            accumulate(raw, word, coeff, p)

    if p == 2:
        for c in range(a // 2 + 1):
            add([SteenrodLetter(0, a + b - c), SteenrodLetter(0, c)], binom_mod(b - c - 1, a - 2 * c, 2))
        return raw

    for i in range(a // p + 1):
        sgn = sign(a + i)
        if not inner.bockstein:
            add([SteenrodLetter(0, a + b - i), SteenrodLetter(0, i)],
                sgn * binom_mod((p - 1) * (b - i) - 1, a - p * i, p))
        else:
            add([SteenrodLetter(1, a + b - i), SteenrodLetter(0, i)],
                sgn * binom_mod((p - 1) * (b - i), a - p * i, p))
            add([SteenrodLetter(0, a + b - i), SteenrodLetter(1, i)],
                -sgn * binom_mod((p - 1) * (b - i) - 1, a - p * i - 1, p))
    if not outer.bockstein:
        return raw
    out: Dict[Tuple[SteenrodLetter, ...], int] = {}
    for word, coeff in raw.items():
        first = word[0] if word else SteenrodLetter(0, 0)
        if first.bockstein:
            continue
        accumulate(out, (SteenrodLetter(1, first.index),) + word[1:], coeff, p)
    return out


def _adem_step(p: int, strategy: str):
    def step(letters: Tuple[SteenrodLetter, ...]):
        if any(_is_identity(letter) for letter in letters):
            return {tuple(letter for letter in letters if not _is_identity(letter)): 1}
        bad = [k for k in range(len(letters) - 1)
               if not is_admissible_steenrod_pair(p, letters[k], letters[k + 1])]
        position = pick_pair(bad, strategy)
        if position is None:
            return None
        return splice(letters, position, steenrod_pair_expansion(p, letters[position], letters[position + 1]))
    return step


def steenrod_adem_rewrite(word: SteenrodWord, strategy: str = "leftmost") -> Dict[SteenrodWord, int]:
    """Normal form of a Steenrod monomial in the admissible basis."""
    p = word.p
    normal = normalize({word.letters: 1}, _adem_step(p, strategy), p, label="steenrod adem")
    return {SteenrodWord(p, letters): coeff for letters, coeff in normal.items()}


def admissible_monomials(p: int, degree: int) -> List[SteenrodWord]:
    """Admissible monomials of the given degree; the empty word in degree 0."""
    check_prime(p)
    found: List[SteenrodWord] = []
    eps_values = (0,) if p == 2 else (0, 1)

    def visit(prefix: List[SteenrodLetter], remaining: int) -> None:
        if remaining == 0:
            found.append(SteenrodWord(p, tuple(prefix)))
            return
        bound = prefix[-1].index if prefix else None
        for eps in eps_values:
            for index in range(0, remaining + 1):
                letter = SteenrodLetter(eps, index)
                if _is_identity(letter):
                    continue
                step = steenrod_letter_degree(p, letter)
                if step > remaining:
                    break
                if bound is not None:
                    limit = 2 * index if p == 2 else p * index + eps
                    if limit > bound:
                        break
                visit(prefix + [letter], remaining - step)

    if degree >= 0:
        visit([], degree)
    return sorted(found)


# ---------------------------------------------------------------------------
# mixed words
# ---------------------------------------------------------------------------

class MixedLetter(NamedTuple):
    """kind "R": β^ε R^i; kind "S": a Steenrod letter."""
    kind: str
    bockstein: int
    index: int


def r_letter(eps: int, index: int) -> MixedLetter:
    return MixedLetter("R", eps, index)


def s_letter(eps: int, index: int) -> MixedLetter:
    return MixedLetter("S", eps, index)


Argument = Union[int, Tuple["MixedWord", "MixedWord"]]


@dataclass(frozen=True)
class MixedWord:
    """
    Letters (outermost first) applied to a generator index or to a bracket.
    Index -1 is the placeholder class of the relation templates.
    """
    p: int
    letters: Tuple[MixedLetter, ...] = ()
    arg: Argument = PLACEHOLDER

    @property
    def is_bracket(self) -> bool:
        return not isinstance(self.arg, int)

    def sort_key(self) -> tuple:
        if self.is_bracket:
            arg_key = (1, self.arg[0].sort_key(), self.arg[1].sort_key())
        else:
            arg_key = (0, self.arg)
        return (arg_key, self.letters)

    def inner(self, k: int) -> "MixedWord":
        return MixedWord(self.p, self.letters[k:], self.arg)

    def prefixed(self, letters: Sequence[MixedLetter]) -> "MixedWord":
        return MixedWord(self.p, tuple(letters) + self.letters, self.arg)

    def letter_drop(self, letter: MixedLetter) -> int:
        if letter.kind == "R":
            return r_letter_drop(self.p, (letter.bockstein, letter.index))
        return steenrod_letter_degree(self.p, SteenrodLetter(letter.bockstein, letter.index))

    def degree(self, degrees: Mapping[int, int]) -> int:
        if self.is_bracket:
            base = self.arg[0].degree(degrees) + self.arg[1].degree(degrees) - 1
        else:
            base = degrees[self.arg]
        return base - sum(self.letter_drop(letter) for letter in self.letters)

    @property
    def weight(self) -> int:
        base = self.arg[0].weight + self.arg[1].weight if self.is_bracket else 1
        return base * self.p ** sum(1 for letter in self.letters if letter.kind == "R")

    def format(self, names: Optional[Mapping[int, str]] = None) -> str:
        names = names or {}
        if self.is_bracket:
            core = f"[{self.arg[0].format(names)}, {self.arg[1].format(names)}]"
        else:
            core = names.get(self.arg, "x")
        parts = []
        for letter in self.letters:
            if letter.kind == "R":
                parts.append(("b" if letter.bockstein else "") + f"R{letter.index}")
            else:
                parts.append(format_steenrod_letter(self.p, SteenrodLetter(letter.bockstein, letter.index)))
        return " ".join(parts + [core])

    def __str__(self) -> str:
        return self.format()


def bracket(u: MixedWord, v: MixedWord) -> MixedWord:
    return MixedWord(u.p, (), (u, v))


def substitute(template: MixedWord, inner: MixedWord) -> MixedWord:
    """Replace the placeholder class of a template by ``inner``."""
    if template.is_bracket:
        left, right = template.arg
        return MixedWord(template.p, template.letters, (substitute(left, inner), substitute(right, inner)))
    if template.arg == PLACEHOLDER:
        return MixedWord(template.p, template.letters + inner.letters, inner.arg)
    return template


def _steenrod_on(p: int, letter: SteenrodLetter, word: MixedWord) -> MixedWord:
    if _is_identity(letter):
        return word
    return word.prefixed([s_letter(letter.bockstein, letter.index)])


# ---------------------------------------------------------------------------
# Nishida and Cartan
# ---------------------------------------------------------------------------

def _nested_bracket_sum(p: int, indices: Sequence[int]) -> Dict[MixedWord, int]:
    """Σ over σ with σ(1) = 1 of [[...[P^{i_σ(1)} x, P^{i_σ(2)} x], ...], P^{i_σ(p)} x]."""
    x = MixedWord(p)
    out: Dict[MixedWord, int] = {}
    args = [_steenrod_on(p, SteenrodLetter(0, i), x) for i in indices]
    for tail in itertools.permutations(range(1, p)):
        nested = args[0]
        for k in tail:
            nested = bracket(nested, args[k])
        accumulate(out, nested, 1, p)
    return out


def _nondecreasing(total: int, parts: int, start: int = 0) -> Iterable[Tuple[int, ...]]:
    if parts == 1:
        if total >= start:
            yield (total,)
        return
    for first in range(start, total // parts + 1):
        for rest in _nondecreasing(total - first, parts - 1, first):
            yield (first,) + rest


def nishida_rewrite(p: int, st, r, class_degree: int, unit: int = 1) -> Dict[MixedWord, int]:
    """
    Move one Steenrod letter past one R-letter on a class of the given degree.

    Terms are templates on the placeholder class: R-letters outside
    Steenrod letters, plus bracket corrections when ``r`` is the restriction
    letter. ``unit`` is the λ relating the restriction and the bottom letter
    on that degree (odd p).

    Raises DegreeMismatchError if ``r`` is not defined on the class and
    RelationNotApplicable for a Bockstein Steenrod letter at odd p.
    """
    check_prime(p)
    st = _as_steenrod_letter(p, st)
    r = (0, r) if isinstance(r, int) else (int(r[0]), int(r[1]))
    if not r_letter_exists(p, r, class_degree):
        raise DegreeMismatchError(f"R letter {r} is not defined on degree {class_degree}")
    x = MixedWord(p)
    out: Dict[MixedWord, int] = {}

    def add(r_eps: int, r_index: int, s: SteenrodLetter, coeff: int) -> None:
        if coeff % p:
            accumulate(out, _steenrod_on(p, s, x).prefixed([r_letter(r_eps, r_index)]), coeff, p)

    bottom = r_bottom(p, class_degree)
    if p == 2:
        a, b = st.index, r[1]
        for c in range(a // 2 + 1):
            add(0, a + b - c, SteenrodLetter(0, c), binom_mod(b - 1 - c, a - 2 * c, 2))
        if r == bottom:
            for low in range((a + 1) // 2):
                term = bracket(_steenrod_on(p, SteenrodLetter(0, low), x),
                               _steenrod_on(p, SteenrodLetter(0, a - low), x))
                accumulate(out, term, 1, p)
        return out

    if st.bockstein:
        raise RelationNotApplicable(f"a Bockstein Steenrod letter passing {r} at p={p}")
    n, (eps, j) = st.index, r
    if eps and 2 * j == -class_degree + 1:
        raise RelationNotApplicable(f"βR{j} is the bottom Bockstein on degree {class_degree}")
    for i in range(n // p + 1):
        sgn = sign(n - i)
        if eps:
            add(1, n + j - i, SteenrodLetter(0, i), sgn * binom_mod((j - i) * (p - 1), n - p * i, p))
            add(0, n + j - i, SteenrodLetter(1, i), sgn * binom_mod((j - i) * (p - 1) - 1, n - p * i - 1, p))
        else:
            add(0, n + j - i, SteenrodLetter(0, i), sgn * binom_mod((j - i) * (p - 1) - 1, n - p * i, p))
    if r == bottom:
        factor = inverse_mod(unit, p)
        for indices in _nondecreasing(n, p):
            add_scaled(out, _nested_bracket_sum(p, indices), factor, p)
    return out


def cartan_bracket(p: int, st, word: MixedWord) -> Dict[MixedWord, int]:
    """A Steenrod letter on a bracket [u, v] (``word`` must be a bare bracket)."""
    check_prime(p)
    st = _as_steenrod_letter(p, st)
    if not word.is_bracket or word.letters:
        raise ValueError(f"cartan_bracket needs a bare bracket, got {word}")
    u, v = word.arg
    out: Dict[MixedWord, int] = {}
    for i in range(st.index + 1):
        rest = st.index - i
        if p == 2 or not st.bockstein:
            pairs = [(SteenrodLetter(0, i), SteenrodLetter(0, rest))]
        else:
            pairs = [(SteenrodLetter(1, i), SteenrodLetter(0, rest)),
                     (SteenrodLetter(0, i), SteenrodLetter(1, rest))]
        for left, right in pairs:
            accumulate(out, bracket(_steenrod_on(p, left, u), _steenrod_on(p, right, v)), 1, p)
    return out


# ---------------------------------------------------------------------------
# canonicalization
# ---------------------------------------------------------------------------

STRATEGIES = ("steenrod-first", "r-first")


def _is_restriction_chain(word: MixedWord, degrees: Mapping[int, int]) -> bool:
    """True if every R-letter of ``word`` is the bottom letter on its argument."""
    total = word.inner(len(word.letters)).degree(degrees)
    for k in range(len(word.letters) - 1, -1, -1):
        letter = word.letters[k]
        if letter.kind == "R":
            if (letter.bockstein, letter.index) != r_bottom(word.p, total):
                return False
        total -= word.letter_drop(letter)
    return True


def _r_runs(letters: Sequence[MixedLetter]) -> List[Tuple[int, int]]:
    runs, start = [], None
    for k, letter in enumerate(list(letters) + [MixedLetter("S", 0, 0)]):
        if letter.kind == "R" and start is None:
            start = k
        elif letter.kind != "R" and start is not None:
            runs.append((start, k))
            start = None
    return runs


class Canonicalizer:
    """Rewrites mixed words to canonical form over fixed generator degrees."""

    def __init__(self, p: int, degrees: Mapping[int, int], strategy: str = "steenrod-first",
                 units: Optional[Mapping[int, int]] = None):
        check_prime(p)
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}; use one of {STRATEGIES}")
        self.p = p
        self.degrees = dict(degrees)
        self.strategy = strategy
        self.units = dict(units or {})
        self._cache: Dict[MixedWord, Dict[MixedWord, int]] = {}

    def _nishida_step(self, word: MixedWord) -> Optional[Dict[MixedWord, int]]:
        letters = word.letters
        positions = [k for k in range(len(letters) - 1)
                     if letters[k].kind == "S" and letters[k + 1].kind == "R"]
        if not positions:
            return None
        k = positions[-1]
        inner = word.inner(k + 2)
        d = inner.degree(self.degrees)
        st, r = letters[k], letters[k + 1]
        templates = nishida_rewrite(self.p, (st.bockstein, st.index), (r.bockstein, r.index), d,
                                    self.units.get(d, 1))
        out: Dict[MixedWord, int] = {}
        for template, coeff in templates.items():
            accumulate(out, substitute(template, inner).prefixed(letters[:k]), coeff, self.p)
        return out

    def _r_step(self, word: MixedWord) -> Optional[Dict[MixedWord, int]]:
        letters = word.letters
        for start, end in _r_runs(letters):
            source = word.inner(end).degree(self.degrees)
            run = RWord(self.p, tuple((l.bockstein, l.index) for l in letters[start:end]))
            if not r_letter_exists(self.p, run.letters[-1], source):
                raise DegreeMismatchError(f"{run} is not defined on degree {source}")
            if is_admissible_rword(run, source):
                continue
            out: Dict[MixedWord, int] = {}
            for normal, coeff in normalize_rword(self.p, run, source).as_rwords().items():
                new = letters[:start] + tuple(r_letter(e, i) for e, i in normal.letters) + letters[end:]
                accumulate(out, MixedWord(self.p, new, word.arg), coeff, self.p)
            return out
        return None

    def _bracket_step(self, word: MixedWord) -> Optional[Dict[MixedWord, int]]:
        u, v = word.arg
        cu, cv = self.canonicalize(u), self.canonicalize(v)
        if cu != {u: 1} or cv != {v: 1}:
            out: Dict[MixedWord, int] = {}
            for (u2, a), (v2, b) in itertools.product(cu.items(), cv.items()):
                accumulate(out, MixedWord(self.p, word.letters, (u2, v2)), a * b, self.p)
            return out
        if not _is_restriction_chain(u, self.degrees) or not _is_restriction_chain(v, self.degrees):
            return {}
        du, dv = u.degree(self.degrees), v.degree(self.degrees)
        if u == v and (self.p == 2 or du % 2):
            return {}
        if u.sort_key() > v.sort_key():
            return {MixedWord(self.p, word.letters, (v, u)): sign(du * dv)}
        if word.letters and word.letters[-1].kind == "S":
            last = word.letters[-1]
            out = {}
            for term, coeff in cartan_bracket(self.p, (last.bockstein, last.index), bracket(u, v)).items():
                accumulate(out, term.prefixed(word.letters[:-1]), coeff, self.p)
            return out
        return None

    def _steenrod_step(self, word: MixedWord) -> Optional[Dict[MixedWord, int]]:
        letters = word.letters
        start = len(letters)
        while start > 0 and letters[start - 1].kind == "S":
            start -= 1
        run = SteenrodWord(self.p, tuple(SteenrodLetter(l.bockstein, l.index) for l in letters[start:]))
        if not run.letters or is_admissible_steenrod(run):
            return None
        out: Dict[MixedWord, int] = {}
        for normal, coeff in steenrod_adem_rewrite(run).items():
            new = letters[:start] + tuple(s_letter(e, i) for e, i in normal.letters)
            accumulate(out, MixedWord(self.p, new, word.arg), coeff, self.p)
        return out

    def step(self, word: MixedWord) -> Optional[Dict[MixedWord, int]]:
        if word.is_bracket:
            replacement = self._bracket_step(word)
            if replacement is not None:
                return replacement
        ordered = ((self._nishida_step, self._r_step) if self.strategy == "steenrod-first"
                   else (self._r_step, self._nishida_step))
        for rule in ordered + (self._steenrod_step,):
            replacement = rule(word)
            if replacement is not None:
                return replacement
        return None

    def canonicalize(self, word: MixedWord) -> Dict[MixedWord, int]:
        cached = self._cache.get(word)
        if cached is None:
            cached = normalize({word: 1}, self.step, self.p, label="mixed canonical")
            self._cache[word] = cached
        return cached

    def canonicalize_sum(self, terms: Mapping[MixedWord, int]) -> Dict[MixedWord, int]:
        out: Dict[MixedWord, int] = {}
        for word, coeff in terms.items():
            add_scaled(out, self.canonicalize(word), coeff, self.p)
        return out


def canonicalize(word: MixedWord, class_degree: int, strategy: str = "steenrod-first") -> Dict[MixedWord, int]:
    """Canonical form of a word on the placeholder class of the given degree."""
    return Canonicalizer(word.p, {PLACEHOLDER: class_degree}, strategy).canonicalize(word)


# ---------------------------------------------------------------------------
# S-linear basis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlinearElement:
    word: MixedWord
    degree: int
    weight: int


def _lyndon_tree(p: int, word: Tuple[int, ...], generators: Sequence[SteenrodWord]) -> MixedWord:
    if len(word) == 1:
        theta = generators[word[0]]
        return MixedWord(p, tuple(s_letter(e, i) for e, i in theta.letters), 0)
    u, v = standard_factorization(word)
    return bracket(_lyndon_tree(p, u, generators), _lyndon_tree(p, v, generators))


def slinear_op_basis(j: int, degree_window: DegreeWindow, weight_cap: int,
                     p: int = 2) -> Tuple[DimTable, List[SlinearElement]]:
    """
    Unary S-linear operations on a class of degree j: the free algebra on
    Σ^j of the Steenrod algebra, one generator per admissible monomial θ in
    degree j - |θ|.
    """
    check_prime(p)
    lo, hi = degree_window
    if hi is not None and hi < lo:
        return DimTable(), []
    # no element built from a generator below this degree reaches the window
    floor = min(lo, 1) - (weight_cap - 1) * max(j - 1, 0)
    generators = [theta for n in range(0, j - floor + 1) for theta in admissible_monomials(p, n)]
    if not generators:
        return DimTable(), []
    algebra = FreePartitionLie(p, tuple(j - theta.degree for theta in generators),
                               tuple(str(theta) for theta in generators))
    elements: List[SlinearElement] = []
    for elem in algebra.basis(degree_window, weight_cap):
        core = _lyndon_tree(p, elem.word, generators)
        if elem.op.bracket:
            core = bracket(core, core)
        r_part = tuple(r_letter(e, i) for e, i in elem.op.letters)
        word = MixedWord(p, r_part + core.letters, core.arg)
        elements.append(SlinearElement(word, elem.degree, elem.weight))
    logger.debug("slinear basis on degree %d (p=%d): %d elements from %d generators",
                 j, p, len(elements), len(generators))
    return DimTable.from_items(elements), elements
