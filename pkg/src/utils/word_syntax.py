"""
Text syntax for operation words.

Letters are whitespace separated, outermost first, and applied right to left:

    R3 R1      power-ring letters R^3 R^1
    bR2        β R^2 (odd p)
    R2 B       trailing B: the self-bracket of an even class (odd p)
    Q5 bQ1     primal Dyer-Lashof letters
    Q3* Q1*    dual letters (Q^3)^* (Q^1)^*
    Sq2 Sq1    Steenrod squares (p = 2)
    P1 bP1     reduced powers and their Bocksteins (odd p)
    1          the identity (empty word)

Indices may be negative (``R-1``). Anything else raises WordSyntaxError.
"""

import re
from typing import List, NamedTuple, Optional

from src.algebra.dyer_lashof import PrimalWord
from src.algebra.errors import WordSyntaxError
from src.algebra.koszul_dual import DualOpWord
from src.algebra.power_ring import RWord
from src.algebra.steenrod import MixedWord, SteenrodWord, r_letter, s_letter

TOKEN = re.compile(r"^(b?)(R|Q|Sq|P)(-?\d+)(\*?)$")
IDENTITY = {"", "1"}


class Token(NamedTuple):
    """kind is one of R, Q, Q*, S (a Steenrod letter) or B."""
    kind: str
    bockstein: int
    index: int


def tokenize(text: str, p: int) -> List[Token]:
    if text.strip() in IDENTITY:
        return []
    tokens = []
    parts = text.split()
    for k, part in enumerate(parts):
        if part == "B":
            if k != len(parts) - 1:
                raise WordSyntaxError(f"B must be the last letter of {text!r}")
            if p == 2:
                raise WordSyntaxError("B only exists at odd primes")
            tokens.append(Token("B", 0, 0))
            continue
        match = TOKEN.match(part)
        if match is None:
            raise WordSyntaxError(f"cannot parse letter {part!r} in {text!r}")
        bock, name, index, star = match.groups()
        eps = 1 if bock else 0
        if star and name != "Q":
            raise WordSyntaxError(f"only Q letters have duals, got {part!r}")
        if p == 2 and (eps or name == "P"):
            raise WordSyntaxError(f"{part!r} is an odd-primary letter")
        if p != 2 and name == "Sq":
            raise WordSyntaxError(f"{part!r} only exists at p = 2; use P and bP")
        kind = "S" if name in ("Sq", "P") else name + star
        tokens.append(Token(kind, eps, int(index)))
    return tokens


def _only(tokens: List[Token], kinds: set, what: str) -> None:
    stray = [t for t in tokens if t.kind not in kinds]
    if stray:
        raise WordSyntaxError(f"unexpected {stray[0].kind} letter in {what}")


def parse_rword(text: str, p: int) -> RWord:
    tokens = tokenize(text, p)
    _only(tokens, {"R", "B"}, "an R-word")
    bracket = bool(tokens) and tokens[-1].kind == "B"
    letters = [(t.bockstein, t.index) for t in tokens if t.kind == "R"]
    return RWord.of(p, letters, bracket)


def parse_primal(text: str, p: int) -> PrimalWord:
    tokens = tokenize(text, p)
    _only(tokens, {"Q"}, "a primal word")
    return PrimalWord.of(p, [(t.bockstein, t.index) for t in tokens])


def parse_dual(text: str, p: int, source: int, variant: str = "additive") -> DualOpWord:
    tokens = tokenize(text, p)
    _only(tokens, {"Q*"}, "a dual word")
    return DualOpWord.of(p, source, [(t.bockstein, t.index) for t in tokens], variant)


def parse_steenrod(text: str, p: int) -> SteenrodWord:
    tokens = tokenize(text, p)
    _only(tokens, {"S"}, "a Steenrod word")
    try:
        return SteenrodWord.of(p, [(t.bockstein, t.index) for t in tokens])
    except ValueError as exc:
        raise WordSyntaxError(str(exc)) from exc


def parse_mixed(text: str, p: int, arg: Optional[int] = None) -> MixedWord:
    """Steenrod and R letters on the placeholder class (or generator ``arg``)."""
    tokens = tokenize(text, p)
    _only(tokens, {"R", "S"}, "a mixed word")
    for t in tokens:
        if t.kind == "S" and t.index < 0:
            raise WordSyntaxError(f"negative Steenrod index in {text!r}")
    letters = tuple(r_letter(t.bockstein, t.index) if t.kind == "R" else s_letter(t.bockstein, t.index)
                    for t in tokens)
    return MixedWord(p, letters) if arg is None else MixedWord(p, letters, arg)
