"""Tests for the operation word syntax."""

import pytest

from src.algebra.dyer_lashof import PrimalWord
from src.algebra.errors import WordSyntaxError
from src.algebra.koszul_dual import DualOpWord
from src.algebra.power_ring import RWord
from src.algebra.steenrod import MixedWord, SteenrodWord, r_letter, s_letter
from src.utils.word_syntax import (Token, parse_dual, parse_mixed, parse_primal, parse_rword,
                                   parse_steenrod, tokenize)


class TestTokenize:

    def test_letters(self):
        assert tokenize("R3 bR-2 B", 3) == [Token("R", 0, 3), Token("R", 1, -2), Token("B", 0, 0)]
        assert tokenize("Q3* bP1 P0", 3) == [Token("Q*", 0, 3), Token("S", 1, 1), Token("S", 0, 0)]

    def test_identity(self):
        assert tokenize("1", 2) == [] and tokenize("  ", 5) == []

    @pytest.mark.parametrize("text,p", [("R", 2), ("X2", 2), ("R2 B R1", 3), ("B", 2), ("bR1", 2),
                                         ("P1", 2), ("Sq1", 3), ("R2*", 2)])
    def test_rejected(self, text, p):
        with pytest.raises(WordSyntaxError):
            tokenize(text, p)

    def test_error_is_a_value_error(self):
        with pytest.raises(ValueError):
            tokenize("R1.5", 2)


class TestParse:

    def test_rword(self):
        assert parse_rword("R3 R1", 2) == RWord.of(2, [3, 1])
        assert parse_rword("bR2 B", 3) == RWord.of(3, [(1, 2)], bracket=True)
        assert parse_rword("1", 2).is_identity
        assert str(parse_rword("R2 R1", 2)) == "R2 R1"

    def test_primal(self):
        assert parse_primal("Q5 Q1", 2) == PrimalWord.of(2, [5, 1])
        assert parse_primal("bQ2 Q1", 3) == PrimalWord.of(3, [(1, 2), (0, 1)])

    def test_dual(self):
        word = parse_dual("Q3* Q1*", 2, 2)
        assert word == DualOpWord.of(2, 2, [3, 1])

    def test_steenrod(self):
        assert parse_steenrod("Sq2 Sq1", 2) == SteenrodWord.of(2, [2, 1])
        assert parse_steenrod("bP1 P0", 3) == SteenrodWord.of(3, [(1, 1), (0, 0)])
        with pytest.raises(WordSyntaxError):
            parse_steenrod("Sq-1", 2)

    def test_mixed(self):
        assert parse_mixed("Sq1 R2", 2) == MixedWord(2, (s_letter(0, 1), r_letter(0, 2)))
        assert parse_mixed("R1", 2, arg=0).arg == 0
        with pytest.raises(WordSyntaxError):
            parse_mixed("Sq-2 R1", 2)

    def test_wrong_kind(self):
        with pytest.raises(WordSyntaxError):
            parse_rword("Q2", 2)
        with pytest.raises(WordSyntaxError):
            parse_primal("R2 B", 3)
        with pytest.raises(WordSyntaxError):
            parse_dual("Q2", 2, 0)
