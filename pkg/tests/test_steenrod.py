"""Tests for Steenrod letters, the Nishida and Cartan rewrites and the S-linear basis."""

import itertools

import pytest

from src.algebra.errors import DegreeMismatchError, RelationNotApplicable
from src.algebra.steenrod import (PLACEHOLDER, Canonicalizer, MixedWord, SteenrodWord,
                                  admissible_monomials, bracket, canonicalize, cartan_bracket,
                                  is_admissible_steenrod, nishida_rewrite, r_letter, s_letter,
                                  slinear_op_basis, steenrod_adem_rewrite)


def sq(*indices):
    return SteenrodWord.of(2, indices)


def x_with(*letters, p=2):
    return MixedWord(p, tuple(letters))


class TestSteenrodAdem:

    def test_examples(self):
        assert steenrod_adem_rewrite(sq(1, 1)) == {}
        assert steenrod_adem_rewrite(sq(2, 2)) == {sq(3, 1): 1}
        assert steenrod_adem_rewrite(sq(2, 1)) == {sq(2, 1): 1}

    def test_identity_letters_vanish(self):
        assert steenrod_adem_rewrite(sq(0, 3, 0)) == {sq(3): 1}
        assert steenrod_adem_rewrite(SteenrodWord.of(3, [(0, 0)])) == {SteenrodWord(3): 1}

    def test_sq1_sq2(self):
        assert steenrod_adem_rewrite(sq(1, 2)) == {sq(3): 1}

    def test_odd_prime(self):
        # P^1 P^1 = 2 P^2 at p = 3
        assert steenrod_adem_rewrite(SteenrodWord.of(3, [(0, 1), (0, 1)])) == {SteenrodWord.of(3, [(0, 2)]): 2}
        # β β = 0
        assert steenrod_adem_rewrite(SteenrodWord.of(3, [(1, 0), (1, 0)])) == {}

    @pytest.mark.parametrize("p", [2, 3])
    def test_normal_forms_are_admissible_and_homogeneous(self, p):
        letters = [(0, i) for i in range(4)] + ([(1, i) for i in range(3)] if p != 2 else [])
        for word in itertools.product(letters, repeat=3):
            w = SteenrodWord.of(p, word)
            for normal in steenrod_adem_rewrite(w):
                assert is_admissible_steenrod(normal) or not normal.letters
                assert normal.degree == w.degree

    @pytest.mark.parametrize("p", [2, 3])
    def test_strategies_agree(self, p):
        letters = [(0, i) for i in range(1, 4)] + ([(1, 1)] if p != 2 else [])
        for word in itertools.product(letters, repeat=3):
            w = SteenrodWord.of(p, word)
            assert steenrod_adem_rewrite(w, "leftmost") == steenrod_adem_rewrite(w, "rightmost")

    def test_monomial_counts(self):
        assert [len(admissible_monomials(2, n)) for n in range(8)] == [1, 1, 1, 2, 2, 2, 3, 4]
        assert [str(w) for w in admissible_monomials(2, 3)] == ["Sq2 Sq1", "Sq3"]

    def test_odd_monomials(self):
        assert [str(w) for w in admissible_monomials(3, 1)] == ["bP0"]
        assert len(admissible_monomials(3, 5)) == 2  # bP1, P1 bP0
        assert admissible_monomials(3, -1) == []


class TestNishida:

    def test_non_bottom(self):
        assert nishida_rewrite(2, 1, 2, 5) == {x_with(r_letter(0, 3)): 1}

    def test_bottom_of_even_class(self):
        for d in (-4, 0, 2, 6):
            bracket_term = bracket(MixedWord(2), x_with(s_letter(0, 1)))
            assert nishida_rewrite(2, 1, -d + 1, d) == {bracket_term: 1}

    def test_bottom_of_odd_class(self):
        # binom(-|x|, 1) = 1 for odd |x|, so the R term survives
        result = nishida_rewrite(2, 1, 0, 1)
        assert result[x_with(r_letter(0, 1))] == 1
        assert result[bracket(MixedWord(2), x_with(s_letter(0, 1)))] == 1

    def test_sq0_is_identity(self):
        assert nishida_rewrite(2, 0, 3, 4) == {x_with(r_letter(0, 3)): 1}

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_homogeneous(self, p):
        for d in range(-4, 6):
            bottom = -d + 1 if p == 2 else (-d + 1) // 2
            for n in range(0, 5):
                for j in range(bottom, bottom + 4):
                    if p != 2 and 2 * j <= -d:
                        continue
                    st, r = (n if p == 2 else (0, n)), (j if p == 2 else (0, j))
                    source = x_with(s_letter(0, n), r_letter(0, j), p=p)
                    degree = source.degree({PLACEHOLDER: d})
                    for term in nishida_rewrite(p, st, r, d):
                        assert term.degree({PLACEHOLDER: d}) == degree, (p, n, j, d, term)
                        assert term.weight == p

    def test_odd_formula(self):
        # P^1 R^1 on a class of degree 3 at p = 3: i = 0 only, (-1)^1 binom(1, 1) = -1
        assert nishida_rewrite(3, (0, 1), (0, 1), 3) == {x_with(r_letter(0, 2), p=3): 2}

    def test_odd_bottom_brackets(self):
        # P^1 on the restriction letter of a degree-1 class at p = 3
        result = nishida_rewrite(3, (0, 1), (0, 0), 1)
        x, px = MixedWord(3), x_with(s_letter(0, 1), p=3)
        nested = {bracket(bracket(x, x), px), bracket(bracket(x, px), x)}
        assert nested <= set(result)

    def test_bockstein_letters_not_applicable(self):
        with pytest.raises(RelationNotApplicable, match="relation not applicable"):
            nishida_rewrite(3, (1, 1), (0, 2), 3)

    def test_undefined_r_letter(self):
        with pytest.raises(DegreeMismatchError):
            nishida_rewrite(2, 1, -5, 4)


class TestCartan:

    def test_sq1(self):
        x, y = MixedWord(2, (), 0), MixedWord(2, (), 1)
        expected = {bracket(MixedWord(2, (s_letter(0, 1),), 0), y): 1,
                    bracket(x, MixedWord(2, (s_letter(0, 1),), 1)): 1}
        assert cartan_bracket(2, 1, bracket(x, y)) == expected

    def test_sq0(self):
        x, y = MixedWord(2, (), 0), MixedWord(2, (), 1)
        assert cartan_bracket(2, 0, bracket(x, y)) == {bracket(x, y): 1}

    def test_bockstein(self):
        x, y = MixedWord(3, (), 0), MixedWord(3, (), 1)
        result = cartan_bracket(3, (1, 1), bracket(x, y))
        assert len(result) == 4
        assert bracket(MixedWord(3, (s_letter(1, 1),), 0), y) in result
        assert bracket(x, MixedWord(3, (s_letter(1, 1),), 1)) in result

    def test_needs_bracket(self):
        with pytest.raises(ValueError):
            cartan_bracket(2, 1, MixedWord(2))


class TestCanonical:

    def test_pushes_steenrod_inward(self):
        word = x_with(s_letter(0, 1), r_letter(0, 2))
        assert canonicalize(word, 5) == {x_with(r_letter(0, 3)): 1}

    def test_sq1_on_bottom_of_even_class(self):
        word = x_with(s_letter(0, 1), r_letter(0, -1))
        (term, coeff), = canonicalize(word, 2).items()
        assert coeff == 1 and term.is_bracket

    def test_terminates_and_is_canonical(self):
        degrees = {PLACEHOLDER: 9}
        canon = Canonicalizer(2, degrees)
        for a, b, c in itertools.product(range(0, 5), range(0, 6), range(0, 6)):
            word = x_with(s_letter(0, a), r_letter(0, b), r_letter(0, c))
            for term in canon.canonicalize(word):
                kinds = [letter.kind for letter in term.letters]
                assert kinds == sorted(kinds)  # every R before every S
                assert term.degree(degrees) == word.degree(degrees)

    def test_local_confluence(self, rng):
        degrees = {PLACEHOLDER: 12}
        first = Canonicalizer(2, degrees, "steenrod-first")
        second = Canonicalizer(2, degrees, "r-first")
        for _ in range(60):
            a, b, c = rng.randint(0, 8), rng.randint(0, 8), rng.randint(0, 8)
            word = x_with(s_letter(0, a), r_letter(0, b), r_letter(0, c))
            assert first.canonicalize(word) == second.canonicalize(word), (a, b, c)

    def test_operations_kill_brackets(self):
        degrees = {0: 3, 1: 4}
        canon = Canonicalizer(2, degrees)
        word = MixedWord(2, (), (MixedWord(2, (), 0), MixedWord(2, (r_letter(0, 1),), 1)))
        assert canon.canonicalize(word) == {}

    def test_antisymmetry(self):
        degrees = {0: 3, 1: 4}
        canon = Canonicalizer(3, degrees)
        x, y = MixedWord(3, (), 0), MixedWord(3, (), 1)
        assert canon.canonicalize(bracket(y, x)) == {bracket(x, y): 1}
        odd = Canonicalizer(3, {0: 3, 1: 5})
        assert odd.canonicalize(bracket(y, x)) == {bracket(x, y): 2}
        assert odd.canonicalize(bracket(x, x)) == {}


class TestSlinearBasis:

    def test_weight_one_counts(self):
        table, _ = slinear_op_basis(3, (-10, 3), 1)
        assert [table[(3 - k, 1)] for k in range(4)] == [1, 1, 1, 2]

    def test_weight_two_is_R_on_generators(self):
        j = 0
        table, basis = slinear_op_basis(j, (-4, 4), 2)
        for elem in basis:
            assert elem.weight in (1, 2)
            if elem.weight == 2 and not elem.word.is_bracket:
                assert elem.word.letters[0].kind == "R"
        assert table[(0, 1)] == 1

    def test_empty_window(self):
        table, basis = slinear_op_basis(0, (5, 2), 2)
        assert basis == [] and table == type(table)()
