"""Tests for the primal Dyer-Lashof algebra and free Poly_R-algebras."""

import itertools

import pytest

from src.algebra.dyer_lashof import (PolyGenerator, PolyRFactor, PolyRMonomial, PrimalLetter,
                                     PrimalWord, free_polyR_basis, is_admissible_primal,
                                     polyR_monad_mult, polyR_monomials, primal_adem_rewrite,
                                     unstable_reduce)
from src.algebra.errors import UnsupportedPrimeError


def word(p, *letters):
    return PrimalWord.of(p, letters)


def gen_mono(gen):
    return PolyRMonomial.generator(2, gen)


def power_of(*factors, p=2):
    return PolyRMonomial.from_factors(p, list(factors))[1]


class TestAdemRewrite:

    def test_examples_at_two(self):
        assert primal_adem_rewrite(word(2, 5, 1)) == {word(2, 3, 3): 1}
        assert primal_adem_rewrite(word(2, 2, 2)) == {word(2, 2, 2): 1}
        assert primal_adem_rewrite(word(2, 3, 1)) == {}

    def test_odd_prime_relation(self):
        # Q^5 Q^1 = -Q^4 Q^2 at p = 3
        assert primal_adem_rewrite(word(3, (0, 5), (0, 1))) == {word(3, (0, 4), (0, 2)): 2}
        assert primal_adem_rewrite(word(3, (0, 4), (0, 1))) == {}

    def test_admissible_words_are_fixed(self):
        for a, b in itertools.product(range(-6, 7), repeat=2):
            w = word(2, a, b)
            if is_admissible_primal(w):
                assert primal_adem_rewrite(w) == {w: 1}

    def test_bockstein_squares_vanish(self):
        # β Q^r β Q^s only keeps terms with a Bockstein on both letters
        for r in range(3, 9):
            for w in primal_adem_rewrite(word(3, (1, r), (1, 1))):
                assert all(letter.bockstein == 1 for letter in w.letters)

    def test_confluence_at_two(self):
        for letters in itertools.product(range(-10, 11), repeat=3):
            w = PrimalWord.of(2, letters)
            assert primal_adem_rewrite(w, "leftmost") == primal_adem_rewrite(w, "rightmost"), letters

    def test_confluence_at_three(self):
        alphabet = [(e, i) for e in (0, 1) for i in range(-4, 5)]
        for letters in itertools.product(alphabet, repeat=3):
            w = PrimalWord.of(3, letters)
            assert primal_adem_rewrite(w, "leftmost") == primal_adem_rewrite(w, "rightmost"), letters

    @pytest.mark.parametrize("p", [2, 3])
    def test_degree_and_weight_preserved(self, p):
        alphabet = range(-5, 9) if p == 2 else [(e, i) for e in (0, 1) for i in range(-3, 6)]
        for letters in itertools.product(alphabet, repeat=2):
            w = PrimalWord.of(p, letters)
            for term in primal_adem_rewrite(w):
                assert term.degree == w.degree
                assert term.weight == w.weight
                assert is_admissible_primal(term)

    def test_unknown_strategy(self):
        with pytest.raises(ValueError):
            primal_adem_rewrite(word(2, 5, 1), strategy="random")


class TestUnstability:

    def test_examples(self):
        x = PolyGenerator("x", 1)
        assert unstable_reduce(word(2, 0), x) == {}
        assert unstable_reduce(word(2, 1), x) == {power_of(PolyRFactor(PrimalWord(2), x), PolyRFactor(PrimalWord(2), x)): 1}
        assert unstable_reduce(word(2, 2), x) == {PolyRMonomial.single(PolyRFactor(word(2, 2), x)): 1}

    def test_integer_degree_shorthand(self):
        (mono,) = unstable_reduce(word(2, 3), 1)
        assert mono.degree == 4

    def test_iterated_bottom_is_a_power(self):
        x = PolyGenerator("x", 1)
        base = PolyRFactor(PrimalWord(2), x)
        # Q^2 Q^1 x = Q^2(x^2) = x^4
        assert unstable_reduce(word(2, 2, 1), x) == {power_of(*[base] * 4): 1}
        # Q^2 lies below the degree of Q^2 x
        assert unstable_reduce(word(2, 2, 2), x) == {}

    def test_odd_prime(self):
        x = PolyGenerator("x", 2)
        base = PolyRFactor(PrimalWord(3), x)
        assert unstable_reduce(word(3, (0, 0)), x) == {}
        assert unstable_reduce(word(3, (0, 1)), x) == {power_of(base, base, base, p=3): 1}
        assert unstable_reduce(word(3, (1, 1)), x) == {}
        assert len(unstable_reduce(word(3, (0, 2)), x)) == 1


class TestFreeBasis:

    def test_single_generator_example(self):
        basis = free_polyR_basis([1], (None, 4), 2)
        assert sorted(str(m) for m in basis) == ["Q2 x", "Q3 x", "x", "x·x"]
        assert sorted(m.degree for m in basis) == [1, 2, 3, 4]

    def test_weight_one_is_generators(self):
        basis = free_polyR_basis([1, 3, -2], (-10, 10), 1)
        assert sorted(str(m) for m in basis) == ["x", "y", "z"]

    def test_two_generators_degree_two(self):
        basis = free_polyR_basis([1, 1], (2, 2), 2)
        assert sorted(str(m) for m in basis) == ["x·x", "x·y", "y·y"]

    def test_empty_window(self):
        assert free_polyR_basis([1], (5, 4), 4) == []

    @pytest.mark.parametrize("d", range(-3, 4))
    def test_weight_two_slice_is_all_operations(self, d):
        lo, hi = 2 * d - 5, 2 * d + 12
        basis = [m for m in free_polyR_basis([d], (lo, hi), 2) if m.weight == 2]
        degrees = sorted(m.degree for m in basis)
        # Q^i x for i >= d, with Q^d x = x·x
        assert degrees == [d + i for i in range(d, hi - d + 1) if lo <= d + i]
        assert sum(1 for m in basis if m.factors[0][1] == 2) == 1

    def test_odd_prime_exterior(self):
        basis = free_polyR_basis([1], (None, 12), 3, p=3)
        assert sorted(m.degree for m in basis) == [1, 4, 5, 8, 9, 12]
        assert all(mult == 1 for m in basis for _, mult in m.factors)

    def test_even_generator_power_at_three(self):
        basis = free_polyR_basis([2], (None, 6), 3, p=3)
        assert sorted(str(m) for m in basis) == ["x", "x·x", "x·x·x"]

    def test_monomials_over_monomials(self):
        x = PolyGenerator("x", 1)
        square = power_of(PolyRFactor(PrimalWord(2), x), PolyRFactor(PrimalWord(2), x))
        basis = polyR_monomials([square], (None, 6), 4)
        assert [(m.degree, m.weight) for m in basis] == [(2, 2), (4, 4), (5, 4), (6, 4)]
        assert polyR_monomials([square], (None, 6), 1) == []

    def test_generators_agree_with_free_basis(self):
        assert polyR_monomials([PolyGenerator("x", -1)], (-6, 3), 4) == free_polyR_basis([-1], (-6, 3), 4)


class TestMonad:

    def test_cartan_example(self):
        x, y = PolyGenerator("x", 1), PolyGenerator("y", 1)
        fx, fy = PolyRFactor(PrimalWord(2), x), PolyRFactor(PrimalWord(2), y)
        inner = power_of(fx, fy)
        outer = PolyRMonomial.single(PolyRFactor(word(2, 2), inner))
        assert polyR_monad_mult(outer) == {power_of(fx, fx, fy, fy): 1}

    def test_unit_compatibility(self):
        x = PolyGenerator("x", 1)
        for i in range(-1, 6):
            outer = PolyRMonomial.single(PolyRFactor(word(2, i), gen_mono(x)))
            assert polyR_monad_mult(outer) == unstable_reduce(word(2, i), x)

    def test_product_of_basis_monomials(self):
        x, y = PolyGenerator("x", 1), PolyGenerator("y", 2)
        fx, fy = PolyRFactor(PrimalWord(2), x), PolyRFactor(PrimalWord(2), y)
        outer = power_of(PolyRFactor(PrimalWord(2), gen_mono(x)), PolyRFactor(PrimalWord(2), power_of(fx, fy)))
        assert polyR_monad_mult(outer) == {power_of(fx, fx, fy): 1}

    def test_degree_and_weight_preserved(self):
        x, y = PolyGenerator("x", 1), PolyGenerator("y", 2)
        fx, fy = PolyRFactor(PrimalWord(2), x), PolyRFactor(PrimalWord(2), y)
        inner = power_of(fx, fy)
        for letters in [(4,), (5,), (6, 3), (7, 4), (8, 4)]:
            outer = PolyRMonomial.single(PolyRFactor(PrimalWord.of(2, letters), inner))
            for mono in polyR_monad_mult(outer):
                assert mono.degree == outer.degree
                assert mono.weight == outer.weight

    def test_odd_prime_rejected(self):
        x = PolyGenerator("x", 2)
        outer = PolyRMonomial.single(PolyRFactor(PrimalWord(3, (PrimalLetter(0, 2),)), PolyRMonomial.generator(3, x)))
        with pytest.raises(UnsupportedPrimeError):
            polyR_monad_mult(outer)
