"""Tests for the Koszul-dual ringoids: relations, normal forms, Ext bases."""

import itertools

import pytest

from src.algebra.errors import RelationNotApplicable
from src.algebra.fp_core import add_scaled
from src.algebra.koszul_dual import (DualElement, DualLetter, DualOpWord, dual_adem_rewrite,
                                     dual_pair_relation, dual_relation_from_primal,
                                     is_admissible_dual, normal_form_dual, normal_form_word,
                                     suspend, unstable_ext_basis)


def letters(*pairs):
    return tuple(DualLetter(0, x) if isinstance(x, int) else DualLetter(*x) for x in pairs)


class TestAdmissibility:

    def test_examples(self):
        assert is_admissible_dual(DualOpWord.of(2, 2, [3, 1]))
        assert not is_admissible_dual(DualOpWord.of(2, 2, [2, 1]))
        assert not is_admissible_dual(DualOpWord.of(3, 1, [(0, 2), (1, 1)]))

    def test_innermost_bound_depends_on_variant(self):
        assert not is_admissible_dual(DualOpWord.of(2, 1, [-1]))
        assert is_admissible_dual(DualOpWord.of(2, 1, [-1], variant="full"))


class TestRelations:

    def test_examples_at_two(self):
        assert dual_adem_rewrite(2, 1, 1, 5).as_dict() == {letters(2, 0): 1}
        assert dual_adem_rewrite(2, 2, 1, 10).is_zero()

    def test_example_at_three(self):
        # c = -1 contributes as well as c = 0
        assert dual_adem_rewrite(3, (0, 1), (0, 1), 40).as_dict() == {
            letters((0, 2), (0, 0)): 1,
            letters((0, 3), (0, -1)): 2,
        }

    def test_not_applicable(self):
        with pytest.raises(RelationNotApplicable, match="relation not applicable"):
            dual_adem_rewrite(2, 3, 1, 2)
        with pytest.raises(RelationNotApplicable):
            # (Q^1)* does not exist on degree -1
            dual_adem_rewrite(2, 1, 1, 0)

    def test_right_hand_sides_avoid_the_bottom(self):
        for d in range(-4, 5):
            for b in range(-d + 1, 9):
                for a in range(b - d + 1, 2 * b + 1):
                    for term in dual_pair_relation(2, DualLetter(0, a), DualLetter(0, b), d):
                        assert term[1].index > -d

    @pytest.mark.parametrize("p", [2, 3])
    def test_relations_match_primal_annihilator(self, p):
        d = 400
        bocksteins = [(0, 0)] if p == 2 else list(itertools.product((0, 1), repeat=2))
        for (e1, e2), b in itertools.product(bocksteins, range(-3, 7)):
            for a in range(-6, p * b + 1):
                outer, inner = DualLetter(e1, a), DualLetter(e2, b)
                if a > p * b - e2:
                    continue
                expected = dual_pair_relation(p, outer, inner, d)
                assert dual_relation_from_primal(p, outer, inner) == expected, (outer, inner)


class TestNormalForm:

    def test_examples(self):
        assert normal_form_word(DualOpWord.of(2, 5, [1, 1])).as_dict() == {letters(2, 0): 1}
        admissible = DualOpWord.of(2, 2, [3, 1])
        assert normal_form_word(admissible).as_dict() == {admissible.letters: 1}
        assert normal_form_word(DualOpWord.of(2, 1, [-1])).is_zero()

    def test_full_variant_bottom_letters(self):
        # (Q^{a-j})*(Q^a)* = 0: a bottom letter that is not innermost vanishes
        assert normal_form_word(DualOpWord.of(2, 3, [-2, 1], variant="full")).is_zero()
        for word in ([-1], [4, -1]):
            w = DualOpWord.of(2, 1, word, variant="full")
            assert normal_form_word(w).as_dict() == {w.letters: 1}

    @pytest.mark.parametrize("p,indices", [(2, range(-8, 9)), (3, range(-3, 4))])
    def test_confluence(self, p, indices):
        alphabet = [(0, i) for i in indices] if p == 2 else [(e, i) for e in (0, 1) for i in indices]
        for j in range(-4, 5):
            for word in itertools.product(alphabet, repeat=3):
                elem = DualElement.from_word(DualOpWord.of(p, j, word))
                assert normal_form_dual(elem, "leftmost") == normal_form_dual(elem, "rightmost"), (j, word)

    def test_full_variant_confluence(self):
        for j in range(-3, 4):
            for word in itertools.product(range(-6, 7), repeat=3):
                elem = DualElement.from_word(DualOpWord.of(2, j, word, variant="full"))
                assert normal_form_dual(elem, "leftmost") == normal_form_dual(elem, "rightmost")

    def test_full_variant_is_additive_at_odd_primes(self):
        assert DualOpWord.of(3, 2, [(0, 1), (1, 0)], variant="full").variant == "additive"

    @pytest.mark.parametrize("p", [2, 3])
    def test_bidegrees_preserved(self, p):
        alphabet = [(0, i) for i in range(-4, 7)] if p == 2 else [(e, i) for e in (0, 1) for i in range(-2, 4)]
        for j in range(-3, 4):
            for word in itertools.product(alphabet, repeat=2):
                w = DualOpWord.of(p, j, word)
                normal = normal_form_word(w)
                assert normal.bidegrees() <= {(w.filtration, w.target_internal, w.weight)}
                assert all(is_admissible_dual(term) for term, _ in normal.words())

    def test_idempotent_and_linear(self):
        x = DualElement.from_terms(2, 3, {letters(1, 1): 1, letters(2, 1): 1})
        y = DualElement.from_terms(2, 3, {letters(2, 2): 1, letters(1, 1): 1})
        nx, ny = normal_form_dual(x), normal_form_dual(y)
        assert normal_form_dual(nx) == nx
        total = x.as_dict()
        add_scaled(total, y.as_dict(), 1, 2)
        expected = nx.as_dict()
        add_scaled(expected, ny.as_dict(), 1, 2)
        assert normal_form_dual(x.with_terms(total)).as_dict() == expected


class TestSuspension:

    def test_example(self):
        elem = DualElement.from_word(DualOpWord.of(2, 1, [0]))
        lifted = suspend(elem, 1)
        assert lifted.source == 2 and lifted.as_dict() == {letters(0): 1}
        assert lifted.words()[0][0].weight == elem.words()[0][0].weight

    def test_admissible_words_stay_admissible(self):
        for j in range(-3, 4):
            for word in unstable_ext_basis(j, "additive", 3, (-20, None)):
                lifted = DualOpWord(2, j + 1, word.letters)
                assert is_admissible_dual(lifted)

    @pytest.mark.parametrize("variant", ["additive", "full"])
    def test_commutes_with_normal_form(self, variant):
        for j in range(-3, 4):
            for word in itertools.product(range(-5, 6), repeat=2):
                w = DualOpWord.of(2, j, word, variant=variant)
                if not w.exists() or (variant == "full" and w.letters[0].index == -w.degrees()[0]):
                    continue
                elem = DualElement.from_word(w)
                assert normal_form_dual(suspend(elem, 1)) == suspend(normal_form_dual(elem), 1)


class TestExtBasis:

    def test_full_variant_filtration_one(self):
        words = [w for w in unstable_ext_basis(1, "full", 1, (-6, None)) if w.length == 1]
        assert sorted(w.letters[0].index for w in words) == list(range(-1, 7))

    def test_additive_variant_filtration_one(self):
        words = [w for w in unstable_ext_basis(1, "additive", 1, (-6, None)) if w.length == 1]
        assert sorted(w.letters[0].index for w in words) == list(range(0, 7))

    def test_filtration_zero(self):
        assert [w.letters for w in unstable_ext_basis(3, "full", 0, (-10, None))] == [()]

    def test_words_are_admissible_and_in_window(self):
        for p in (2, 3):
            for word in unstable_ext_basis(2, "full", 3, (-25, 4), p=p):
                assert is_admissible_dual(word) and word.exists()
                assert -25 <= word.target_total <= 4

    def test_self_bracket_words_at_odd_primes(self):
        words = unstable_ext_basis(2, "additive", 0, (-10, None), p=3)
        assert sorted((w.auxiliary, w.target_total, w.weight) for w in words) == [(False, 2, 1), (True, 3, 2)]
        assert not any(w.auxiliary for w in unstable_ext_basis(1, "additive", 2, (-20, None), p=3))
