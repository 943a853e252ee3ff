"""Tests for GF(2) elimination and the bar-construction oracle."""

from types import SimpleNamespace

import numpy as np
import pytest

from src.algebra.dyer_lashof import PolyGenerator, PolyRFactor, PolyRMonomial, PrimalWord
from src.algebra.errors import ResourceLimitExceeded
from src.oracles import bar_oracle
from src.oracles.bar_oracle import (BarBlock, build_bar_complex, compare_with_E2, e2_dims, face,
                                    homology_dims, is_degenerate)
from src.oracles.gf2 import SparseMatrixF2, product_gf2, rank_gf2
from src.utils.output import DimTable


class TestGF2:

    def test_rank(self):
        assert rank_gf2(np.eye(4, dtype=np.uint8)) == 4
        assert rank_gf2(np.array([[1, 1], [1, 1]], dtype=np.uint8)) == 1
        assert rank_gf2(np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], dtype=np.uint8)) == 2
        assert rank_gf2(np.zeros((0, 3), dtype=np.uint8)) == 0

    def test_sparse_toggle(self):
        matrix = SparseMatrixF2(2, 2)
        matrix.toggle(0, 1)
        matrix.toggle(1, 0)
        matrix.toggle(0, 1)
        assert matrix.entries == {(1, 0)}
        assert matrix.rank() == 1
        assert matrix.to_dense().tolist() == [[0, 0], [1, 0]]

    def test_product(self):
        a = np.array([[1, 1]], dtype=np.uint8)
        b = np.array([[1], [1]], dtype=np.uint8)
        assert product_gf2(a, b).tolist() == [[0]]


class TestFaces:

    def test_degeneracy(self):
        x = PolyGenerator("x", 0)
        bare = PolyRMonomial.generator(2, x)
        square = PolyRMonomial(2, ((PolyRFactor(PrimalWord(2), x), 2),))
        assert is_degenerate(bare, 1)
        assert not is_degenerate(square, 1)
        # a bare wrapper around a square, and a square of bare wrappers
        assert is_degenerate(PolyRMonomial.generator(2, square), 2)
        assert is_degenerate(PolyRMonomial(2, ((PolyRFactor(PrimalWord(2), bare), 2),)), 2)

    def test_level_one_boundary_vanishes(self):
        x = PolyGenerator("x", 1)
        square = PolyRMonomial(2, ((PolyRFactor(PrimalWord(2), x), 2),))
        assert face(0, 1, square) == {} and face(1, 1, square) == {}
        bare = PolyRMonomial.generator(2, x)
        assert face(0, 1, bare) == face(1, 1, bare) == {x: 1}


class TestBarComplex:

    def test_weight_one(self):
        complex_ = build_bar_complex(1, 1, (-5, 5))
        assert homology_dims(complex_) == DimTable({(1, 1): 1})

    def test_level_one_weight_two(self):
        complex_ = build_bar_complex(1, 2, (-2, 8))
        basis = sorted(complex_.level_basis(1, 2), key=lambda m: m.degree)
        assert [m.degree for m in basis] == list(range(2, 9))
        (factor, mult), = basis[0].factors
        assert mult == 2 and not factor.word.letters
        assert [m.factors[0][0].word for m in basis[1:]] == [PrimalWord.of(2, [i]) for i in range(2, 8)]

    @pytest.mark.parametrize("n", [-1, 0, 1])
    def test_boundary_squares_vanish(self, n):
        complex_ = build_bar_complex(n, 4, (2 * n - 2, 2 * n + 8))
        assert complex_.boundary_squares_vanish()

    @pytest.mark.parametrize("n", [-1, 0, 2])
    def test_weight_three_is_acyclic(self, n):
        table = homology_dims(build_bar_complex(n, 3, (3 * n - 2, 3 * n + 10)))
        assert all(weight != 3 for _, weight in table.cells())

    def test_weight_two_one_class_per_degree(self):
        table = homology_dims(build_bar_complex(0, 2, (0, 10)))
        assert [table[(d, 2)] for d in range(0, 11)] == [0] + [1] * 10

    def test_independent_of_basis_order(self):
        plain = homology_dims(build_bar_complex(0, 4, (0, 12)))
        shuffled = homology_dims(build_bar_complex(0, 4, (0, 12), shuffle_seed=7))
        assert plain == shuffled

    def test_zero_differentials(self):
        block = BarBlock(0, 2, [[], ["a", "b"], ["c"]], [None, SparseMatrixF2(0, 2), SparseMatrixF2(2, 1)])
        assert block.homology() == [0, 2, 1]

    def test_empty_window(self):
        assert homology_dims(build_bar_complex(0, 4, (3, 1))) == DimTable()

    def test_weight_cap_bound(self):
        with pytest.raises(ValueError):
            build_bar_complex(0, 5, (0, 4))

    def test_memory_budget(self, monkeypatch):
        monkeypatch.setattr(bar_oracle, "get_settings", lambda: SimpleNamespace(mem_mb=0))
        with pytest.raises(ResourceLimitExceeded):
            build_bar_complex(0, 3, (-2, 6))


class TestCompareWithE2:

    @pytest.mark.parametrize("j", [-1, 0, 1])
    def test_collapse(self, j):
        report = compare_with_E2(j, 4)
        assert report.ok, report.mismatches()
        assert len(report.cells) == 24 * 4

    def test_weight_one_and_three(self):
        report = compare_with_E2(0, 4, (-10, 2))
        by_cell = {(c.degree, c.weight): c for c in report.cells}
        assert by_cell[(0, 1)].bar == by_cell[(0, 1)].e2 == 1
        assert all(by_cell[(d, 3)].bar == by_cell[(d, 3)].e2 == 0 for d in range(-10, 3))

    def test_e2_weight_four_counts(self):
        # (Q^a)^*(Q^b)^* with b >= 0 and a >= 2b + 1 in total degree -a - b - 2
        table = e2_dims(0, 4, (-9, 0))
        assert [table[(-n - 2, 4)] for n in range(1, 8)] == [1, 1, 1, 2, 2, 2, 3]
