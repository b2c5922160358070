import random
from fractions import Fraction

import pytest

from kzmono.errors import DomainError
from kzmono.liealg import build_algebra
from kzmono.numerics import rat_mul, rat_sub, rat_zeros
from kzmono.reps import (
    casimir,
    casimir_value,
    irrep,
    rep_matrix,
    tensor_decompose,
    weight_multiset,
    weyl_dimension,
)

from oracles import freudenthal_multiplicities


@pytest.fixture(scope="module")
def a1():
    return build_algebra("A", 1)


@pytest.fixture(scope="module")
def a2():
    return build_algebra("A", 2)


def commutation_holds(alg, rep):
    """[e_i, f_j] = d_ij h_i and [h_i, e_j] = a_ij e_j, entrywise exact."""
    r = alg.rank
    for i in range(r):
        for j in range(r):
            e = rep.raising[j]
            f = rep.lowering[j]
            h_i = rep_matrix(rep, ("h", i + 1))
            e_j = rep.raising[j]
            comm = rat_sub(rat_mul(rep.raising[i], f), rat_mul(f, rep.raising[i]))
            expect = (
                h_i if i == j else rat_zeros(rep.dim, rep.dim)
            )
            if comm != expect:
                return False
            comm2 = rat_sub(rat_mul(h_i, e_j), rat_mul(e_j, h_i))
            scaled = [
                [Fraction(alg.cartan_matrix[i][j]) * x for x in row] for row in e_j
            ]
            if comm2 != scaled:
                return False
    return True


class TestConstruction:
    def test_defining_rep_a1(self, a1):
        rep = irrep(a1, (1,))
        assert rep.dim == 2
        assert rep.cartan_diagonal[0] == [1, -1]

    def test_three_dim_weight_string(self, a1):
        rep = irrep(a1, (2,))
        assert rep.dim == 3
        assert rep.cartan_diagonal[0] == [2, 0, -2]

    def test_adjoint_a2_dim(self, a2):
        assert irrep(a2, (1, 1)).dim == weyl_dimension(a2, (1, 1)) == 8

    def test_dims_match_weyl_formula(self, a1, a2):
        for m in range(9):
            assert irrep(a1, (m,)).dim == weyl_dimension(a1, (m,)) == m + 1
        for lam in [(1, 0), (0, 1), (2, 0), (1, 1), (2, 1), (0, 3)]:
            assert irrep(a2, lam).dim == weyl_dimension(a2, lam)

    def test_rejects_non_dominant(self, a1):
        with pytest.raises(DomainError):
            irrep(a1, (-1,))
        with pytest.raises(DomainError):
            irrep(a1, (1, 1))

    def test_commutation_relations(self, a1, a2):
        rng = random.Random(19)
        for _ in range(4):
            m = rng.randint(0, 8)
            assert commutation_holds(a1, irrep(a1, (m,)))
        for lam in [(1, 0), (1, 1), (2, 1)]:
            assert commutation_holds(a2, irrep(a2, lam))

    def test_raising_shifts_weights(self, a2):
        rep = irrep(a2, (1, 1))
        for i in range(2):
            alpha = tuple(a2.cartan_matrix[r][i] for r in range(2))
            em = rep.raising[i]
            for col in range(rep.dim):
                for row in range(rep.dim):
                    if em[row][col]:
                        wc = rep.weight_of_basis_vector[col]
                        wr = rep.weight_of_basis_vector[row]
                        assert wr == tuple(w + a for w, a in zip(wc, alpha))


class TestCharacters:
    def test_weights_match_freudenthal(self, a1, a2):
        for alg, lam in [
            (a1, (3,)),
            (a1, (5,)),
            (a2, (1, 1)),
            (a2, (2, 0)),
            (a2, (2, 1)),
        ]:
            rep = irrep(alg, lam)
            oracle = freudenthal_multiplicities(alg.cartan_matrix, lam)
            assert weight_multiset(rep) == oracle


class TestCasimir:
    def test_frozen_a1_values(self, a1):
        assert casimir(irrep(a1, (1,))).eigenvalue == Fraction(3, 2)
        assert casimir(irrep(a1, (2,))).eigenvalue == 4

    def test_trivial_rep(self, a1):
        rep = casimir(irrep(a1, (0,)))
        assert rep.eigenvalue == 0 and rep.is_scalar and rep.deviation == 0

    def test_scalar_exact_a1(self, a1):
        for m in range(9):
            rep = casimir(irrep(a1, (m,)))
            assert rep.is_scalar and rep.deviation == 0
            assert rep.eigenvalue == Fraction(m * (m + 2), 2)

    def test_scalar_exact_a2_small(self, a2):
        for lam in [(1, 0), (0, 1), (1, 1), (2, 0), (2, 1)]:
            if weyl_dimension(a2, lam) <= 15:
                rep = casimir(irrep(a2, lam))
                assert rep.is_scalar and rep.deviation == 0
                assert rep.eigenvalue == casimir_value(a2, lam)

    def test_commutes_with_generators(self, a1):
        rep = irrep(a1, (3,))
        alg = a1
        from kzmono.reps import rep_matrix_combo
        from kzmono.liealg import dual_pairs

        total = rat_zeros(rep.dim, rep.dim)
        for a, dual in dual_pairs(alg):
            ma = rep_matrix(rep, alg.basis_labels[a])
            md = rep_matrix_combo(rep, dual)
            prod = rat_mul(md, ma)
            total = [
                [x + y for x, y in zip(r1, r2)] for r1, r2 in zip(total, prod)
            ]
        for lab in alg.basis_labels:
            g = rep_matrix(rep, lab)
            assert rat_mul(total, g) == rat_mul(g, total)


class TestTensorDecompose:
    def test_a1_clebsch_gordan(self, a1):
        assert tensor_decompose(a1, (1,), (1,)) == {(2,): 1, (0,): 1}
        assert tensor_decompose(a1, (2,), (1,)) == {(3,): 1, (1,): 1}
        assert tensor_decompose(a1, (2,), (2,)) == {(4,): 1, (2,): 1, (0,): 1}

    def test_a2_adjoint_square(self, a2):
        dec = tensor_decompose(a2, (1, 1), (1, 1))
        assert dec[(0, 0)] == 1 and dec[(1, 1)] == 2
        assert sum(weyl_dimension(a2, nu) * k for nu, k in dec.items()) == 64
