from fractions import Fraction as F

import hypothesis.strategies as st
import pytest
from hypothesis import given

from eiscong.errors import Budget, InputError, ResourceError, UnsupportedCase
from eiscong.hermitian import (HermitianMatrix, LocalQuadData, coset_table, denominator_exponent,
                               enumerate_cosets, galois_act, gamma_orbit, in_lattice, is_fixed,
                               is_positive_definite, k_of_sigma, matrix_rank, params_to_matrix)

LOCAL = [LocalQuadData(p, lab) for p in (2, 3) for lab in ("split", "inert")]


def test_local_data():
    assert LocalQuadData(3, "inert").tau(1) == -1
    assert LocalQuadData(3, "split").tau(3) == 1
    assert LocalQuadData(5, "ramified").tau(1) == 0
    d = LocalQuadData(3, "inert")
    assert LocalQuadData.from_json(d.to_json()) == d
    with pytest.raises(InputError):
        LocalQuadData(3, "weird")


def test_lattice_membership():
    d = LocalQuadData(3, "split")
    assert not in_lattice(HermitianMatrix.scalar(F(1, 3), 1), "T_dual", d)
    assert in_lattice(HermitianMatrix.scalar(F(1, 3), 1), ("scaled", 1), d)
    assert in_lattice(HermitianMatrix.scalar(2, 2), "S_of_r", d)


def test_denominator_exponent():
    d = LocalQuadData(3, "split")
    assert denominator_exponent(HermitianMatrix.diag([F(1, 3), F(1, 9)]), d) == 3
    assert denominator_exponent(HermitianMatrix.scalar(F(1, 3), 2, True), LocalQuadData(3, "inert")) == 2


def test_ramified_refused():
    with pytest.raises(UnsupportedCase):
        k_of_sigma(HermitianMatrix.scalar(F(1, 3), 1, True), LocalQuadData(3, "ramified"))


@pytest.mark.parametrize("data", LOCAL, ids=lambda d: f"{d.p}-{d.label}")
@pytest.mark.parametrize("n,D", [(1, 2), (2, 1)])
def test_vectorized_k_matches_smith(data, n, D):
    # numpy valuation formula against rational elementary divisors
    params, k = coset_table(data, n, D)
    for row, kv in zip(params, k):
        sigma = params_to_matrix(row, data, n, D)
        assert k_of_sigma(sigma, data) == int(kv)


def test_enumeration_counts():
    reps = enumerate_cosets(LocalQuadData(3, "split"), 1, 1)
    assert sorted(m.y[0][0] for m in reps) == [0, F(1, 3), F(2, 3)]
    # k <= 1 keeps exactly the singular residues: 16 - |GL_2(F_2)| = 10
    assert len(enumerate_cosets(LocalQuadData(2, "split"), 2, 1)) == 10


def test_enumeration_budget():
    with pytest.raises(ResourceError):
        enumerate_cosets(LocalQuadData(3, "split"), 2, 3, Budget(max_cosets=1000))


def test_rank():
    d = LocalQuadData(3, "split")
    assert matrix_rank(HermitianMatrix.diag([1, 0]), d) == 1
    assert matrix_rank(HermitianMatrix.scalar(1, 2, True), LocalQuadData(3, "inert")) == 2


@given(st.lists(st.integers(0, 9), min_size=3, max_size=3), st.integers(0, 2))
def test_galois_orbit(tup, s):
    gamma = (1, 2, 0)
    orb = gamma_orbit(tuple(tup), gamma)
    assert len(orb) in (1, 3)
    assert (len(orb) == 1) == is_fixed(tuple(tup))
    moved = tuple(tup)
    for _ in range(3):
        moved = galois_act(moved, gamma)
    assert moved == tuple(tup)


def test_galois_act_direction():
    assert galois_act(("A", "B", "C"), (1, 2, 0)) == ("C", "A", "B")


def test_positive_definite():
    assert is_positive_definite([[2, 1], [1, 2]])
    assert not is_positive_definite([[1, 2], [2, 1]])
    h = HermitianMatrix.field([[2, 1], [1, 2]], [[0, 1], [-1, 0]])
    assert is_positive_definite(h, -2)      # det = 4 - (1 + 2) = 1
    h = HermitianMatrix.field([[1, 1], [1, 1]], [[0, 1], [-1, 0]])
    assert not is_positive_definite(h, -2)


@given(st.integers(1, 8), st.integers(1, 8), st.integers(-4, 4))
def test_positive_definite_matches_minors(a, c, b):
    assert is_positive_definite([[a, b], [b, c]]) == (a * c - b * b > 0)


def test_json_roundtrip():
    h = HermitianMatrix.field([[1, F(1, 2)], [F(1, 2), 3]], [[0, 1], [-1, 0]])
    assert HermitianMatrix.from_json(h.to_json()) == h
