from math import comb

import pytest
from hypothesis import given, strategies as st

from nervess.exactla import Matrix
from nervess.gradedalg import (CochainComplex, GradedVectorSpace, cohomology, divided_power,
                               divided_power_product, exterior, poincare_series, polynomial,
                               tensor_algebra, tensor_all, truncated_polynomial, unit_algebra)


def test_identity_complex_is_acyclic():
    c = CochainComplex(GradedVectorSpace({0: ["a"], 1: ["b"]}, 2), {0: Matrix.identity(3, 1)}, 3)
    assert cohomology(c).dims[:2] == [0, 0]


def test_zero_differentials():
    V = GradedVectorSpace({0: ["a"], 1: ["b", "c"], 2: ["d"]}, 3)
    assert cohomology(CochainComplex(V, {}, 5)).dims == [1, 2, 1, 0]


def test_triangle_boundary_gf5():
    # vertices 0,1,2; edges 01, 02, 12; d f(ij) = f(j) - f(i)
    d0 = Matrix(5, [[-1, 1, 0], [-1, 0, 1], [0, -1, 1]])
    V = GradedVectorSpace({0: [0, 1, 2], 1: ["01", "02", "12"]}, 2)
    res = cohomology(CochainComplex(V, {0: d0}, 5))
    assert res.dims[:2] == [1, 1]
    assert res.certified_through == 1


def test_cohomology_rejects_nonzero_square():
    V = GradedVectorSpace({0: ["a"], 1: ["b"], 2: ["c"]}, 3)
    c = CochainComplex(V, {0: Matrix.identity(2, 1), 1: Matrix.identity(2, 1)}, 2)
    with pytest.raises(ValueError, match="d\\^2"):
        cohomology(c)


@pytest.mark.parametrize("r,s,p,want", [(0, 4, 3, 1), (0, 0, 0, 1), (1, 1, 3, 2), (1, 2, 3, 0),
                                        (2, 2, 0, 6)])
def test_divided_power_product(r, s, p, want):
    assert divided_power_product(r, s, p) == want


def test_gamma_p_th_power_vanishes():
    for p in (3, 5, 7):
        c = 1
        for k in range(1, p):
            c = c * divided_power_product(k, 1, p) % p
        # gamma_1^p = p! gamma_p
        assert c == 0


def test_tensor_with_unit():
    A = exterior("y", 3, 0, 9)
    AK = tensor_algebra(A, unit_algebra(0, 9))
    assert AK.dims == A.dims
    assert AK.table == A.table


def test_koszul_sign_exterior():
    T = tensor_algebra(exterior("y", 3, 0, 8), exterior("z", 3, 0, 8))
    y, z = (("y", 1),), (("z", 1),)
    yz = T.mul({y: 1}, {z: 1})
    zy = T.mul({z: 1}, {y: 1})
    assert len(yz) == 1
    assert {k: -v for k, v in zy.items()} == yz
    T.check()


def test_exterior_times_gamma():
    T = tensor_algebra(exterior("y", 3, 0, 12), divided_power("yb", 2, 0, 12))
    assert T.dims == [1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]
    assert poincare_series(T, 7).as_tuple() == (1, 0, 1, 1, 1, 1, 1, 1)
    T.check()


def test_closed_form_lrp3_p5():
    T = tensor_algebra(exterior("y", 3, 5, 7), divided_power("yb", 2, 5, 7))
    s = poincare_series(T) + poincare_series(T)
    assert s.as_tuple() == (2, 0, 2, 2, 2, 2, 2, 2)


def test_zero_space_series():
    assert poincare_series(GradedVectorSpace({}, 4)).as_tuple() == (0, 0, 0, 0, 0)


def test_generators_of_gamma_mod_p():
    G = divided_power("w", 2, 3, 12)
    # over GF(3) Gamma[w] is generated by gamma_1, gamma_3
    assert [G.degree(g) for g in G.generators()] == [2, 6]
    assert [G.degree(g) for g in divided_power("w", 2, 0, 12).generators()] == [2]


def test_euler_characteristic_matches_cohomology():
    d0 = Matrix(0, [[1, 1], [0, 0], [1, 1]])
    V = GradedVectorSpace({0: list("ab"), 1: list("cde"), 2: ["f"]}, 2)
    d1 = Matrix(0, [[0, 1, 0]])
    c = CochainComplex(V, {0: d0, 1: d1}, 0)
    h = cohomology(c)
    assert sum((-1) ** n * h.dims[n] for n in range(3)) == c.euler_characteristic()


algebra_pieces = st.sampled_from([
    ("ext", 1), ("ext", 3), ("gamma", 2), ("gamma", 4), ("poly", 2), ("poly", 1), ("trunc", 2)])


def _make(kind, deg, name, p, N):
    if kind == "ext":
        return exterior(name, deg, p, N)
    if kind == "gamma":
        return divided_power(name, deg, p, N)
    if kind == "poly":
        return polynomial(name, deg, p, N)
    return truncated_polynomial(name, deg, 2, p, N)


def _canon(alg):
    # structure constants keyed by sorted factor tuples, which identifies
    # (A x B) x C with A x (B x C)
    return {(a, b): dict(c) for (a, b), c in alg.table.items()}


@given(st.lists(algebra_pieces, min_size=3, max_size=3), st.sampled_from([2, 3, 0]))
def test_tensor_associative(pieces, p):
    N = 7
    A, B, C = [_make(k, d, f"g{i}", p, N) for i, (k, d) in enumerate(pieces)]
    left = tensor_algebra(tensor_algebra(A, B), C)
    right = tensor_algebra(A, tensor_algebra(B, C))
    assert left.dims == right.dims
    assert _canon(left) == _canon(right)


@given(st.lists(algebra_pieces, min_size=1, max_size=3), st.sampled_from([3, 5, 0]))
def test_tensor_products_are_graded_commutative_algebras(pieces, p):
    T = tensor_all([_make(k, d, f"g{i}", p, 6) for i, (k, d) in enumerate(pieces)])
    T.check()


@given(st.integers(0, 8), st.integers(0, 8), st.sampled_from([0, 2, 3, 5, 7]))
def test_divided_power_matches_binomial(r, s, p):
    c = comb(r + s, r)
    assert divided_power_product(r, s, p) == (c % p if p else c)
