import numpy as np
import pytest
from hypothesis import given, strategies as st

from nervess.exactla import as_field
from nervess.simpl import (FiniteCategory, NormalizedCochains, action_on_cohomology,
                           box_product, builtin_group, constant_horizontal, cyclic_group,
                           diagonal, fixed_points, inertia_groupoid, nerve, point, poset_nerve,
                           random_g_complex, random_poset_nerve, sphere_model, sset_cohomology,
                           symmetric_group, transformation_groupoid, trivial_action)
from nervess.totss import DoubleComplex


def H(sset, p, top=None):
    return sset_cohomology(sset, as_field(p), top).dims


# groups and categories

@pytest.mark.parametrize("name,order", [("Z1", 1), ("Z2", 2), ("Z3", 3), ("Z2xZ2", 4),
                                        ("S3", 6)])
def test_builtin_groups_are_groups(name, order):
    G = builtin_group(name)
    assert G.order == order
    T = G.table
    for a in range(order):
        assert T[G.e][a] == a == T[a][G.e]
        assert T[a][G.inv[a]] == G.e
        for b in range(order):
            for c in range(order):
                assert T[T[a][b]][c] == T[a][T[b][c]]
    assert G.is_abelian() == (name != "S3")
    assert len(G.conjugacy_classes()) == (3 if name == "S3" else order)


def test_category_from_group_and_poset():
    G = symmetric_group(3)
    FiniteCategory.from_group(G).check()
    C = FiniteCategory.from_poset([0, 1, 2], lambda a, b: a <= b)
    C.check()
    # nerve of a totally ordered set of 3 elements is the 2-simplex
    assert H(nerve(C, 3), 3)[:3] == [1, 0, 0]


# nerves

def test_nerve_trivial_group():
    X = nerve(builtin_group("Z1"), 3)
    assert X.sizes == [1, 1, 1, 1]
    assert X.nondegenerate_counts() == [1, 0, 0, 0]
    assert H(X, 2)[:3] == [1, 0, 0]


def test_nerve_z2_gf2():
    assert H(nerve(cyclic_group(2), 5), 2)[:5] == [1] * 5


def test_nerve_z3_gf3():
    assert H(nerve(cyclic_group(3), 5), 3)[:5] == [1] * 5


@pytest.mark.parametrize("n,p", [(2, 3), (3, 2), (2, 0), (3, 5)])
def test_nerve_coprime_is_a_point(n, p):
    assert H(nerve(cyclic_group(n), 5), p)[:5] == [1, 0, 0, 0, 0]


@pytest.mark.parametrize("name", ["Z2", "Z3", "S3"])
def test_nerve_identities(name):
    nerve(builtin_group(name), 4).check_identities()


def test_nerve_z2_cup_square_nonzero():
    X = nerve(cyclic_group(2), 4)
    nc = NormalizedCochains(X, 2)
    res = sset_cohomology(X, 2, representatives=True)
    t = np.array(res.representatives[1][0], dtype=np.int64)
    tt = nc.cup(t, 1, t, 1)
    # t^2 is a cocycle that is not a coboundary
    assert not nc.apply(nc.coboundary(2), tt).any()
    assert res.subquotients[2].coordinates(list(tt)) == [1]
    t3 = nc.cup(tt, 2, t, 1)
    assert res.subquotients[3].coordinates(list(t3)) == [1]


# normalized cochains and the sphere model

def test_point_cochains():
    assert NormalizedCochains(point(3), 5).complex().space.dims == [1, 0, 0, 0]
    assert H(point(3), 5)[:3] == [1, 0, 0]


@pytest.mark.parametrize("n,p,dims", [(1, 3, [1, 1]), (2, 5, [1, 0, 1]), (2, 3, [1, 0, 1]),
                                      (3, 3, [1, 0, 0, 1]), (3, 0, [1, 0, 0, 1])])
def test_sphere_model_cohomology(n, p, dims):
    x = sphere_model(n, n + 1)
    x.check()
    x.sset.check_identities()
    assert x.is_free()
    assert H(x.sset, p)[:n + 1] == dims


@pytest.mark.parametrize("n,sign", [(1, 1), (2, -1), (3, 1)])
def test_antipode_on_top_class(n, sign):
    p = 3
    res, mats = action_on_cohomology(sphere_model(n, n + 1), p, degrees=[n])
    tau = mats[n][1]
    assert tau == [[sign % p]]


def test_cup_is_associative_and_cocycle_preserving():
    for seed in range(4):
        X = random_poset_nerve(np.random.default_rng(seed), 5, 3)
        F = as_field(3)
        nc = NormalizedCochains(X, F)
        rng = np.random.default_rng(seed + 100)
        f = [rng.integers(0, 3, size=nc.dim(k)) for k in range(4)]
        for a in range(4):
            for b in range(4 - a):
                for c in range(4 - a - b):
                    l = nc.cup(nc.cup(f[a], a, f[b], b), a + b, f[c], c)
                    r = nc.cup(f[a], a, nc.cup(f[b], b, f[c], c), b + c)
                    assert np.array_equal(l % 3, r % 3)
                if a + b < 3:
                    lhs = nc.apply(nc.coboundary(a + b), nc.cup(f[a], a, f[b], b))
                    rhs = (nc.cup(nc.apply(nc.coboundary(a), f[a]), a + 1, f[b], b)
                           + (-1) ** a * nc.cup(f[a], a, nc.apply(nc.coboundary(b), f[b]), b + 1))
                    assert np.array_equal(lhs % 3, rhs % 3)


# fixed points and inertia

def test_fixed_points_identity_and_free():
    x = sphere_model(2, 3)
    whole, _ = fixed_points(x, 0)
    assert whole.sizes == x.sset.sizes
    empty, _ = fixed_points(x, 1)
    assert empty.sizes == [0, 0, 0, 0]


def _reflected_square(N=2):
    faces = [frozenset(f) for f in ([0], [1], [2], [3], [0, 1], [1, 2], [2, 3], [3, 0])]
    refl = {0: 0, 1: 3, 2: 2, 3: 1}
    autos = [{f: f for f in faces}, {f: frozenset(refl[v] for v in f) for f in faces}]
    return poset_nerve(sorted(faces, key=lambda f: (len(f), sorted(f))), lambda a, b: a <= b,
                       N, autos, cyclic_group(2))


def test_fixed_points_square_reflection():
    x = _reflected_square()
    x.check()
    fx, _ = fixed_points(x, 1)
    assert fx.nondegenerate_counts() == [2, 0, 0]


def test_inertia_free_action():
    x = sphere_model(2, 3)
    union, comps = inertia_groupoid(x)
    union.check()
    assert comps[0].sizes == x.sset.sizes
    assert comps[1].sizes == [0, 0, 0, 0]


def test_inertia_swap_of_two_points():
    G = cyclic_group(2)
    x = poset_nerve(["a", "b"], lambda u, v: u == v, 2, [{"a": "a", "b": "b"},
                                                         {"a": "b", "b": "a"}], G)
    union, comps = inertia_groupoid(x)
    assert comps[0].sizes[0] == 2
    assert comps[1].sizes[0] == 0
    assert union.sset.sizes[0] == 2


def test_inertia_trivial_action_copies():
    G = builtin_group("S3")
    X = random_poset_nerve(np.random.default_rng(1), 3, 2)
    union, comps = inertia_groupoid(trivial_action(X, G))
    union.check()
    assert union.sset.sizes == [6 * s for s in X.sizes]
    # conjugation permutes the copies: h.(x, g) lies in copy hgh^-1
    a0 = union.action[0]
    n = X.sizes[0]
    for h in range(6):
        for g in range(6):
            assert a0[h][g * n] // n == G.conj(h, g)


# transformation groupoids, diagonals

def test_transformation_groupoid_trivial_group():
    x = sphere_model(1, 3)
    triv = trivial_action(x.sset, builtin_group("Z1"))
    b = transformation_groupoid(builtin_group("Z1"), triv, 3)
    b.check_identities(3, 3)
    D = diagonal(b, 3)
    assert D.sizes == x.sset.sizes
    assert H(D, 3)[:2] == [1, 1]


def test_transformation_groupoid_on_point():
    G = cyclic_group(2)
    b = transformation_groupoid(G, trivial_action(point(3), G), 3)
    N = nerve(G, 3)
    for q in range(4):
        assert [b.size(p, q) for p in range(4)] == N.sizes
    assert H(diagonal(b, 3), 2)[:3] == [1, 1, 1]


def test_rp1_diagonal():
    b = transformation_groupoid(cyclic_group(2), sphere_model(1, 4), 4)
    b.check_identities(4, 4)
    assert H(diagonal(b, 4), 3, 4)[:2] == [1, 1]
    diag = diagonal(b, 4)
    diag.check_identities()


def test_double_complex_cell_dims():
    x = sphere_model(2, 3)
    dc = DoubleComplex(transformation_groupoid(cyclic_group(2), x, 3), 3)
    nd = x.sset.nondegenerate_counts()
    for p in range(4):
        for q in range(4):
            assert dc.dim(p, q) == 2 ** p * nd[q]


def test_diagonal_of_nerve_box_point():
    G = cyclic_group(2)
    b = box_product(nerve(G, 3), point(3))
    D = diagonal(b, 3)
    N = nerve(G, 3)
    assert D.sizes == N.sizes
    for n in range(1, 4):
        assert np.array_equal(D.faces[n], N.faces[n])


def test_constant_horizontal_diagonal():
    X = random_poset_nerve(np.random.default_rng(7), 4, 3)
    D = diagonal(constant_horizontal(X, 3), 3)
    assert D.sizes == X.sizes
    assert H(D, 2) == H(X, 2)


def _kunneth(a, b):
    n = len(a)
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)]


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 0]))
def test_box_product_kunneth(seed, p):
    rng = np.random.default_rng(seed)
    N = 3
    K = random_poset_nerve(rng, int(rng.integers(2, 5)), N)
    L = random_poset_nerve(rng, int(rng.integers(2, 5)), N)
    b = box_product(K, L)
    b.check_identities(N, N)
    hd = H(diagonal(b, N), p)[:N]
    assert hd == _kunneth(H(K, p)[:N], H(L, p)[:N])


@given(st.integers(0, 10 ** 6), st.sampled_from(["Z2", "Z3", "S3"]))
def test_random_g_complexes_are_valid(seed, name):
    rng = np.random.default_rng(seed)
    x = random_g_complex(rng, builtin_group(name), 2, 2, 3, N=3)
    x.check()
    x.sset.check_identities()
    b = transformation_groupoid(x.group, x, 3)
    b.check_identities(3, 3)
    union, _ = inertia_groupoid(x)
    union.check()
