"""Structural checks on bisimplicial sets and a seeded random instance generator."""

import numpy as np

from .exactla import as_field
from .simpl import (box_product, builtin_group, constant_horizontal, constant_vertical,
                    cyclic_group, nerve, random_g_complex, random_poset_nerve,
                    transformation_groupoid)
from .totss import DoubleComplex, SpectralSequence, TotalComplex, _zeros, compare_with_diagonal


def random_cochain(rng, tot, n):
    F = tot.field
    d = tot.dim(n)
    if F.p:
        return rng.integers(0, F.p, size=d).astype(np.int64)
    v = _zeros(F, d)
    for i in range(d):
        v[i] = F(int(rng.integers(-3, 4)))
    return v


def check_d_squared(tot):
    """delta_{n+1} delta_n = 0 for every n below the top."""
    F = tot.field
    for n in range(tot.top - 1):
        a, b = tot.delta(n), tot.delta(n + 1)
        if a.nnz == 0 or b.nnz == 0:
            continue
        for j in range(a.ncols):
            col = a.column(j)
            acc = {}
            for i, x in col.items():
                for k, y in b.column(i).items():
                    acc[k] = F(acc.get(k, 0) + x * y)
            if any(acc.values()):
                raise AssertionError(f"delta^2 != 0 in degree {n}")
    return True


def check_leibniz(tot, rng, trials=3):
    """delta(a cup b) = delta(a) cup b + (-1)^|a| a cup delta(b) on random cochains."""
    F = tot.field
    count = 0
    for na in range(tot.top):
        for nb in range(tot.top - na):
            if na + nb + 1 > tot.top:
                continue
            for _ in range(trials):
                a = random_cochain(rng, tot, na)
                b = random_cochain(rng, tot, nb)
                lhs = tot.apply(tot.cup(a, na, b, nb), na + nb)
                r1 = tot.cup(tot.apply(a, na), na + 1, b, nb)
                r2 = tot.cup(a, na, tot.apply(b, nb), nb + 1)
                rhs = r1 + (-1) ** na * r2
                if F.p:
                    lhs = lhs % F.p
                    rhs = rhs % F.p
                if not all(F(x) == F(y) for x, y in zip(lhs, rhs)):
                    raise AssertionError(f"Leibniz fails for degrees {na}, {nb}")
                count += 1
    return count


def check_page_multiplicativity(ss, r_max=3):
    """d_r(xy) = d_r(x) y + (-1)^|x| x d_r(y) on all pairs of page basis elements."""
    F = ss.field
    top = ss.top - 1
    count = 0
    for r in range(1, r_max + 1):
        cells = [(p, n - p) for n in range(top + 1) for p in range(n + 1)
                 if ss.dc.available(p, n - p)]
        for (pa, qa) in cells:
            A = ss.page_elements(r, pa, qa)
            for (pb, qb) in cells:
                n = pa + qa + pb + qb
                if n + 1 > top:
                    continue
                B = ss.page_elements(r, pb, qb)
                if not A or not B:
                    continue
                dA = ss.differential(r, pa, qa)
                dB = ss.differential(r, pb, qb)
                dP = ss.differential(r, pa + pb, qa + qb)
                for i, a in enumerate(A):
                    xa = [F.one if k == i else F.zero for k in range(len(A))]
                    da = [dA.rows[k][i] for k in range(dA.nrows)]
                    for j, b in enumerate(B):
                        xb = [F.one if k == j else F.zero for k in range(len(B))]
                        db = [dB.rows[k][j] for k in range(dB.nrows)]
                        prod = ss.product_vectors(r, pa, qa, xa, pb, qb, xb)
                        lhs = [sum((dP.rows[k][m] * prod[m] for m in range(len(prod))), F.zero)
                               for k in range(dP.nrows)]
                        lhs = [F(x) for x in lhs]
                        tq = qa + qb - r + 1
                        rhs = [F.zero] * dP.nrows
                        if dA.nrows and any(da):
                            t1 = ss.product_vectors(r, pa + r, qa - r + 1, da, pb, qb, xb)
                            rhs = [F(x + y) for x, y in zip(rhs, t1)]
                        if dB.nrows and any(db):
                            t2 = ss.product_vectors(r, pa, qa, xa, pb + r, qb - r + 1, db)
                            s = (-1) ** (pa + qa)
                            rhs = [F(x + s * y) for x, y in zip(rhs, t2)]
                        if tq >= 0 and lhs != rhs:
                            raise AssertionError(
                                f"d_{r} is not a derivation on ({pa},{qa}) x ({pb},{qb})")
                        count += 1
    return count


def random_instance(seed, N=None):
    """A seeded random bisimplicial set: group actions, products and constant ones."""
    rng = np.random.default_rng(seed)
    kind = [0, 0, 0, 1, 2, 3, 4][int(rng.integers(0, 7))]
    if N is None:
        N = int(rng.integers(3, 5))
    if kind == 4:
        from .simpl import sphere_model
        n = int(rng.integers(1, 3))
        return f"groupoid Z2 on sphere{n}", transformation_groupoid(cyclic_group(2),
                                                                     sphere_model(n, N), N), rng
    if kind == 0:
        G = builtin_group(["Z2", "Z3", "S3"][int(rng.integers(0, 3))])
        if G.order > 3:
            N = 3
        x = random_g_complex(rng, G, n_vertex_orbits=int(rng.integers(1, 3)),
                             max_dim=int(rng.integers(1, 3)), n_faces=int(rng.integers(1, 4)),
                             N=N)
        return f"groupoid {G.name}", transformation_groupoid(G, x, N), rng
    if kind == 1:
        K = random_poset_nerve(rng, int(rng.integers(2, 5)), N)
        L = random_poset_nerve(rng, int(rng.integers(2, 5)), N)
        return "poset box poset", box_product(K, L), rng
    if kind == 2:
        G = cyclic_group(int(rng.integers(2, 4)))
        L = random_poset_nerve(rng, int(rng.integers(2, 4)), N)
        return f"nerve {G.name} box poset", box_product(nerve(G, N), L), rng
    X = random_poset_nerve(rng, int(rng.integers(2, 5)), N)
    if rng.random() < 0.5:
        return "constant horizontal", constant_horizontal(X, N), rng
    return "constant vertical", constant_vertical(X, N), rng


def check_instance(b, field, rng, pages=True):
    F = as_field(field)
    dc = DoubleComplex(b, F)
    dc.check()
    tot = TotalComplex(dc)
    check_d_squared(tot)
    leib = check_leibniz(tot, rng)
    diag = compare_with_diagonal(b, F, dc.top, ring=False)
    mult = 0
    if pages:
        ss = SpectralSequence(dc)
        mult = check_page_multiplicativity(ss, 3)
        if ss.infinity_totals()[:dc.top] != diag["tot"]:
            raise AssertionError("E_inf totals differ from H(Tot)")
    return {"leibniz_pairs": leib, "page_pairs": mult, "dims": diag["tot"]}


def run_random_checks(seed, count, field):
    out = {"seed": seed, "count": count, "failures": 0, "instances": []}
    for k in range(count):
        name, b, rng = random_instance(seed * 100003 + k)
        try:
            info = check_instance(b, field, rng)
            out["instances"].append({"index": k, "kind": name, "ok": True, **info})
        except AssertionError as exc:
            out["failures"] += 1
            out["instances"].append({"index": k, "kind": name, "ok": False, "error": str(exc)})
    return out
