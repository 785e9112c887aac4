"""Finite group representations, the cobar complex over K[G]^dual and group cohomology.

A K[G]^dual-comodule is the same thing as a G-module.  We store left actions
rho(g); the comodule structure uses the right action n.g = rho(g)^{-1} n,
so that the coaction is  n |-> sum_g g^dual (x) n.g.

Normalized cobar complex for Cotor(K, N): degree k is spanned by words
[a1|...|ak] (x) n with every a_i != e (the coaugmentation coideal is spanned
by the g^dual with g != e), and

    d = sum_{i=1..k} (-1)^i D_i + (-1)^(k+1) coaction,

where D_i applies the reduced coproduct to the i-th letter,
    D(a) = sum_{bc=a; b,c != e} b|c - sum_{h != e} h|a - sum_{h != e} a|h,
and the reduced coaction sends n to sum_{h != e} [h] (x) (n.h - n).
"""

from dataclasses import dataclass, field as dc_field
import numpy as np

from ._backend import pmap
from .exactla import Matrix, SparseMatrix, as_field, kernel_basis, subquotient


class GRepresentation:
    """A graded representation: ``mats[q][g]`` is rho(g) on the degree-q part."""

    def __init__(self, group, field, mats, labels=None, name=None):
        self.group = group
        self.field = as_field(field)
        F = self.field
        self.mats = {}
        for q, per_g in mats.items():
            if len(per_g) != group.order:
                raise ValueError("one matrix per group element is required")
            self.mats[int(q)] = [Matrix(F, m, len(m[0]) if len(m) else 0)
                                 if not isinstance(m, Matrix) else m for m in per_g]
        self.labels = labels or {q: list(range(self.dim(q))) for q in self.mats}
        self.name = name

    def degrees(self):
        return sorted(q for q in self.mats if self.dim(q))

    def dim(self, q):
        m = self.mats.get(q)
        return m[0].nrows if m else 0

    def rho(self, q, g):
        return self.mats[q][g]

    def right(self, q, g):
        """Matrix of the right action n.g = rho(g^{-1}) n."""
        return self.mats[q][self.group.inv[g]]

    def check(self):
        G = self.group
        for q in self.mats:
            I = Matrix.identity(self.field, self.dim(q))
            if self.rho(q, G.e) != I:
                raise ValueError(f"rho(e) != id in degree {q}")
            for g in range(G.order):
                for h in range(G.order):
                    if self.rho(q, g) @ self.rho(q, h) != self.rho(q, G.mul(g, h)):
                        raise ValueError(f"rho is not multiplicative in degree {q}")
        return True

    def dual(self):
        """The contragredient rho(g^{-1})^T."""
        G = self.group
        return GRepresentation(G, self.field,
                               {q: [self.rho(q, G.inv[g]).transpose() for g in range(G.order)]
                                for q in self.mats}, self.labels, f"dual {self.name}")

    def __repr__(self):
        return f"GRepresentation({self.name}, dims={ {q: self.dim(q) for q in self.degrees()} })"


def _perm_matrix(F, perm):
    n = len(perm)
    rows = [[0] * n for _ in range(n)]
    for j, i in enumerate(perm):
        rows[i][j] = 1
    return Matrix(F, rows, n)


def trivial_rep(G, F, dim=1):
    F = as_field(F)
    return GRepresentation(G, F, {0: [Matrix.identity(F, dim)] * G.order}, name="trivial")


def sign_character(G):
    """A homomorphism G -> {+1, -1}: parity for symmetric groups, the first
    cyclic factor of even order otherwise (trivial for odd order)."""
    if G.name.startswith("S"):
        sgn = []
        for nm in G.names:
            perm = list(range(len(nm))) if nm == "e" else [int(c) - 1 for c in nm]
            inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm))
                      if perm[i] > perm[j])
            sgn.append(-1 if inv % 2 else 1)
        return sgn
    # cyclic or product of cyclics: use the first coordinate
    out = []
    first = G.name.split("x")[0]
    m = int(first[1:]) if first[1:].isdigit() else G.order
    for k, nm in enumerate(G.names):
        if m % 2:
            out.append(1)
            continue
        if nm.startswith("("):
            a = nm[1:].split(",")[0]
        else:
            a = nm
        a = 0 if a == "e" else int(a)
        out.append(-1 if a % 2 else 1)
    return out


def sign_rep(G, F):
    F = as_field(F)
    s = sign_character(G)
    return GRepresentation(G, F, {0: [Matrix(F, [[x]], 1) for x in s]}, name="sign")


def regular_rep(G, F):
    F = as_field(F)
    return GRepresentation(G, F, {0: [_perm_matrix(F, [G.mul(g, h) for h in range(G.order)])
                                      for g in range(G.order)]}, name="regular")


def adjoint_rep(G, F):
    """Conjugation permutation representation on K[G]."""
    F = as_field(F)
    return GRepresentation(G, F, {0: [_perm_matrix(F, [G.conj(g, h) for h in range(G.order)])
                                      for g in range(G.order)]}, name="adjoint")


def standard_rep(G, F):
    """The 2-dim reflection representation of S3 (sum-zero part of K^3)."""
    F = as_field(F)
    if G.name != "S3":
        raise ValueError("standard representation is only built in for S3")
    basis = [(1, -1, 0), (0, 1, -1)]
    mats = []
    for nm in G.names:
        perm = [0, 1, 2] if nm == "e" else [int(c) - 1 for c in nm]
        # g e_i = e_{perm(i)}
        imgs = []
        for v in basis:
            w = [0, 0, 0]
            for i, x in enumerate(v):
                w[perm[i]] += x
            # express w = a b0 + b b1 : w = (a, b - a, -b)
            imgs.append([w[0], -w[2]])
        mats.append(Matrix(F, [[imgs[0][0], imgs[1][0]], [imgs[0][1], imgs[1][1]]], 2))
    return GRepresentation(G, F, {0: mats}, name="standard")


def builtin_rep(G, name, F):
    key = name.strip().lower()
    if key == "trivial":
        return trivial_rep(G, F)
    if key in ("sign", "1-dim"):
        return sign_rep(G, F)
    if key == "regular":
        return regular_rep(G, F)
    if key == "adjoint":
        return adjoint_rep(G, F)
    if key == "standard":
        return standard_rep(G, F)
    raise ValueError(f"unknown representation {name!r}")


def direct_sum(reps):
    G = reps[0].group
    F = reps[0].field
    mats = {}
    for r in reps:
        for q in r.mats:
            mats.setdefault(q, []).append(r)
    out = {}
    for q, rs in mats.items():
        per_g = []
        for g in range(G.order):
            blocks = [r.rho(q, g) for r in rs]
            n = sum(b.nrows for b in blocks)
            rows = [[0] * n for _ in range(n)]
            o = 0
            for b in blocks:
                for i in range(b.nrows):
                    for j in range(b.ncols):
                        rows[o + i][o + j] = b.rows[i][j]
                o += b.nrows
            per_g.append(Matrix(F, rows, n))
        out[q] = per_g
    return GRepresentation(G, F, out, name="+".join(str(r.name) for r in reps))


def cohomology_representation(x, field, degrees=None):
    """H^*(X) of a G-simplicial set as a left representation rho(g) = (g^{-1})^*."""
    from .simpl import action_on_cohomology
    res, mats = action_on_cohomology(x, field, degrees)
    G = x.group
    F = as_field(field)
    out = {}
    for q, per_g in mats.items():
        d = res.dims[q]
        out[q] = [Matrix.from_columns(F, per_g[G.inv[g]], d) if d else Matrix.zeros(F, 0, 0)
                  for g in range(G.order)]
    return GRepresentation(G, F, out, name="cohomology"), res


# ---------------------------------------------------------------------------


def invariants(rep):
    """Per degree, a basis of the fixed subspace {n : rho(g) n = n for all g}."""
    F = rep.field
    out = {}
    for q in rep.mats:
        d = rep.dim(q)
        if d == 0:
            out[q] = []
            continue
        rows = []
        for g in range(rep.group.order):
            m = rep.rho(q, g)
            for i in range(d):
                rows.append([F(m.rows[i][j] - (1 if i == j else 0)) for j in range(d)])
        out[q] = kernel_basis(Matrix(F, rows, d))
    return out


def _words(m, k):
    """All words of length k over range(m) in mixed radix order, shape (k, m^k)."""
    size = m ** k
    ar = np.arange(size, dtype=np.int64)
    return np.array([(ar // m ** (k - 1 - i)) % m for i in range(k)],
                    dtype=np.int64).reshape(k, size)


def _encode(w, m):
    out = np.zeros(w.shape[1], dtype=np.int64)
    for i in range(w.shape[0]):
        out = out * m + w[i]
    return out


def _reduced_coproduct(G, nz, pos):
    """Terms of the reduced coproduct of each a in nz: list of (b, c, coeff)."""
    out = {}
    for a in nz:
        terms = {}
        for b in nz:
            for c in nz:
                if G.mul(b, c) == a:
                    terms[(b, c)] = terms.get((b, c), 0) + 1
        for h in nz:
            terms[(h, a)] = terms.get((h, a), 0) - 1
            terms[(a, h)] = terms.get((a, h), 0) - 1
        out[a] = [(pos[b], pos[c], v) for (b, c), v in terms.items() if v]
    return out


class CobarComplex:
    """Normalized cobar complex of K[G]^dual with coefficients in one degree of N."""

    def __init__(self, rep, q):
        self.rep = rep
        self.q = q
        G = rep.group
        self.G = G
        self.nz = [g for g in range(G.order) if g != G.e]
        self.pos = {g: i for i, g in enumerate(self.nz)}
        self.m = len(self.nz)
        self.dN = rep.dim(q)
        self.field = rep.field
        self._cop = _reduced_coproduct(G, self.nz, self.pos)

    def dim(self, k):
        return self.m ** k * self.dN

    def differential(self, k):
        """Sparse matrix of d: C^k -> C^{k+1}."""
        F = self.field
        m, dN = self.m, self.dN
        nrows, ncols = self.dim(k + 1), self.dim(k)
        if nrows == 0 or ncols == 0:
            return SparseMatrix.from_coo(F, nrows, ncols, [], [], np.zeros(0, dtype=np.int64))
        W = _words(m, k)
        nw = W.shape[1]
        widx = np.arange(nw, dtype=np.int64)
        nidx = np.arange(dN, dtype=np.int64)
        rr, cc, vv = [], [], []
        # interior coproducts
        for i in range(k):
            sgn = (-1) ** (i + 1)
            for a_pos, a in enumerate(self.nz):
                sel = np.flatnonzero(W[i] == a_pos)
                if not len(sel):
                    continue
                for b, c, v in self._cop[a]:
                    nw_ = np.vstack([W[:i, sel], np.full((1, len(sel)), b), np.full((1, len(sel)), c),
                                     W[i + 1:, sel]])
                    new = _encode(nw_, m)
                    rows = (new[:, None] * dN + nidx[None, :]).ravel()
                    cols = (sel[:, None] * dN + nidx[None, :]).ravel()
                    rr.append(rows)
                    cc.append(cols)
                    vv.append(np.full(len(rows), sgn * v, dtype=np.int64))
        # reduced coaction
        sgn = (-1) ** (k + 1)
        for h in self.nz:
            M = self.rep.right(self.q, h)
            for i in range(dN):
                for j in range(dN):
                    x = M.rows[i][j] - (1 if i == j else 0)
                    x = F(x)
                    if not x:
                        continue
                    new = widx * m + self.pos[h]
                    rr.append(new * dN + i)
                    cc.append(widx * dN + j)
                    xv = int(x) if F.p else x
                    if F.p:
                        vv.append(np.full(nw, sgn * xv, dtype=np.int64))
                    else:
                        vv.append([sgn * xv] * nw)
        rows = np.concatenate(rr) if rr else np.zeros(0, dtype=np.int64)
        cols = np.concatenate(cc) if cc else np.zeros(0, dtype=np.int64)
        if F.p or all(isinstance(v, np.ndarray) for v in vv):
            vals = np.concatenate(vv) if vv else np.zeros(0, dtype=np.int64)
        else:
            vals = [x for v in vv for x in (v.tolist() if isinstance(v, np.ndarray) else v)]
            if all(getattr(x, "denominator", 1) == 1 for x in vals):
                vals = np.array([int(x) for x in vals], dtype=np.int64)
        return SparseMatrix.from_coo(F, nrows, ncols, rows, cols, vals)


def _ranks_with_clearing(mats):
    """Ranks of a chain of coboundaries, clearing columns already known to die."""
    ranks = []
    prev_lows = None
    for M in mats:
        skip = None
        if prev_lows is not None and M.ncols:
            skip = np.zeros(M.ncols, dtype=np.uint8)
            lw = prev_lows[prev_lows >= 0]
            skip[lw] = 1
        if M.nrows == 0 or M.ncols == 0:
            ranks.append(0)
            prev_lows = np.full(M.ncols, -1, dtype=np.int64)
            continue
        lows = M.lows(skip)
        ranks.append(int((lows >= 0).sum()))
        prev_lows = lows
    return ranks


def _complex_dims(dims, mats):
    ranks = [0] + _ranks_with_clearing(mats)
    out = []
    for k in range(len(mats)):
        out.append(dims[k] - ranks[k + 1] - ranks[k])
    return out


@dataclass
class CotorResult:
    """dims[(p, q)] = dim Cotor^{p,q}; p <= certified_through is exact."""
    dims: dict
    certified_through: int
    representatives: dict = dc_field(default_factory=dict)
    products: list = dc_field(default_factory=list)
    field: object = None

    def total(self, p):
        return sum(d for (pp, q), d in self.dims.items() if pp == p)

    def series(self, axis="p"):
        top = self.certified_through
        return [self.total(p) for p in range(top + 1)]

    def to_json(self):
        return [{"p": p, "q": q, "dim": d,
                 "representative_labels": [str(x) for x in self.representatives.get((p, q), [])],
                 "products": []}
                for (p, q), d in sorted(self.dims.items())]


def cobar_cotor(rep, field=None, k_max=5, representatives=False):
    """Cotor^{p,q} over K[G]^dual of (K, N) for p <= k_max - 1.

    Complexes are built through degree k_max so that the top certified
    degree has its outgoing differential.
    """
    if field is not None and as_field(field) != rep.field:
        raise ValueError("representation is over a different field")
    def job(q):
        cb = CobarComplex(rep, q)
        mats = [cb.differential(k) for k in range(k_max)]
        hd = _complex_dims([cb.dim(k) for k in range(k_max + 1)], mats)
        sq = {}
        if representatives:
            sq = {p: _subquotient_reps(mats, p, cb.dim(p), rep.field) for p in range(k_max)}
        return q, hd, sq

    dims = {}
    reps = {}
    for q, hd, sq in pmap(job, rep.degrees()):
        for p in range(k_max):
            dims[(p, q)] = hd[p]
            if representatives:
                reps[(p, q)] = sq[p]
    return CotorResult(dims, k_max - 1, reps, [], rep.field)


def _subquotient_reps(mats, p, dim_p, F):
    if dim_p == 0:
        return []
    Dp = mats[p].to_dense()
    Z = kernel_basis(Dp) if Dp.nrows else Matrix.identity(F, dim_p).columns()
    zmat = Matrix.from_columns(F, Z, dim_p) if Z else Matrix.zeros(F, dim_p, 0)
    if p > 0 and mats[p - 1].ncols:
        B = mats[p - 1].to_dense()
    else:
        B = Matrix.zeros(F, dim_p, 0)
    return subquotient(zmat, B)


# ---------------------------------------------------------------------------
# products on the cobar complex


def cobar_product(rep, mult, p1, q1, x, p2, q2, y):
    """Product of cobar cochains x in C^{p1}(N_q1) and y in C^{p2}(N_q2).

    ``[a|..] n * [b1|..|bl] n' = [a|..|b1|..|bl] (n.(b1...bl)) n'`` where
    ``mult(q1, i, q2, j)`` returns the product of basis vectors of N as a dict
    ``{k: coeff}`` in degree q1 + q2.  Vectors are dicts (word_index, n) -> c.
    """
    G = rep.group
    F = rep.field
    nz = [g for g in range(G.order) if g != G.e]
    m = len(nz)
    out = {}
    d1 = rep.dim(q1)
    for (w1, i), c1 in x.items():
        for (w2, j), c2 in y.items():
            # letters of w2
            letters = []
            t = w2
            for _ in range(p2):
                letters.append(nz[t % m])
                t //= m
            letters.reverse()
            g = G.e
            for b in letters:
                g = G.mul(g, b)
            # n.g as a vector: column i of the right action matrix
            R = rep.right(q1, g)
            word = w1 * m ** p2 + w2
            for i2 in range(d1):
                r = R.rows[i2][i]
                if not r:
                    continue
                for k, z in mult(q1, i2, q2, j).items():
                    key = (word, k)
                    out[key] = F(out.get(key, 0) + c1 * c2 * r * z)
    return {k: v for k, v in out.items() if v}


def unit_mult(q1, i, q2, j):
    return {0: 1}


# ---------------------------------------------------------------------------
# group cohomology via the normalized bar complex


def group_cochain_differential(rep, q, k):
    """Sparse matrix of d: Maps(Gbar^k, N) -> Maps(Gbar^{k+1}, N).

    (df)(g1..g_{k+1}) = g1.f(g2..) + sum_i (-1)^i f(..g_i g_{i+1}..)
                        + (-1)^{k+1} f(g1..gk), with f = 0 on words containing e.
    """
    G = rep.group
    F = rep.field
    nz = [g for g in range(G.order) if g != G.e]
    pos = {g: i for i, g in enumerate(nz)}
    m = len(nz)
    dN = rep.dim(q)
    nrows, ncols = m ** (k + 1) * dN, m ** k * dN
    if nrows == 0 or ncols == 0:
        return SparseMatrix.from_coo(F, nrows, ncols, [], [], np.zeros(0, dtype=np.int64))
    W = _words(m, k + 1)              # row words
    nzarr = np.array(nz, dtype=np.int64)
    rr, cc, vv = [], [], []
    nwr = W.shape[1]
    ridx = np.arange(nwr, dtype=np.int64)
    # g1 . f(g2, ..)
    sub = _encode(W[1:], m) if k else np.zeros(nwr, dtype=np.int64)
    for g_pos, g in enumerate(nz):
        sel = np.flatnonzero(W[0] == g_pos)
        M = rep.rho(q, g)
        for i in range(dN):
            for j in range(dN):
                x = F(M.rows[i][j])
                if not x:
                    continue
                rr.append(sel * dN + i)
                cc.append(sub[sel] * dN + j)
                vv.append(np.full(len(sel), int(x) if F.p else 0, dtype=np.int64)
                          if F.p else [x] * len(sel))
    # inner merges
    table = np.asarray(G.table)
    for i in range(k):
        merged = table[nzarr[W[i]], nzarr[W[i + 1]]]
        ok = np.flatnonzero(merged != G.e)
        mpos = np.array([pos.get(int(g), -1) for g in merged[ok]], dtype=np.int64)
        nw_ = np.vstack([W[:i, ok], mpos[None, :], W[i + 2:, ok]])
        cols = _encode(nw_, m)
        for j in range(dN):
            rr.append(ok * dN + j)
            cc.append(cols * dN + j)
            vv.append(np.full(len(ok), (-1) ** (i + 1), dtype=np.int64) if F.p
                      else [(-1) ** (i + 1)] * len(ok))
    # last term
    head = _encode(W[:k], m) if k else np.zeros(nwr, dtype=np.int64)
    for j in range(dN):
        rr.append(ridx * dN + j)
        cc.append(head * dN + j)
        vv.append(np.full(nwr, (-1) ** (k + 1), dtype=np.int64) if F.p
                  else [(-1) ** (k + 1)] * nwr)
    rows = np.concatenate(rr)
    cols = np.concatenate(cc)
    if F.p:
        vals = np.concatenate(vv)
    else:
        flat = []
        for v in vv:
            flat.extend(v.tolist() if isinstance(v, np.ndarray) else v)
        if all(getattr(x, "denominator", 1) == 1 for x in flat):
            vals = np.array([int(x) for x in flat], dtype=np.int64)
        else:
            vals = flat
    return SparseMatrix.from_coo(F, nrows, ncols, rows, cols, vals)


def group_cohomology(rep, k_max=5, representatives=False):
    """H^k(G; N) for k <= k_max, per internal degree: dims[(k, q)]."""
    dims = {}
    reps = {}
    G = rep.group
    m = G.order - 1

    def job(q):
        mats = [group_cochain_differential(rep, q, k) for k in range(k_max + 1)]
        cd = [m ** k * rep.dim(q) for k in range(k_max + 2)]
        hd = _complex_dims(cd, mats)
        sq = {}
        if representatives:
            sq = {k: _subquotient_reps(mats, k, cd[k], rep.field) for k in range(k_max + 1)}
        return q, hd, sq

    for q, hd, sq in pmap(job, rep.degrees()):
        for k in range(k_max + 1):
            dims[(k, q)] = hd[k]
            if representatives:
                reps[(k, q)] = sq[k]
    return CotorResult(dims, k_max, reps, [], rep.field)


def group_cup(G, F, f, k, g, l):
    """Cup product of normalized cochains with trivial coefficients K.

    Cochains are numpy vectors on words of length k (resp. l) over G - {e}.
    """
    m = G.order - 1
    W = _words(m, k + l)
    a = _encode(W[:k], m) if k else np.zeros(W.shape[1], dtype=np.int64)
    b = _encode(W[k:], m) if l else np.zeros(W.shape[1], dtype=np.int64)
    out = f[a] * g[b]
    if F.p:
        out %= F.p
    return out


def group_cohomology_ring(G, field, k_max=4):
    """Cup products on H^*(G; K) in the chosen basis, degrees <= k_max.

    Returns ``(result, table)`` with ``table[((k, i), (l, j))]`` the
    coordinates of the product of basis classes i in degree k and j in l.
    """
    F = as_field(field)
    res = group_cohomology(trivial_rep(G, F), k_max, representatives=True)
    table = {}
    dt = np.int64 if F.p else object
    for k in range(k_max + 1):
        for l in range(k_max + 1 - k):
            sk, sl, skl = res.representatives[(k, 0)], res.representatives[(l, 0)], \
                res.representatives[(k + l, 0)]
            for i, u in enumerate(sk.chosen_representatives if sk else []):
                for j, v in enumerate(sl.chosen_representatives if sl else []):
                    w = group_cup(G, F, np.array(u, dtype=dt), k, np.array(v, dtype=dt), l)
                    table[((k, i), (l, j))] = skl.coordinates(list(w))
    return res, table


# ---------------------------------------------------------------------------
# comparisons


def lemma51_check(rep, k_max=5):
    """dim Cotor^k(K, N) = dim H^k(G, N) for k <= k_max; raises on mismatch.

    The group-cohomology side uses the left module g.n = n.g^{-1} obtained
    from the comodule through the antipode, which is the stored rho.
    """
    cot = cobar_cotor(rep, k_max=k_max + 1)
    gc = group_cohomology(rep, k_max)
    rows = []
    ok = True
    for q in rep.degrees():
        for k in range(k_max + 1):
            a, b = cot.dims[(k, q)], gc.dims[(k, q)]
            rows.append({"k": k, "q": q, "cotor": a, "group_cohomology": b, "match": a == b})
            ok &= a == b
    report = {"group": rep.group.name, "rep": rep.name, "field": rep.field.name,
              "k_max": k_max, "rows": rows, "pass": ok}
    if not ok:
        raise AssertionError(f"Cotor and group cohomology differ: {rows}")
    return report


def lbg_cohomology(G, field, k_max=5, check_abelian=True):
    """Cotor of the dual adjoint representation, degrees <= k_max.

    For abelian G also checks dims = |G| * dim H^k(G; K).
    """
    F = as_field(field)
    rep = adjoint_rep(G, F).dual()
    rep.name = "dual adjoint"
    res = cobar_cotor(rep, k_max=k_max + 1)
    if check_abelian and G.is_abelian():
        h = group_cohomology(trivial_rep(G, F), k_max)
        for k in range(k_max + 1):
            if res.total(k) != G.order * h.total(k):
                raise AssertionError(f"LBG degree {k}: {res.total(k)} != "
                                     f"{G.order} x {h.total(k)}")
    return res


def borel_collapse(G, x, field, cross_check=True, top=None):
    """Invariant subalgebra H^*(X)^G when char K does not divide |G|.

    Returns a report with dims, representative coordinates of the invariant
    classes and their products.  With ``cross_check`` the E_inf totals of the
    transformation groupoid spectral sequence are compared too.
    """
    F = as_field(field)
    if F.p and G.order % F.p == 0:
        raise ValueError(f"characteristic {F.p} divides |G| = {G.order}; the spectral "
                         "sequence does not collapse, use the pages() pipeline instead")
    rep, res = cohomology_representation(x, F)
    inv = invariants(rep)
    top = x.N - 1 if top is None else top
    dims = [len(inv.get(q, [])) for q in range(top + 1)]
    report = {"group": G.name, "field": F.name, "dims": dims, "certified_through": top}
    # products of invariant classes via the AW cup on representatives
    from .simpl import NormalizedCochains
    nc = NormalizedCochains(x.sset, F)
    prods = []
    for a in range(top + 1):
        for b in range(top + 1 - a):
            for i, u in enumerate(inv.get(a, [])):
                for j, v in enumerate(inv.get(b, [])):
                    fu = _class_vector(res, a, u, F)
                    fv = _class_vector(res, b, v, F)
                    w = nc.cup(fu, a, fv, b)
                    sq = res.subquotients.get(a + b)
                    coords = sq.coordinates(list(w)) if sq is not None else []
                    prods.append({"x": [a, i], "y": [b, j],
                                  "result": [_s(c) for c in coords]})
    report["products"] = prods
    if cross_check:
        from .simpl import transformation_groupoid
        from .totss import DoubleComplex, SpectralSequence
        b = transformation_groupoid(G, x, top + 1)
        ss = SpectralSequence(DoubleComplex(b, F), top + 1, track=False)
        einf = ss.infinity_totals()[:top + 1]
        report["e_infinity_totals"] = einf
        if einf != dims:
            raise AssertionError(f"invariants {dims} but E_inf totals {einf}")
    return report


def _class_vector(res, n, coords, F):
    from .simpl import _vec_dtype
    reps = res.representatives[n]
    dim = len(reps[0]) if reps else 0
    v = np.zeros(dim, dtype=_vec_dtype(F))
    if F.p == 0:
        v[:] = F.zero
    for c, r in zip(coords, reps):
        if c:
            v = v + c * np.array(r, dtype=_vec_dtype(F))
    if F.p:
        v %= F.p
    return v


def _s(x):
    if hasattr(x, "denominator") and x.denominator != 1:
        return str(x)
    return int(x)


def inertia_e2(x, field, k_max=4):
    """E_2 = Cotor(K, sum_g H^*(X^g)) for the inertia groupoid of a G-space.

    G permutes the fixed-point components by conjugation.  Returns the
    CotorResult (keys (p, q)) and the per-component cohomology dims.
    """
    F = as_field(field)
    ig, comps = inertia_groupoid_of(x)
    rep, res = cohomology_representation(ig, F)
    cot = cobar_cotor(rep, k_max=k_max + 1)
    from .simpl import sset_cohomology
    per = {}
    for g, c in comps.items():
        if sum(c.sizes) == 0:
            per[x.group.names[g]] = [0] * c.N
        else:
            per[x.group.names[g]] = sset_cohomology(c, F).dims[:c.N]
    return cot, per


def inertia_groupoid_of(x):
    from .simpl import inertia_groupoid
    return inertia_groupoid(x)


def cotor_product_table(rep, mult, k_max=3):
    """Products of Cotor classes in total cobar degree <= k_max - 1.

    Returns ``(result, table)`` where ``table[((p1,q1,i),(p2,q2,j))]`` is the
    coordinate vector of the product in the chosen basis of Cotor^{p1+p2,q1+q2}.
    """
    res = cobar_cotor(rep, k_max=k_max, representatives=True)
    G = rep.group
    m = G.order - 1
    table = {}
    keys = sorted(k for k, v in res.representatives.items() if v is not None)
    for (p1, q1) in keys:
        for (p2, q2) in keys:
            p, q = p1 + p2, q1 + q2
            if p > res.certified_through or (p, q) not in res.representatives:
                continue
            sq = res.representatives[(p, q)]
            for i, u in enumerate(res.representatives[(p1, q1)].chosen_representatives):
                for j, v in enumerate(res.representatives[(p2, q2)].chosen_representatives):
                    x = _vec_to_words(u, rep.dim(q1))
                    y = _vec_to_words(v, rep.dim(q2))
                    z = cobar_product(rep, mult, p1, q1, x, p2, q2, y)
                    dN = rep.dim(q)
                    w = [rep.field.zero] * (m ** p * dN)
                    for (wi, k), c in z.items():
                        w[wi * dN + k] = c
                    table[((p1, q1, i), (p2, q2, j))] = sq.coordinates(w) if sq.dim else []
    return res, table


def _vec_to_words(v, dN):
    return {(i // dN, i % dN): c for i, c in enumerate(v) if c}


def rep_from_json(obj):
    """Build a GRepresentation from a schema-validated JSON object."""
    from .simpl import builtin_group
    F = as_field(obj.get("field", 0))
    G = builtin_group(obj["group"])
    if "builtin" in obj:
        return builtin_rep(G, obj["builtin"], F)
    mats = {}
    for entry in obj["degrees"]:
        per_g = entry["matrices"]
        if len(per_g) != G.order:
            raise ValueError(f"degree {entry['degree']}: expected {G.order} matrices")
        mats[int(entry["degree"])] = [Matrix(F, [[F(c) for c in row] for row in m],
                                             len(m[0]) if m else 0) for m in per_g]
    rep = GRepresentation(G, F, mats, name=obj.get("name", "custom"))
    rep.check()
    return rep
