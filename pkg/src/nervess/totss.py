"""Double complexes of bisimplicial sets, the total complex and its spectral sequence.

C^{p,q} is the space of vertically normalized q-cochains on the row S_{p,*}.
The total differential on C^{p,q} is ``d^h + (-1)^p d^v`` and the product
on the total complex is

    w cup_T e = (-1)^(q p') (front_p^h)^* w  cup  (back_{p'}^h)^* e

for w in C^{p,q}, e in C^{p',q'}, with the vertical Alexander-Whitney cup.

The spectral sequence of the column filtration F^p = sum_{p' >= p} C^{p',*}
is read off a single filtered column reduction of each total differential:
the basis of Tot^n is ordered by decreasing filtration so the pivot ("low")
of a reduced column is its entry of lowest filtration.  A pivot pair x -> y
with filtration gap s contributes to E_r for r <= s and d_s x = y; unpaired
cocycles survive to E_infinity.
"""

import json

import numpy as np

from .exactla import Matrix, SparseMatrix, as_field, rank, kernel_basis
from .simpl import NormalizedCochains, apply_sparse, diagonal, sset_cohomology


def _dtype(F):
    return object if F.p == 0 else np.int64


def _zeros(F, n):
    if F.p == 0:
        return np.array([F.zero] * n, dtype=object)
    return np.zeros(n, dtype=np.int64)


class DoubleComplex:
    """Cochain double complex of a bisimplicial set.

    Cells with ``p <= Nh`` and ``q <= Nv`` are computed from the tables.  When
    the bisimplicial set reports a finite ``vertical_dim`` within its table
    range, cells with larger q are known to be zero, so the vertical
    direction is complete in every degree.
    """

    def __init__(self, b, field, Nh=None, Nv=None):
        self.b = b
        self.field = as_field(field)
        self.Nh = b.Nh if Nh is None else Nh
        self.Nv = b.Nv if Nv is None else Nv
        vd = b.vertical_dim
        self.vertical_complete = vd is not None and vd <= self.Nv
        self.vertical_dim = vd
        self._nd = {}
        self._pos = {}
        self._mats = {}

    @property
    def top(self):
        """Largest total degree n with every cell of Tot^n present."""
        return self.Nh if self.vertical_complete else min(self.Nh, self.Nv)

    def available(self, p, q):
        if p < 0 or q < 0 or p > self.Nh:
            return False
        return q <= self.Nv or self.vertical_complete

    def nd(self, p, q):
        key = (p, q)
        if key not in self._nd:
            if not self.available(p, q):
                raise ValueError(f"cell ({p}, {q}) outside truncation")
            if q > self.Nv or (self.vertical_dim is not None and q > self.vertical_dim):
                self._nd[key] = np.zeros(0, dtype=np.int64)
            else:
                self._nd[key] = self.b.vertical_nondegenerate(p, q)
        return self._nd[key]

    def pos(self, p, q):
        key = (p, q)
        if key not in self._pos:
            a = np.full(self.b.size(p, q), -1, dtype=np.int64) if q <= self.Nv else \
                np.zeros(0, dtype=np.int64)
            nd = self.nd(p, q)
            if len(nd):
                a[nd] = np.arange(len(nd))
            self._pos[key] = a
        return self._pos[key]

    def dim(self, p, q):
        return len(self.nd(p, q))

    def dh(self, p, q):
        """(d^h)^* = sum (-1)^i (d^h_i)^*: C^{p,q} -> C^{p+1,q}."""
        key = ("h", p, q)
        if key not in self._mats:
            F = self.field
            rows = self.nd(p + 1, q)
            n, m = len(rows), self.dim(p, q)
            if n == 0 or m == 0:
                M = SparseMatrix.from_coo(F, n, m, [], [], np.zeros(0, dtype=np.int64))
            else:
                hf = self.b.hface(p + 1, q)
                pos = self.pos(p, q)
                rr, cc, vv = [], [], []
                for i in range(p + 2):
                    f = pos[hf[i][rows]]
                    ok = np.flatnonzero(f >= 0)
                    rr.append(ok)
                    cc.append(f[ok])
                    vv.append(np.full(len(ok), (-1) ** i, dtype=np.int64))
                M = SparseMatrix.from_coo(F, n, m, np.concatenate(rr), np.concatenate(cc),
                                          np.concatenate(vv))
            self._mats[key] = M
        return self._mats[key]

    def dv(self, p, q):
        """(d^v)^* = sum (-1)^j (d^v_j)^*: C^{p,q} -> C^{p,q+1}."""
        key = ("v", p, q)
        if key not in self._mats:
            F = self.field
            rows = self.nd(p, q + 1)
            n, m = len(rows), self.dim(p, q)
            if n == 0 or m == 0:
                M = SparseMatrix.from_coo(F, n, m, [], [], np.zeros(0, dtype=np.int64))
            else:
                vf = self.b.vface(p, q + 1)
                pos = self.pos(p, q)
                rr, cc, vv = [], [], []
                for j in range(q + 2):
                    f = pos[vf[j][rows]]
                    ok = np.flatnonzero(f >= 0)
                    rr.append(ok)
                    cc.append(f[ok])
                    vv.append(np.full(len(ok), (-1) ** j, dtype=np.int64))
                M = SparseMatrix.from_coo(F, n, m, np.concatenate(rr), np.concatenate(cc),
                                          np.concatenate(vv))
            self._mats[key] = M
        return self._mats[key]

    def check(self, top=None):
        """d^h d^h = 0, d^v d^v = 0 and d^h d^v = d^v d^h on every cell."""
        top = self.top if top is None else top
        for p in range(top + 1):
            for q in range(top + 1 - p):
                cells = []
                if self.available(p + 2, q):
                    cells.append(("hh", self.dh(p + 1, q), self.dh(p, q)))
                if self.available(p, q + 2):
                    cells.append(("vv", self.dv(p, q + 1), self.dv(p, q)))
                for name, a, b in cells:
                    if not _sparse_product_zero(a, b, self.field):
                        raise AssertionError(f"{name} != 0 at ({p}, {q})")
                if self.available(p + 1, q + 1):
                    x = _sparse_mul(self.dv(p + 1, q), self.dh(p, q), self.field)
                    y = _sparse_mul(self.dh(p, q + 1), self.dv(p, q), self.field)
                    if x != y:
                        raise AssertionError(f"d^h d^v != d^v d^h at ({p}, {q})")
        return True

    # products

    def _hfront(self, P, Q, p):
        """Index in S_{p,Q} of the horizontal front p-face of each (P,Q)-simplex."""
        idx = np.arange(self.b.size(P, Q))
        for m in range(P, p, -1):
            idx = self.b.hface(m, Q)[m][idx]
        return idx

    def _hback(self, P, Q, p2):
        idx = np.arange(self.b.size(P, Q))
        for m in range(P, p2, -1):
            idx = self.b.hface(m, Q)[0][idx]
        return idx

    def _vfront(self, p, Q, q, idx):
        for m in range(Q, q, -1):
            idx = self.b.vface(p, m)[m][idx]
        return idx

    def _vback(self, p, Q, q2, idx):
        for m in range(Q, q2, -1):
            idx = self.b.vface(p, m)[0][idx]
        return idx

    def _eval(self, f, p, q, simplices):
        pos = self.pos(p, q)[simplices]
        out = np.where(pos >= 0, f[np.maximum(pos, 0)] if len(f) else 0, 0)
        if self.field.p == 0:
            out = out.astype(object)
        return out

    def cup_T(self, w, p, q, e, p2, q2):
        """Product of w in C^{p,q} and e in C^{p2,q2}, landing in C^{p+p2, q+q2}."""
        F = self.field
        P, Q = p + p2, q + q2
        if not self.available(P, Q):
            raise ValueError(f"product lands outside truncation at ({P}, {Q})")
        sig = self.nd(P, Q)
        if len(sig) == 0 or len(w) == 0 or len(e) == 0:
            return _zeros(F, len(sig))
        # horizontal faces first (they commute with the vertical ones)
        a = self._hfront(P, Q, p)[sig]
        a = self._vfront(p, Q, q, a)
        c = self._hback(P, Q, p2)[sig]
        c = self._vback(p2, Q, q2, c)
        out = self._eval(w, p, q, a) * self._eval(e, p2, q2, c)
        if (q * p2) % 2:
            out = -out
        if F.p:
            out %= F.p
        return out


def _sparse_mul(a, b, F):
    """Columns of the product a @ b as dicts."""
    out = []
    for j in range(b.ncols):
        acc = {}
        for i, x in b.column(j).items():
            for k, y in a.column(i).items():
                acc[k] = F(acc.get(k, 0) + x * y)
        out.append({k: v for k, v in acc.items() if v})
    return out


def _sparse_product_zero(a, b, F):
    if a.ncols == 0 or b.ncols == 0 or a.nrows == 0:
        return True
    return not any(_sparse_mul(a, b, F))


def double_complex_of(b, field, Nh=None, Nv=None):
    return DoubleComplex(b, field, Nh, Nv)


# ---------------------------------------------------------------------------
# total complex


class TotalComplex:
    """Tot^n = sum_{p+q=n} C^{p,q}, ordered by decreasing filtration p."""

    def __init__(self, dc, top=None):
        self.dc = dc
        self.field = dc.field
        self.top = dc.top if top is None else min(top, dc.top)
        self.blocks = {}
        self.offsets = {}
        self.filt = {}
        for n in range(self.top + 1):
            blocks, off, f = [], {}, []
            o = 0
            for p in range(n, -1, -1):
                q = n - p
                if not dc.available(p, q):
                    continue
                d = dc.dim(p, q)
                blocks.append((p, q))
                off[(p, q)] = o
                f.extend([p] * d)
                o += d
            self.blocks[n] = blocks
            self.offsets[n] = off
            self.filt[n] = np.array(f, dtype=np.int64)
        self._delta = {}

    def dim(self, n):
        return len(self.filt[n])

    @property
    def certified_through(self):
        return self.top - 1

    def delta(self, n):
        """Sparse matrix of the total differential Tot^n -> Tot^{n+1}."""
        if n in self._delta:
            return self._delta[n]
        dc = self.dc
        F = self.field
        rr, cc, vv = [], [], []
        for (p, q) in self.blocks[n]:
            c0 = self.offsets[n][(p, q)]
            parts = []
            if (p + 1, q) in self.offsets[n + 1]:
                parts.append((dc.dh(p, q), self.offsets[n + 1][(p + 1, q)], 1))
            if (p, q + 1) in self.offsets[n + 1]:
                parts.append((dc.dv(p, q), self.offsets[n + 1][(p, q + 1)], (-1) ** p))
            for M, r0, sgn in parts:
                if M.nnz == 0:
                    continue
                cols = np.repeat(np.arange(M.ncols), np.diff(M.indptr))
                rr.append(M.indices + r0)
                cc.append(cols + c0)
                vv.append(np.asarray(M.data, dtype=np.int64) * sgn)
        if rr:
            D = SparseMatrix.from_coo(F, self.dim(n + 1), self.dim(n), np.concatenate(rr),
                                      np.concatenate(cc), np.concatenate(vv))
        else:
            D = SparseMatrix.from_coo(F, self.dim(n + 1), self.dim(n), [], [],
                                      np.zeros(0, dtype=np.int64))
        self._delta[n] = D
        return D

    def split(self, v, n):
        """Split a Tot^n vector (numpy or dict) into its C^{p,q} blocks."""
        F = self.field
        out = {}
        if isinstance(v, dict):
            full = _zeros(F, self.dim(n))
            for i, x in v.items():
                full[i] = x
            v = full
        for (p, q) in self.blocks[n]:
            o = self.offsets[n][(p, q)]
            out[(p, q)] = v[o:o + self.dc.dim(p, q)]
        return out

    def join(self, parts, n):
        F = self.field
        v = _zeros(F, self.dim(n))
        for (p, q), w in parts.items():
            o = self.offsets[n][(p, q)]
            v[o:o + len(w)] = w
        return v

    def apply(self, v, n):
        return apply_sparse(self.delta(n), np.asarray(v), self.field)

    def cup(self, a, na, b, nb):
        """cup_T on total cochains given as numpy vectors."""
        F = self.field
        n = na + nb
        if n > self.top:
            raise ValueError("product degree beyond truncation")
        out = {blk: _zeros(F, self.dc.dim(*blk)) for blk in self.blocks[n]}
        A = self.split(a, na)
        B = self.split(b, nb)
        for (p, q), w in A.items():
            if not any(w):
                continue
            for (p2, q2), e in B.items():
                if not any(e):
                    continue
                r = self.dc.cup_T(w, p, q, e, p2, q2)
                out[(p + p2, q + q2)] = out[(p + p2, q + q2)] + r
        if F.p:
            out = {k: v % F.p for k, v in out.items()}
        return self.join(out, n)

    def unit(self):
        F = self.field
        v = _zeros(F, self.dim(0))
        o = self.offsets[0][(0, 0)]
        v[o:o + self.dc.dim(0, 0)] = F.one
        return v

    def cohomology_dims(self):
        """dim H^n(Tot) for n <= top (the top degree is not certified)."""
        ranks = {-1: 0, self.top: 0}
        for n in range(self.top):
            ranks[n] = self.delta(n).rank()
        return [self.dim(n) - ranks[n] - ranks[n - 1] for n in range(self.top + 1)]


# ---------------------------------------------------------------------------
# spectral sequence via one filtered reduction


class Element:
    """A basis element of the canonical filtered basis of Tot^n."""

    __slots__ = ("n", "index", "p", "kind", "partner", "gap", "rep")

    def __init__(self, n, index, p, kind, partner, gap, rep):
        self.n, self.index, self.p = n, index, p
        self.kind, self.partner, self.gap, self.rep = kind, partner, gap, rep

    @property
    def q(self):
        return self.n - self.p

    def survives(self, r):
        return self.kind == "essential" or self.gap >= r

    def __repr__(self):
        return f"Element(n={self.n}, i={self.index}, p={self.p}, {self.kind}, gap={self.gap})"


class SpectralSequence:
    """All pages of the column-filtration spectral sequence of a double complex.

    Attributes: ``elements[n]`` lists the canonical basis of Tot^n, with
    representatives (dicts index -> scalar).  Degrees ``n <= top - 1`` are
    certified; degree ``top`` lacks outgoing information.
    """

    def __init__(self, dc, top=None, track=True):
        self.dc = dc
        self.field = dc.field
        self.tot = TotalComplex(dc, top)
        self.top = self.tot.top
        self.track = track
        self._reduce()

    def _reduce(self):
        tot = self.tot
        F = self.field
        self.elements = {}
        self.lows = {}
        targets_prev = {}          # row index in Tot^n -> column in Tot^{n-1}
        R_prev = None
        filt = tot.filt
        for n in range(self.top + 1):
            elems = []
            if n < self.top:
                D = tot.delta(n)
                skip = np.zeros(tot.dim(n), dtype=np.uint8)
                for i in targets_prev:
                    skip[i] = 1
                lows, R, V = D.reduce(skip, track_r=True, track_v=self.track)
            else:
                lows, R, V = None, None, None
            for i in range(tot.dim(n)):
                p = int(filt[n][i])
                if i in targets_prev:
                    j = targets_prev[i]
                    gap = p - int(filt[n - 1][j])
                    rep = R_prev[j] if R_prev is not None else None
                    elems.append(Element(n, i, p, "target", j, gap, rep))
                elif lows is not None and lows[i] >= 0:
                    y = int(lows[i])
                    gap = int(filt[n + 1][y]) - p
                    elems.append(Element(n, i, p, "source", y, gap, V[i] if V else None))
                else:
                    kind = "essential" if lows is not None else "unknown"
                    rep = V[i] if (V and lows is not None) else {i: F.one}
                    elems.append(Element(n, i, p, kind, None, None, rep))
            self.elements[n] = elems
            self.lows[n] = lows
            if lows is not None:
                targets_prev = {int(y): j for j, y in enumerate(lows) if y >= 0}
                R_prev = R
        self._basis_cache = {}

    # dimensions

    def certified(self, p, q):
        return p + q <= self.top - 1

    def page_elements(self, r, p, q):
        n = p + q
        if n > self.top:
            return []
        return [e for e in self.elements[n] if e.p == p and
                (e.kind in ("essential", "unknown") or e.gap >= r)]

    def dim(self, r, p, q):
        return len(self.page_elements(r, p, q))

    def infinity_elements(self, p, q):
        n = p + q
        if n > self.top:
            return []
        return [e for e in self.elements[n] if e.p == p and e.kind in ("essential", "unknown")]

    def page_table(self, r):
        """{(p, q): (dim, certified)} over the computed range; r=None is E_inf."""
        out = {}
        for n in range(self.top + 1):
            for p in range(n + 1):
                q = n - p
                if not self.dc.available(p, q):
                    continue
                d = len(self.infinity_elements(p, q)) if r is None else self.dim(r, p, q)
                out[(p, q)] = (d, self.certified(p, q))
        return out

    def infinity_totals(self):
        """Total dims of E_inf per degree (the top degree uncertified)."""
        return [sum(1 for e in self.elements[n] if e.kind in ("essential", "unknown"))
                for n in range(self.top + 1)]

    def total_dims(self, r):
        return [sum(1 for e in self.elements[n] if e.survives(r) or e.kind == "unknown")
                for n in range(self.top + 1)]

    def differential(self, r, p, q):
        """Matrix of d_r: E_r^{p,q} -> E_r^{p+r, q-r+1} in the page bases.

        Rows index the target page basis, columns the source page basis.
        """
        F = self.field
        src = self.page_elements(r, p, q)
        tq = q - r + 1
        if tq < 0 or p + q + 1 > self.top:
            return Matrix.zeros(F, 0, len(src))
        tgt = self.page_elements(r, p + r, tq)
        where = {e.index: k for k, e in enumerate(tgt)}
        m = Matrix.zeros(F, len(tgt), len(src))
        for j, e in enumerate(src):
            if e.kind == "source" and e.gap == r:
                m.rows[where[e.partner]][j] = F.one
        return m

    # coordinates and products

    def rep_vector(self, e):
        F = self.field
        v = _zeros(F, self.tot.dim(e.n))
        for i, x in e.rep.items():
            v[i] = x
        return v

    def coordinates(self, v, n):
        """Express a Tot^n vector in the canonical basis (back substitution)."""
        if n > self.top - 1:
            raise ValueError("coordinates need a certified degree")
        F = self.field
        elems = self.elements[n]
        acc = {i: x for i, x in enumerate(v) if x}
        coeff = {}
        while acc:
            i = max(acc)
            b = elems[i].rep
            c = F(acc[i] * F.inv(b[i]))
            coeff[i] = c
            for k, x in b.items():
                nx = F(acc.get(k, 0) - c * x)
                if nx:
                    acc[k] = nx
                else:
                    acc.pop(k, None)
        return coeff

    def project(self, v, n, r, p):
        """Class in E_r^{p, n-p} of a vector of Z_r^p (coefficients on page basis)."""
        coeff = self.coordinates(v, n)
        basis = self.page_elements(r, p, n - p)
        F = self.field
        for i, c in coeff.items():
            e = self.elements[n][i]
            if e.p < p:
                raise ValueError("vector is not in the expected filtration")
            if e.kind == "source" and e.p + e.gap < p + r:
                raise ValueError("vector is not in Z_r")
        return [coeff.get(e.index, F.zero) for e in basis]

    def product(self, r, a, b):
        """Product of two page basis elements on E_r, in page coordinates."""
        va = self.rep_vector(a)
        vb = self.rep_vector(b)
        w = self.tot.cup(va, a.n, vb, b.n)
        return self.project(w, a.n + b.n, r, a.p + b.p)

    def product_vectors(self, r, pa, qa, xa, pb, qb, xb):
        """Product of two page classes given by coordinate vectors."""
        F = self.field
        A = self.page_elements(r, pa, qa)
        B = self.page_elements(r, pb, qb)
        va = _zeros(F, self.tot.dim(pa + qa))
        for c, e in zip(xa, A):
            if c:
                va = va + c * self.rep_vector(e)
        vb = _zeros(F, self.tot.dim(pb + qb))
        for c, e in zip(xb, B):
            if c:
                vb = vb + c * self.rep_vector(e)
        if F.p:
            va %= F.p
            vb %= F.p
        w = self.tot.cup(va, pa + qa, vb, pb + qb)
        return self.project(w, pa + qa + pb + qb, r, pa + pb)

    def product_table(self, r, max_degree=None):
        """All products of page basis elements landing in certified degrees."""
        out = []
        top = self.top - 1 if max_degree is None else min(self.top - 1, max_degree)
        cells = [(p, n - p) for n in range(top + 1) for p in range(n + 1)
                 if self.dc.available(p, n - p)]
        for (pa, qa) in cells:
            for a_i, a in enumerate(self.page_elements(r, pa, qa)):
                for (pb, qb) in cells:
                    if pa + qa + pb + qb > top:
                        continue
                    for b_i, b in enumerate(self.page_elements(r, pb, qb)):
                        res = self.product(r, a, b)
                        out.append(((pa, qa, a_i), (pb, qb, b_i), res))
        return out


def pages(dc, r_max, top=None):
    """Pages E_1..E_{r_max} (plus the reduction data) of the column filtration."""
    ss = SpectralSequence(dc, top)
    return ss, [PageView(ss, r) for r in range(1, r_max + 1)]


class PageView:
    """One page E_r of a SpectralSequence."""

    def __init__(self, ss, r):
        self.ss = ss
        self.r = r

    def entries(self):
        return [{"p": p, "q": q, "dim": d, "certified": c}
                for (p, q), (d, c) in sorted(self.ss.page_table(self.r).items())]

    def differentials(self):
        out = []
        ss = self.ss
        for (p, q), (d, c) in sorted(ss.page_table(self.r).items()):
            if q - self.r + 1 < 0 or p + q + 1 > ss.top:
                continue
            m = ss.differential(self.r, p, q)
            if m.nrows and m.ncols:
                out.append({"r": self.r, "p": p, "q": q,
                            "matrix": [[_json_scalar(x) for x in row] for row in m.rows]})
        return out

    def to_json(self, products=None):
        d = {"r": self.r, "entries": self.entries(), "differentials": self.differentials(),
             "products": []}
        if products:
            d["products"] = [{"x": list(x), "y": list(y), "result": [_json_scalar(c) for c in res]}
                             for x, y, res in products]
        return d


def _json_scalar(x):
    if hasattr(x, "denominator") and x.denominator != 1:
        return str(x)
    return int(x)


# ---------------------------------------------------------------------------
# the direct Z_r / B_r oracle


def pages_direct_dims(dc, r, top=None):
    """dims of E_r^{p,q} from E_r^p = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}).

    Dense and slow: only for small instances.  Z_r^p is the space of
    x in F^p with dx in F^{p+r}; for r <= 0 it is all of F^p.
    """
    tot = TotalComplex(dc, top)
    F = dc.field
    T = tot.top
    dense = {n: tot.delta(n).to_dense() for n in range(T)}

    def Z(n, p, rr):
        # basis (columns in Tot^n coordinates) of Z_rr^p in degree n
        f = tot.filt[n]
        cols = [i for i in range(tot.dim(n)) if f[i] >= p]
        if rr <= 0 or n >= T:
            basis = []
            for i in cols:
                v = [F.zero] * tot.dim(n)
                v[i] = F.one
                basis.append(v)
            return basis
        fr = tot.filt[n + 1]
        rows = [k for k in range(tot.dim(n + 1)) if fr[k] < p + rr]
        if not cols:
            return []
        if not rows:
            sub_basis = [[F.one if j == k else F.zero for j in range(len(cols))]
                         for k in range(len(cols))]
        else:
            sub = Matrix(F, [[dense[n].rows[k][i] for i in cols] for k in rows], len(cols))
            sub_basis = kernel_basis(sub)
        out = []
        for w in sub_basis:
            v = [F.zero] * tot.dim(n)
            for i, x in zip(cols, w):
                v[i] = x
            out.append(v)
        return out

    res = {}
    for n in range(T + 1):
        for p in range(n + 1):
            q = n - p
            if not dc.available(p, q):
                continue
            num = Z(n, p, r)
            den = list(Z(n, p + 1, r - 1))
            if n >= 1:
                for w in Z(n - 1, p - r + 1, r - 1):
                    den.append(dense[n - 1] @ w)
            dim_n = tot.dim(n)
            a = rank(Matrix.from_columns(F, num, dim_n)) if num else 0
            bm = rank(Matrix.from_columns(F, den, dim_n)) if den else 0
            res[(p, q)] = a - bm
    return res


# ---------------------------------------------------------------------------
# comparison with the diagonal


def compare_with_diagonal(b, field, top=None, ring=None):
    """Check dim H^n(Tot) = dim H^n(diag) for all certified n.

    When the bisimplicial set is constant in one direction (``ring`` defaults
    to that case) the cohomology rings are compared too, through the
    canonical cochain map from the diagonal into the total complex.
    Raises AssertionError on mismatch.
    """
    F = as_field(field)
    dc = DoubleComplex(b, F)
    T = dc.top if top is None else min(top, dc.top)
    tot = TotalComplex(dc, T)
    hT = tot.cohomology_dims()[:T]
    D = diagonal(b, T)
    hD = sset_cohomology(D, F, T).dims[:T]
    report = {"certified_through": T - 1, "tot": hT, "diag": hD, "dims_match": hT == hD}
    if hT != hD:
        raise AssertionError(f"H(Tot) = {hT} but H(diag) = {hD}")
    if ring is None:
        ring = b.horizontal_constant or b.vertical_constant
    if ring:
        report["ring_match"] = _compare_rings(b, dc, tot, D, F, T)
    return report


def _canonical_map(b, dc, tot, D, F, n):
    """Cochain map C^n(diag) -> Tot^n when one direction is constant.

    Horizontally constant: diag_n = S_{0,n} = X_n, a cochain f goes to the
    same function in C^{0,n}.  Vertically constant: diag_n = S_{n,0} = K_n
    and normalized cochains include into the (horizontally unnormalized)
    C^{n,0}.
    """
    nc = NormalizedCochains(D, F, tot.top)
    nd_diag = nc.nd[n]

    def to_tot(f):
        v = _zeros(F, tot.dim(n))
        if b.horizontal_constant:
            p, q = 0, n
        else:
            p, q = n, 0
        # diag simplex s in S_{n,n} corresponds to the simplex of S_{p,q}
        # obtained by applying the constant direction's faces
        if (p, q) not in tot.offsets[n]:
            return v
        o = tot.offsets[n][(p, q)]
        if b.horizontal_constant:
            # S_{n,n} -> S_{0,n}: apply d^h_last n times (identity on X)
            idx = np.arange(b.size(n, n))
            for m in range(n, 0, -1):
                idx = b.hface(m, n)[m][idx]
        else:
            idx = np.arange(b.size(n, n))
            for m in range(n, 0, -1):
                idx = b.vface(n, m)[m][idx]
        # value at a cell simplex t = value of f on the diag simplex over t
        target_nd = dc.nd(p, q)
        inv = {}
        for s_pos, s in enumerate(nd_diag):
            inv[int(idx[s])] = s_pos
        for k, t in enumerate(target_nd):
            s_pos = inv.get(int(t))
            if s_pos is not None:
                v[o + k] = f[s_pos]
        return v
    return nc, to_tot


def _compare_rings(b, dc, tot, D, F, T):
    ss = SpectralSequence(dc, T)
    nc = NormalizedCochains(D, F, T)
    from .gradedalg import cohomology as _coh
    res = _coh(nc.complex(), representatives=True, check=False)
    images = {}
    for n in range(T):
        _, to_tot = _canonical_map(b, dc, tot, D, F, n)
        imgs = []
        for rep in res.representatives.get(n, []):
            f = np.array(rep, dtype=_dtype(F))
            v = to_tot(f)
            if any(tot.apply(v, n)) if n < tot.top else False:
                raise AssertionError("canonical map is not a cochain map")
            imgs.append(_hclass(ss, v, n))
        # isomorphism on H^n
        if imgs:
            m = Matrix.from_columns(F, imgs, len(imgs[0]))
            if rank(m) != len(imgs):
                raise AssertionError(f"canonical map is not injective on H^{n}")
        images[n] = imgs
    for a in range(T):
        for bdeg in range(T - a):
            for i, ra in enumerate(res.representatives.get(a, [])):
                for j, rb in enumerate(res.representatives.get(bdeg, [])):
                    fa = np.array(ra, dtype=_dtype(F))
                    fb = np.array(rb, dtype=_dtype(F))
                    prod_diag = nc.cup(fa, a, fb, bdeg)
                    _, to_tot = _canonical_map(b, dc, tot, D, F, a + bdeg)
                    lhs = _hclass(ss, to_tot(prod_diag), a + bdeg)
                    _, ta = _canonical_map(b, dc, tot, D, F, a)
                    _, tb = _canonical_map(b, dc, tot, D, F, bdeg)
                    rhs = _hclass(ss, tot.cup(ta(fa), a, tb(fb), bdeg), a + bdeg)
                    if lhs != rhs:
                        raise AssertionError(f"ring structures differ on H^{a} x H^{bdeg}")
    return True


def _hclass(ss, v, n):
    """Coordinates of the cohomology class of a Tot cocycle on E_inf basis."""
    coeff = ss.coordinates(v, n)
    F = ss.field
    ess = [e for e in ss.elements[n] if e.kind == "essential"]
    for i, c in coeff.items():
        e = ss.elements[n][i]
        if e.kind == "source":
            raise AssertionError("vector is not a cocycle")
    return [coeff.get(e.index, F.zero) for e in ess]


def tot_cohomology_class(ss, v, n):
    return _hclass(ss, v, n)


def ss_report(ss, r_max, products=False):
    """JSON-ready report of pages 1..r_max and E_inf."""
    out = {"pages": [], "top": ss.top, "certified_through": ss.top - 1}
    for r in range(1, r_max + 1):
        pv = PageView(ss, r)
        prods = ss.product_table(r) if products else None
        out["pages"].append(pv.to_json(prods))
    out["e_infinity"] = [{"p": p, "q": q, "dim": d, "certified": c}
                         for (p, q), (d, c) in sorted(ss.page_table(None).items())]
    out["e_infinity_totals"] = ss.infinity_totals()
    return out


def dumps(report):
    return json.dumps(report, indent=2, sort_keys=True)
