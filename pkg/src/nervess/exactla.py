"""Exact linear algebra over GF(p) and the rationals.

Scalars in GF(p) are plain ints in ``[0, p)``; rational scalars are
``fractions.Fraction``.  A :class:`Field` is built from an integer ``p``, and
``p = 0`` means the rationals.

Small matrices go through dense reduced row echelon form.  Large sparse ones
(coboundaries of bar and cobar complexes) are reduced column by column in
the compiled kernels, see :mod:`nervess._backend`.
"""

from fractions import Fraction
from math import gcd

import numpy as np

from ._backend import kernels, pykernels


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Field:
    """The field GF(p) for a prime ``p``, or the rationals for ``p = 0``."""

    __slots__ = ("p",)

    def __init__(self, p=0):
        p = int(p)
        if p != 0 and not _is_prime(p):
            raise ValueError(f"field characteristic must be 0 or prime, got {p}")
        if p >= 2 ** 31:
            raise ValueError("prime fields are limited to p < 2^31")
        self.p = p

    @property
    def char(self):
        return self.p

    @property
    def is_rational(self):
        return self.p == 0

    @property
    def zero(self):
        return Fraction(0) if self.p == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.p == 0 else 1

    def __call__(self, x):
        """Coerce an int or Fraction into the field."""
        if self.p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in GF({self.p})")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        if self.p == 0:
            return 1 / Fraction(a)
        return pow(int(a), -1, self.p)

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p == 0 else f"GF({self.p})"

    @property
    def name(self):
        return "Q" if self.p == 0 else f"GF{self.p}"


QQ = Field(0)


def as_field(f):
    """Accept a Field, an int characteristic, or a name like ``GF3``/``Q``."""
    if isinstance(f, Field):
        return f
    if isinstance(f, str):
        s = f.strip().upper()
        if s in ("Q", "QQ", "RATIONALS"):
            return QQ
        if s.startswith("GF"):
            s = s[2:]
        return Field(int(s))
    return Field(int(f))


# ---------------------------------------------------------------------------
# dense matrices


class Matrix:
    """A dense matrix over a field, stored as a list of row lists."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field, rows, ncols=None):
        field = as_field(field)
        self.field = field
        self.rows = [[field(x) for x in r] for r in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")

    @classmethod
    def zeros(cls, field, nrows, ncols):
        field = as_field(field)
        return cls(field, [[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, field, n):
        return cls(field, [[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, field, cols, nrows):
        rows = [[c[i] for c in cols] for i in range(nrows)]
        return cls(field, rows, len(cols))

    def columns(self):
        return [[r[j] for r in self.rows] for j in range(self.ncols)]

    def transpose(self):
        return Matrix(self.field, self.columns(), self.nrows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.field == other.field
                and self.nrows == other.nrows and self.ncols == other.ncols
                and self.rows == other.rows)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch")
            cols = other.columns()
            out = [[_dot(self.field, r, c) for c in cols] for r in self.rows]
            return Matrix(self.field, out, other.ncols)
        return [_dot(self.field, r, other) for r in self.rows]

    def hstack(self, other):
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return Matrix(self.field, [a + b for a, b in zip(self.rows, other.rows)],
                      self.ncols + other.ncols)

    def is_zero(self):
        return not any(any(r) for r in self.rows)

    def to_sparse(self):
        cols = [{i: r[j] for i, r in enumerate(self.rows) if r[j]}
                for j in range(self.ncols)]
        return SparseMatrix.from_columns(self.field, self.nrows, cols)

    def __repr__(self):
        return f"Matrix({self.field!r}, {self.nrows}x{self.ncols})"


def _dot(field, a, b):
    s = sum(x * y for x, y in zip(a, b) if x and y)
    return field(s)


def rref(m):
    """Reduced row echelon form.  Returns ``(rows, pivot_columns)``."""
    F = m.field
    p = F.p
    if p and m.nrows and m.ncols:
        a = np.array(m.rows, dtype=np.int64)
        piv = kernels.dense_rref_modp(a, p)
        return a.tolist(), list(piv)
    rows = [list(r) for r in m.rows]
    nr, nc = m.nrows, m.ncols
    r = 0
    pivots = []
    for c in range(nc):
        if r >= nr:
            break
        i = r
        while i < nr and not rows[i][c]:
            i += 1
        if i == nr:
            continue
        rows[i], rows[r] = rows[r], rows[i]
        inv = F.inv(rows[r][c])
        pr = rows[r] = [F(x * inv) for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [F(x - f * y) for x, y in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(m):
    """Rank of a dense or sparse matrix over its field."""
    if isinstance(m, SparseMatrix):
        return m.rank()
    if m.nrows == 0 or m.ncols == 0:
        return 0
    if m.nrows * m.ncols > 40000:
        return m.to_sparse().rank()
    return len(rref(m)[1])


def kernel_basis(m):
    """Basis of the null space, one vector per free column of the RREF."""
    F = m.field
    if m.nrows == 0:
        rows, piv = [], []
    else:
        rows, piv = rref(m)
    pivset = set(piv)
    basis = []
    for f in range(m.ncols):
        if f in pivset:
            continue
        v = [F.zero] * m.ncols
        v[f] = F.one
        for i, c in enumerate(piv):
            if rows[i][f]:
                v[c] = F(-rows[i][f])
        basis.append(v)
    return basis


def column_space_basis(m):
    """Pivot columns of ``m`` (a lexicographically first basis of the image)."""
    if m.nrows == 0:
        return []
    _, piv = rref(m)
    cols = m.columns()
    return [cols[c] for c in piv]


# ---------------------------------------------------------------------------
# incremental echelon form on sparse vectors


class Echelon:
    """Triangular basis of sparse vectors keyed by their largest index.

    Vectors are dicts ``{index: scalar}``.  Each stored vector carries a tag
    combination (a dict ``{tag: scalar}``) recording how it was obtained from
    the inserted vectors, so :meth:`reduce` can express a vector in terms of
    the inserted generators.
    """

    def __init__(self, field):
        self.field = as_field(field)
        self.piv = {}

    def __len__(self):
        return len(self.piv)

    def reduce(self, v, track=True):
        """Return ``(remainder, combo)`` with ``v = remainder + sum combo*inserted``."""
        F = self.field
        v = {i: x for i, x in v.items() if x}
        combo = {}
        while v:
            low = max(v)
            ent = self.piv.get(low)
            if ent is None:
                break
            vec, tags = ent
            f = F(v[low] * F.inv(vec[low]))
            for i, x in vec.items():
                nx = F(v.get(i, 0) - f * x)
                if nx:
                    v[i] = nx
                else:
                    v.pop(i, None)
            if track:
                for t, c in tags.items():
                    combo[t] = F(combo.get(t, 0) + f * c)
        return v, {t: c for t, c in combo.items() if c}

    def add(self, v, tag=None):
        """Insert ``v``.  Returns True when it was independent of the basis."""
        F = self.field
        rem, combo = self.reduce(v)
        if not rem:
            return False
        tags = {t: F(-c) for t, c in combo.items()}
        if tag is not None:
            tags[tag] = F(tags.get(tag, 0) + 1)
        self.piv[max(rem)] = (rem, tags)
        return True

    def contains(self, v):
        return not self.reduce(v, track=False)[0]


def _dict(v):
    if isinstance(v, dict):
        return {i: x for i, x in v.items() if x}
    return {i: x for i, x in enumerate(v) if x}


class SubquotientBasis:
    """A basis of span(cycles) / span(boundaries) with chosen representatives."""

    def __init__(self, field, ambient_dim, cycle_basis, boundary_basis,
                 chosen_representatives):
        self.field = field
        self.ambient_dim = ambient_dim
        self.cycle_basis = cycle_basis
        self.boundary_basis = boundary_basis
        self.chosen_representatives = chosen_representatives
        ech = Echelon(field)
        for v in boundary_basis:
            ech.add(_dict(v))
        for k, v in enumerate(chosen_representatives):
            ech.add(_dict(v), tag=k)
        self._ech = ech
        self._nb = len(boundary_basis)

    @property
    def dim(self):
        return len(self.chosen_representatives)

    def coordinates(self, v):
        """Coordinates of the class of ``v`` on the representatives.

        Raises ValueError if ``v`` is not in the span of the cycles.
        """
        rem, combo = self._ech.reduce(_dict(v))
        if rem:
            raise ValueError("vector is not a cycle")
        F = self.field
        out = [F.zero] * self.dim
        for t, c in combo.items():
            if t is not None:
                out[t] = c
        return out


def subquotient(cycles, boundaries):
    """Subquotient of column spaces: span(cycles) / span(boundaries).

    Representatives are the cycle columns that are new pivots after the
    boundary columns, taken left to right.
    """
    F = cycles.field
    if boundaries.nrows not in (cycles.nrows, 0) and boundaries.ncols:
        raise ValueError("cycles and boundaries live in different spaces")
    n = cycles.nrows
    zb = Echelon(F)
    for c in cycles.columns():
        zb.add(_dict(c))
    bcols = boundaries.columns() if boundaries.ncols else []
    for j, c in enumerate(bcols):
        if not zb.contains(_dict(c)):
            raise ValueError(f"boundary column {j} is not in the span of the cycles")
    ech = Echelon(F)
    bbasis = []
    for c in bcols:
        if ech.add(_dict(c)):
            bbasis.append(c)
    zbasis = []
    reps = []
    ech2 = Echelon(F)
    for c in cycles.columns():
        if ech2.add(_dict(c)):
            zbasis.append(c)
        if ech.add(_dict(c)):
            reps.append(c)
    return SubquotientBasis(F, n, zbasis, bbasis, reps)


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMatrix:
    """Compressed sparse column matrix over a field.

    For GF(p) the data array is int64 with entries in ``[0, p)``.  For the
    rationals the data is an int64 array when every entry is an integer
    (the usual case for coboundaries) and an object array of Fractions
    otherwise.
    """

    __slots__ = ("field", "nrows", "ncols", "indptr", "indices", "data")

    def __init__(self, field, nrows, ncols, indptr, indices, data):
        self.field = as_field(field)
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.data = data

    @classmethod
    def from_coo(cls, field, nrows, ncols, rows, cols, vals):
        """Build from triplets; duplicates are summed, zeros dropped."""
        F = as_field(field)
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if isinstance(vals, np.ndarray):
            integral = np.issubdtype(vals.dtype, np.integer)
        else:
            integral = all(isinstance(v, (int, np.integer)) for v in vals)
        if F.p and not integral:
            vals = np.array([F(v) for v in vals], dtype=np.int64)
            integral = True
        if integral:
            vals = np.asarray(vals, dtype=np.int64)
            if F.p:
                vals = vals % F.p
            key = cols * max(nrows, 1) + rows
            order = np.argsort(key, kind="stable")
            key = key[order]
            vals = vals[order]
            if len(key):
                start = np.concatenate(([True], key[1:] != key[:-1]))
                sums = np.add.reduceat(vals, np.flatnonzero(start))
                ukey = key[start]
                if F.p:
                    sums %= F.p
                keep = sums != 0
                ukey = ukey[keep]
                sums = sums[keep]
            else:
                ukey = key
                sums = vals
            c = ukey // max(nrows, 1)
            r = ukey % max(nrows, 1)
            indptr = np.zeros(ncols + 1, dtype=np.int64)
            np.add.at(indptr, c + 1, 1)
            np.cumsum(indptr, out=indptr)
            return cls(F, nrows, ncols, indptr, r, np.ascontiguousarray(sums))
        colsd = [dict() for _ in range(ncols)]
        for r, c, v in zip(rows.tolist(), cols.tolist(), vals):
            d = colsd[c]
            d[r] = d.get(r, 0) + Fraction(v)
        return cls.from_columns(F, nrows, colsd)

    @classmethod
    def from_columns(cls, field, nrows, cols):
        F = as_field(field)
        indptr = [0]
        idx, val = [], []
        for c in cols:
            for i in sorted(c):
                x = F(c[i])
                if x:
                    idx.append(i)
                    val.append(x)
            indptr.append(len(idx))
        if F.p or all(x.denominator == 1 for x in val):
            data = np.array([int(x) for x in val], dtype=np.int64)
        else:
            data = np.array(val, dtype=object)
        return cls(F, nrows, len(cols), indptr, idx, data)

    def column(self, j):
        a, b = self.indptr[j], self.indptr[j + 1]
        F = self.field
        return {int(i): F(int(x)) if self.data.dtype != object else x
                for i, x in zip(self.indices[a:b], self.data[a:b])}

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def to_dense(self):
        m = Matrix.zeros(self.field, self.nrows, self.ncols)
        for j in range(self.ncols):
            for i, x in self.column(j).items():
                m.rows[i][j] = x
        return m

    def transpose(self):
        rows, cols, vals = self._coo()
        return SparseMatrix.from_coo(self.field, self.ncols, self.nrows, cols, rows, vals)

    def _coo(self):
        cols = np.repeat(np.arange(self.ncols, dtype=np.int64), np.diff(self.indptr))
        vals = self.data if self.data.dtype != object else list(self.data)
        return self.indices, cols, vals

    @property
    def nnz(self):
        return int(self.indptr[-1])

    def _integer_data(self):
        # rank-preserving rescale of each column to integers
        if self.data.dtype != object:
            return self.data
        out = []
        for j in range(self.ncols):
            seg = list(self.data[self.indptr[j]:self.indptr[j + 1]])
            den = 1
            for x in seg:
                den = den * x.denominator // gcd(den, x.denominator)
            out.extend(int(x * den) for x in seg)
        return out

    def lows(self, skip=None):
        """Pivot row of every reduced column (-1 zero column, -2 skipped)."""
        if skip is not None:
            skip = np.ascontiguousarray(skip, dtype=np.uint8)
        if self.field.p:
            lows, _, _ = kernels.sparse_reduce_modp(
                self.nrows, self.indptr, self.indices, self.data, self.field.p, skip)
            return lows
        data = self._integer_data()
        if isinstance(data, np.ndarray):
            lows = kernels.sparse_rank_int(self.nrows, self.indptr, self.indices, data, skip)
            if lows is not None:
                return lows
        return pykernels.sparse_rank_int(self.nrows, self.indptr, self.indices, data, skip)

    def rank(self, skip=None):
        if self.nrows == 0 or self.ncols == 0:
            return 0
        return int((self.lows(skip) >= 0).sum())

    def reduce(self, skip=None, track_r=True, track_v=True):
        """Column reduction ``D V = R``; returns ``(lows, R, V)`` as column dicts.

        ``R`` and ``V`` are lists of ``{row: scalar}`` dicts (``None`` when not
        tracked).  Works over any field; the rationals use Fractions.
        """
        F = self.field
        if F.p:
            if skip is not None:
                skip = np.ascontiguousarray(skip, dtype=np.uint8)
            lows, R, V = kernels.sparse_reduce_modp(
                self.nrows, self.indptr, self.indices, self.data, F.p, skip,
                track_r, track_v)
            return lows, _unpack(R), _unpack(V)
        return _reduce_rational(self, skip, track_r, track_v)

    def __repr__(self):
        return f"SparseMatrix({self.field!r}, {self.nrows}x{self.ncols}, nnz={self.nnz})"


def _unpack(triple):
    if triple is None:
        return None
    ptr, idx, val = triple
    ptr = ptr.tolist()
    idx = idx.tolist()
    val = val.tolist()
    return [dict(zip(idx[ptr[j]:ptr[j + 1]], val[ptr[j]:ptr[j + 1]]))
            for j in range(len(ptr) - 1)]


def _reduce_rational(m, skip, track_r, track_v):
    ncols = m.ncols
    lows = np.full(ncols, -1, dtype=np.int64)
    row_piv = {}
    rcols = [dict() for _ in range(ncols)]
    vcols = [dict() for _ in range(ncols)]
    for j in range(ncols):
        if skip is not None and skip[j]:
            lows[j] = -2
            continue
        acc = m.column(j)
        acc = {i: Fraction(x) for i, x in acc.items()}
        vacc = {j: Fraction(1)} if track_v else None
        while acc:
            low = max(acc)
            k = row_piv.get(low)
            if k is None:
                break
            rk = rcols[k]
            f = acc[low] / rk[low]
            for i, x in rk.items():
                nx = acc.get(i, 0) - f * x
                if nx:
                    acc[i] = nx
                else:
                    acc.pop(i, None)
            if track_v:
                for i, x in vcols[k].items():
                    nx = vacc.get(i, 0) - f * x
                    if nx:
                        vacc[i] = nx
                    else:
                        vacc.pop(i, None)
        if acc:
            low = max(acc)
            lows[j] = low
            row_piv[low] = j
            rcols[j] = acc
        if track_v:
            vcols[j] = vacc
    return lows, (rcols if track_r else None), (vcols if track_v else None)
