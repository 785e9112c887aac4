"""Graded vector spaces, cochain complexes and small graded algebras.

Everything is truncated at a top degree ``N``.  Objects record the largest
degree through which they are complete (``complete_through``), and
composite constructions propagate the minimum.

Basis labels of the presented algebras are tuples of ``(generator, index)``
pairs; the unit is the empty tuple.  For an exterior or polynomial generator
the index is the exponent, for a divided power generator it is the divided
power index, so ``(("y", 1), ("w", 3))`` stands for ``y * gamma_3(w)``.
"""

from dataclasses import dataclass, field as dc_field
from math import comb

from .exactla import Matrix, SparseMatrix, as_field, rank, subquotient


class GradedVectorSpace:
    """Labelled bases per degree ``0..N``."""

    def __init__(self, labels, N=None, complete_through=None):
        labels = {int(d): list(ls) for d, ls in labels.items()}
        if N is None:
            N = max(labels) if labels else 0
        for d, ls in labels.items():
            if d < 0 or d > N:
                raise ValueError(f"degree {d} outside [0, {N}]")
            if len(set(ls)) != len(ls):
                raise ValueError(f"duplicate labels in degree {d}")
        self.N = N
        self.labels = {d: labels.get(d, []) for d in range(N + 1)}
        self.complete_through = N if complete_through is None else complete_through

    def dim(self, d):
        return len(self.labels.get(d, []))

    @property
    def dims(self):
        return [self.dim(d) for d in range(self.N + 1)]

    def degree_of(self, label):
        for d, ls in self.labels.items():
            if label in ls:
                return d
        raise KeyError(label)

    def truncate(self, N):
        return GradedVectorSpace({d: self.labels[d] for d in range(min(N, self.N) + 1)},
                                 N, min(N, self.complete_through))

    def __repr__(self):
        return f"GradedVectorSpace(dims={self.dims})"


@dataclass
class PoincareSeries:
    dims: list

    def __post_init__(self):
        self.dims = [int(x) for x in self.dims]

    @property
    def N(self):
        return len(self.dims) - 1

    def __getitem__(self, k):
        return self.dims[k]

    def __eq__(self, other):
        if isinstance(other, PoincareSeries):
            return self.dims == other.dims
        return list(self.dims) == list(other)

    def __add__(self, other):
        n = max(len(self.dims), len(other.dims))
        a = self.dims + [0] * (n - len(self.dims))
        b = other.dims + [0] * (n - len(other.dims))
        return PoincareSeries([x + y for x, y in zip(a, b)])

    def as_tuple(self):
        return tuple(self.dims)


def poincare_series(g, N=None):
    """Per-degree dimensions of a graded space (or anything with ``dims``)."""
    dims = list(g.dims)
    if N is not None:
        dims = (dims + [0] * (N + 1))[:N + 1]
    return PoincareSeries(dims)


# ---------------------------------------------------------------------------
# cochain complexes


class CochainComplex:
    """``C^0 -> C^1 -> ... -> C^N`` with ``d[n]: C^n -> C^{n+1}``.

    Differentials are Matrix or SparseMatrix objects with ``dim C^{n+1}``
    rows and ``dim C^n`` columns.  A missing ``d[n]`` is the zero map.
    """

    def __init__(self, space, d, field):
        self.space = space
        self.field = as_field(field)
        self.d = dict(d)
        for n, m in self.d.items():
            if (m.nrows, m.ncols) != (space.dim(n + 1), space.dim(n)):
                raise ValueError(f"d[{n}] has shape {m.nrows}x{m.ncols}, expected "
                                 f"{space.dim(n + 1)}x{space.dim(n)}")

    @property
    def N(self):
        return self.space.N

    def differential(self, n):
        m = self.d.get(n)
        if m is None:
            return Matrix.zeros(self.field, self.space.dim(n + 1), self.space.dim(n))
        return m

    def check(self):
        """Raise ValueError unless d[n+1] d[n] = 0 for all stored n."""
        for n in range(self.N - 1):
            a, b = self.d.get(n), self.d.get(n + 1)
            if a is None or b is None:
                continue
            if isinstance(a, SparseMatrix):
                a = a.to_dense()
            if isinstance(b, SparseMatrix):
                b = b.to_dense()
            if not (b @ a).is_zero():
                raise ValueError(f"d^2 != 0 at degree {n}")

    def euler_characteristic(self, upto=None):
        upto = self.N if upto is None else upto
        return sum((-1) ** n * self.space.dim(n) for n in range(upto + 1))


@dataclass
class CohomologyResult:
    """Cohomology dims, representatives per degree and the certified range."""
    dims: list
    certified_through: int
    representatives: dict = dc_field(default_factory=dict)
    subquotients: dict = dc_field(default_factory=dict)
    field: object = None

    def poincare(self):
        return PoincareSeries(self.dims)


def cohomology(c, representatives=True, check=True):
    """Cohomology of a truncated cochain complex.

    Degree ``N`` is computed (kernel of the missing outgoing map is taken to
    be everything) but only degrees ``<= N - 1`` are certified.
    """
    if check:
        c.check()
    N = c.N
    ranks = {}
    for n in range(-1, N + 1):
        if n < 0 or n >= N:
            ranks[n] = 0
        elif c.space.dim(n) == 0 or c.space.dim(n + 1) == 0:
            ranks[n] = 0
        else:
            ranks[n] = rank(c.differential(n))
    dims = [c.space.dim(n) - ranks[n] - ranks[n - 1] for n in range(N + 1)]
    reps, subs = {}, {}
    if representatives:
        from .exactla import kernel_basis
        for n in range(N + 1):
            dn = c.space.dim(n)
            if dn == 0:
                reps[n] = []
                continue
            if n < N:
                dm = c.differential(n)
                if isinstance(dm, SparseMatrix):
                    dm = dm.to_dense()
                z = kernel_basis(dm) if dm.nrows else Matrix.identity(c.field, dn).columns()
            else:
                z = Matrix.identity(c.field, dn).columns()
            zmat = Matrix.from_columns(c.field, z, dn) if z else Matrix.zeros(c.field, dn, 0)
            if n > 0 and c.space.dim(n - 1):
                bm = c.differential(n - 1)
                if isinstance(bm, SparseMatrix):
                    bm = bm.to_dense()
            else:
                bm = Matrix.zeros(c.field, dn, 0)
            sq = subquotient(zmat, bm)
            subs[n] = sq
            reps[n] = sq.chosen_representatives
            assert sq.dim == dims[n]
    return CohomologyResult(dims, N - 1, reps, subs, c.field)


# ---------------------------------------------------------------------------
# graded algebras


def divided_power_product(r, s, p=0):
    """Coefficient of gamma_{r+s} in gamma_r * gamma_s, reduced in the field."""
    if r < 0 or s < 0:
        raise ValueError("divided power indices are nonnegative")
    c = comb(r + s, r)
    return c % p if p else c


def label_str(label, kinds=None):
    if not label:
        return "1"
    kinds = kinds or {}
    parts = []
    for name, k in label:
        kind = kinds.get(name, "poly")
        if kind == "gamma":
            parts.append(f"g{k}({name})")
        elif k == 1:
            parts.append(name)
        else:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def _mul_labels(a, b):
    return tuple(a) + tuple(b)


class GradedAlgebraPresentation:
    """A finite graded algebra given by structure constants on a labelled basis.

    ``table[(a, b)]`` is a dict ``{c: coeff}`` with ``a * b = sum coeff * c``;
    missing pairs multiply to zero.
    """

    def __init__(self, space, unit, table, field, commutative=True, kinds=None):
        self.space = space
        self.unit = unit
        self.table = table
        self.field = as_field(field)
        self.commutative = commutative
        self.kinds = dict(kinds or {})
        self._deg = {lab: d for d, ls in space.labels.items() for lab in ls}

    @property
    def N(self):
        return self.space.N

    def degree(self, label):
        return self._deg[label]

    @property
    def dims(self):
        return self.space.dims

    def basis(self):
        return [lab for d in range(self.N + 1) for lab in self.space.labels[d]]

    def mul_basis(self, a, b):
        return dict(self.table.get((a, b), {}))

    def mul(self, u, v):
        """Product of two elements given as dicts label -> coeff."""
        F = self.field
        out = {}
        for a, x in u.items():
            if not x:
                continue
            for b, y in v.items():
                if not y:
                    continue
                for c, z in self.table.get((a, b), {}).items():
                    out[c] = F(out.get(c, 0) + x * y * z)
        return {c: z for c, z in out.items() if z}

    def check(self):
        """Raise ValueError unless unital, associative (and graded commutative)."""
        B = self.basis()
        one = {self.unit: self.field.one}
        for a in B:
            e = {a: self.field.one}
            if self.mul(one, e) != e or self.mul(e, one) != e:
                raise ValueError(f"unit law fails on {a}")
        for a in B:
            for b in B:
                ab = self.mul({a: 1}, {b: 1})
                if self.commutative:
                    sgn = (-1) ** (self.degree(a) * self.degree(b))
                    ba = self.mul({b: 1}, {a: 1})
                    if ab != {c: self.field(sgn * z) for c, z in ba.items() if z}:
                        raise ValueError(f"graded commutativity fails on {a}, {b}")
                for c in B:
                    if self.degree(a) + self.degree(b) + self.degree(c) > self.N:
                        continue
                    if self.mul(ab, {c: 1}) != self.mul({a: 1}, self.mul({b: 1}, {c: 1})):
                        raise ValueError(f"associativity fails on {a}, {b}, {c}")

    def label_str(self, label):
        return label_str(label, self.kinds)

    def generators(self):
        """Algebra generators: basis elements not in the span of products of
        positive-degree elements (indecomposables, degree by degree)."""
        from .exactla import Echelon
        F = self.field
        idx = {lab: i for i, lab in enumerate(self.basis())}
        gens = []
        for d in range(1, self.N + 1):
            ech = Echelon(F)
            for a in self.basis():
                da = self.degree(a)
                if da == 0 or da >= d:
                    continue
                for b in self.space.labels.get(d - da, []):
                    prod = self.mul({a: 1}, {b: 1})
                    ech.add({idx[c]: z for c, z in prod.items()})
            for lab in self.space.labels[d]:
                if ech.add({idx[lab]: F.one}):
                    gens.append(lab)
        return gens


def _single_generator(name, deg, field, N, kind, height=None):
    F = as_field(field)
    if deg <= 0:
        raise ValueError("generators must have positive degree")
    top = N // deg
    if kind == "ext":
        top = min(top, 1)
    if height is not None:
        top = min(top, height - 1)
    labels = {}
    basis = []
    for k in range(top + 1):
        lab = ((name, k),) if k else ()
        labels.setdefault(k * deg, []).append(lab)
        basis.append((k, lab))
    table = {}
    for i, a in basis:
        for j, b in basis:
            k = i + j
            if k > top:
                continue
            if kind == "gamma":
                c = divided_power_product(i, j, F.p)
            elif kind == "ext":
                c = 1
            else:
                c = 1
            c = F(c)
            if c:
                table[(a, b)] = {basis[k][1]: c}
    # an odd generator with nonzero square is only graded commutative in char 2
    comm = deg % 2 == 0 or top < 2 or F.p == 2
    return GradedAlgebraPresentation(GradedVectorSpace(labels, N), (), table, F,
                                     commutative=comm, kinds={name: kind})


def unit_algebra(field, N):
    """The ground field in degree 0."""
    F = as_field(field)
    return GradedAlgebraPresentation(GradedVectorSpace({0: [()]}, N), (),
                                     {((), ()): {(): F.one}}, F)


def exterior(name, deg, field, N):
    """Exterior algebra on one generator of positive degree."""
    return _single_generator(name, deg, field, N, "ext")


def polynomial(name, deg, field, N):
    """Polynomial algebra on one generator, truncated at degree N."""
    return _single_generator(name, deg, field, N, "poly")


def truncated_polynomial(name, deg, height, field, N):
    """``K[x]/(x^height)``."""
    return _single_generator(name, deg, field, N, "trunc", height)


def divided_power(name, deg, field, N):
    """Divided power algebra Gamma[w] with gamma_r gamma_s = binom(r+s, r) gamma_{r+s}."""
    if deg % 2:
        raise ValueError("divided power generators live in even degree")
    return _single_generator(name, deg, field, N, "gamma")


def tensor_algebra(a, b):
    """Graded tensor product with the Koszul sign
    ``(a x b)(a' x b') = (-1)^{|b||a'|} aa' x bb'``."""
    if a.field != b.field:
        raise ValueError("algebras over different fields")
    if a.N != b.N:
        raise ValueError("algebras truncated at different degrees")
    F = a.field
    N = a.N
    labels = {}
    deg = {}
    for da in range(N + 1):
        for la in a.space.labels[da]:
            for db in range(N + 1 - da):
                for lb in b.space.labels[db]:
                    lab = _mul_labels(la, lb)
                    labels.setdefault(da + db, []).append(lab)
                    deg[lab] = (la, lb)
    table = {}
    for x, (la, lb) in deg.items():
        for y, (la2, lb2) in deg.items():
            sign = (-1) ** (b.degree(lb) * a.degree(la2))
            pa = a.table.get((la, la2), {})
            if not pa:
                continue
            pb = b.table.get((lb, lb2), {})
            out = {}
            for ca, za in pa.items():
                for cb, zb in pb.items():
                    if a.degree(ca) + b.degree(cb) > N:
                        continue
                    out[_mul_labels(ca, cb)] = F(sign * za * zb)
            out = {c: z for c, z in out.items() if z}
            if out:
                table[(x, y)] = out
    kinds = dict(a.kinds)
    kinds.update(b.kinds)
    space = GradedVectorSpace(labels, N,
                              min(a.space.complete_through, b.space.complete_through))
    return GradedAlgebraPresentation(space, _mul_labels(a.unit, b.unit), table, F,
                                     a.commutative and b.commutative, kinds)


def tensor_all(algebras):
    out = algebras[0]
    for x in algebras[1:]:
        out = tensor_algebra(out, x)
    return out


def direct_sum_series(*series):
    out = series[0]
    for s in series[1:]:
        out = out + s
    return out
