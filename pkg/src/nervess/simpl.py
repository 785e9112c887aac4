"""Truncated simplicial sets, nerves, group actions and bisimplicial sets.

A truncated simplicial set stores, for each dimension n <= N, the number of
n-simplices and integer tables ``faces[n][i]`` (d_i: X_n -> X_{n-1}) and
``degens[n][j]`` (s_j: X_n -> X_{n+1}, only for n < N).  Simplices are
integers; labels are optional and only used for reporting.

Bisimplicial sets are lazy: the tables of bidegree (p, q) are produced on
demand and cached, since the interesting ones (transformation groupoids)
grow like |G|^p.
"""

import itertools

import numpy as np

from .exactla import SparseMatrix, as_field
from .gradedalg import CochainComplex, GradedVectorSpace, cohomology


# ---------------------------------------------------------------------------
# simplicial sets


class TruncatedSimplicialSet:
    """Simplicial set truncated at dimension ``N``.

    ``faces[n]`` is an int64 array of shape ``(n + 1, sizes[n])`` for
    ``1 <= n <= N`` and ``degens[n]`` has shape ``(n + 1, sizes[n])`` for
    ``0 <= n < N``.  ``known_dim`` is the dimension beyond which there are no
    nondegenerate simplices, when that is known (for a finite model), else
    None.
    """

    def __init__(self, N, sizes, faces, degens, labels=None, known_dim=None):
        self.N = int(N)
        self.sizes = [int(s) for s in sizes]
        if len(self.sizes) != self.N + 1:
            raise ValueError("need one size per dimension 0..N")
        self.faces = {n: np.asarray(faces[n], dtype=np.int64).reshape(n + 1, self.sizes[n])
                      for n in range(1, self.N + 1)}
        self.degens = {n: np.asarray(degens[n], dtype=np.int64).reshape(n + 1, self.sizes[n])
                       for n in range(self.N)}
        self.labels = labels
        self.known_dim = known_dim
        self._nd = {}

    def face(self, n, i):
        return self.faces[n][i]

    def degeneracy(self, n, j):
        return self.degens[n][j]

    def degenerate_mask(self, n):
        """Boolean mask of degenerate n-simplices (x = s_j d_j x for some j)."""
        m = np.zeros(self.sizes[n], dtype=bool)
        if n == 0:
            return m
        ar = np.arange(self.sizes[n])
        for j in range(n):
            m |= self.degens[n - 1][j][self.faces[n][j]] == ar
        return m

    def nondegenerate(self, n):
        if n not in self._nd:
            if n > self.N:
                raise ValueError(f"dimension {n} beyond truncation {self.N}")
            self._nd[n] = np.flatnonzero(~self.degenerate_mask(n))
        return self._nd[n]

    def nondegenerate_counts(self):
        return [len(self.nondegenerate(n)) for n in range(self.N + 1)]

    def check_identities(self):
        """Assert every simplicial identity on every stored simplex."""
        N = self.N
        for n in range(2, N + 1):
            d = self.faces
            for j in range(n + 1):
                for i in range(j):
                    if not np.array_equal(d[n - 1][i][d[n][j]], d[n - 1][j - 1][d[n][i]]):
                        raise AssertionError(f"d{i} d{j} != d{j - 1} d{i} in dim {n}")
        for n in range(N):
            s = self.degens
            ar = np.arange(self.sizes[n])
            for j in range(n + 1):
                x = s[n][j]
                for i in range(n + 2):
                    y = self.faces[n + 1][i][x]
                    if i < j:
                        want = s[n - 1][j - 1][self.faces[n][i]]
                    elif i in (j, j + 1):
                        want = ar
                    else:
                        want = s[n - 1][j][self.faces[n][i - 1]]
                    if not np.array_equal(y, want):
                        raise AssertionError(f"d{i} s{j} identity fails in dim {n}")
            if n + 1 < N:
                for j in range(n + 1):
                    for i in range(j + 1):
                        a = s[n + 1][i][s[n][j]]
                        b = s[n + 1][j + 1][s[n][i]]
                        if not np.array_equal(a, b):
                            raise AssertionError(f"s{i} s{j} identity fails in dim {n}")
        return True

    @classmethod
    def from_labelled(cls, N, simplices, face, degen, known_dim=None):
        """Build from per-dimension label lists and label-level operators.

        ``face(n, i, s)`` and ``degen(n, j, s)`` return labels.
        """
        index = [{s: k for k, s in enumerate(simplices[n])} for n in range(N + 1)]
        faces = {}
        degens = {}
        for n in range(1, N + 1):
            faces[n] = np.array([[index[n - 1][face(n, i, s)] for s in simplices[n]]
                                 for i in range(n + 1)], dtype=np.int64).reshape(n + 1, -1)
        for n in range(N):
            degens[n] = np.array([[index[n + 1][degen(n, j, s)] for s in simplices[n]]
                                  for j in range(n + 1)], dtype=np.int64).reshape(n + 1, -1)
        return cls(N, [len(simplices[n]) for n in range(N + 1)], faces, degens,
                   labels=[list(s) for s in simplices], known_dim=known_dim)

    def subset(self, keep):
        """Sub-simplicial set on the given per-dimension index arrays.

        The caller guarantees closure under faces and degeneracies.
        """
        pos = {}
        for n in range(self.N + 1):
            a = np.full(self.sizes[n], -1, dtype=np.int64)
            a[keep[n]] = np.arange(len(keep[n]))
            pos[n] = a
        faces = {n: pos[n - 1][self.faces[n][:, keep[n]]] for n in range(1, self.N + 1)}
        degens = {n: pos[n + 1][self.degens[n][:, keep[n]]] for n in range(self.N)}
        for t in list(faces.values()) + list(degens.values()):
            if t.size and t.min() < 0:
                raise ValueError("subset is not closed under the simplicial operators")
        labels = None
        if self.labels is not None:
            labels = [[self.labels[n][k] for k in keep[n]] for n in range(self.N + 1)]
        return TruncatedSimplicialSet(self.N, [len(keep[n]) for n in range(self.N + 1)],
                                      faces, degens, labels, self.known_dim)

    def __repr__(self):
        return f"TruncatedSimplicialSet(N={self.N}, sizes={self.sizes})"


def point(N):
    """The one-point simplicial set."""
    return TruncatedSimplicialSet(N, [1] * (N + 1),
                                  {n: np.zeros((n + 1, 1)) for n in range(1, N + 1)},
                                  {n: np.zeros((n + 1, 1)) for n in range(N)}, known_dim=0)


def empty(N):
    return TruncatedSimplicialSet(N, [0] * (N + 1),
                                  {n: np.zeros((n + 1, 0)) for n in range(1, N + 1)},
                                  {n: np.zeros((n + 1, 0)) for n in range(N)}, known_dim=-1)


def disjoint_union(parts):
    N = parts[0].N
    off = [np.cumsum([0] + [x.sizes[n] for x in parts]) for n in range(N + 1)]
    faces = {n: np.hstack([x.faces[n] + off[n - 1][k] for k, x in enumerate(parts)])
             for n in range(1, N + 1)}
    degens = {n: np.hstack([x.degens[n] + off[n + 1][k] for k, x in enumerate(parts)])
              for n in range(N)}
    kd = [x.known_dim for x in parts]
    known = None if any(k is None for k in kd) else max(kd + [-1])
    return TruncatedSimplicialSet(N, [int(off[n][-1]) for n in range(N + 1)],
                                  faces, degens, known_dim=known)


# ---------------------------------------------------------------------------
# groups and categories


class FiniteGroup:
    """A finite group given by a multiplication table on ``0..n-1``.

    ``table[a][b]`` is the index of the product ``a * b``.
    """

    def __init__(self, names, table, name=None):
        self.names = [str(x) for x in names]
        self.table = np.asarray(table, dtype=np.int64)
        self.name = name or f"G{len(self.names)}"
        n = len(self.names)
        if self.table.shape != (n, n):
            raise ValueError("multiplication table must be |G| x |G|")
        ids = [e for e in range(n) if np.array_equal(self.table[e], np.arange(n))
               and np.array_equal(self.table[:, e], np.arange(n))]
        if len(ids) != 1:
            raise ValueError("no two-sided identity in the table")
        self.e = ids[0]
        inv = np.full(n, -1, dtype=np.int64)
        for a in range(n):
            hits = np.flatnonzero(self.table[a] == self.e)
            if len(hits) != 1 or self.table[hits[0], a] != self.e:
                raise ValueError(f"element {self.names[a]} has no inverse")
            inv[a] = hits[0]
        self.inv = inv
        t = self.table
        ar = np.arange(n)
        if not np.array_equal(t[t[:, :, None], ar[None, None, :]],
                              t[ar[:, None, None], t[None, :, :]]):
            raise ValueError("multiplication table is not associative")

    @property
    def order(self):
        return len(self.names)

    def __len__(self):
        return len(self.names)

    def mul(self, a, b):
        return int(self.table[a, b])

    def conj(self, h, g):
        """h g h^{-1}."""
        return int(self.table[self.table[h, g], self.inv[h]])

    def is_abelian(self):
        return np.array_equal(self.table, self.table.T)

    def conjugacy_classes(self):
        seen = set()
        out = []
        for g in range(self.order):
            if g in seen:
                continue
            c = sorted({self.conj(h, g) for h in range(self.order)})
            seen.update(c)
            out.append(c)
        return out

    def index(self, name):
        return self.names.index(str(name))

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


def cyclic_group(n):
    names = [str(k) for k in range(n)]
    names[0] = "e"
    return FiniteGroup(names, [[(a + b) % n for b in range(n)] for a in range(n)], f"Z{n}")


def product_group(g, h):
    n, m = g.order, h.order
    names = [f"({g.names[a]},{h.names[b]})" for a in range(n) for b in range(m)]
    table = [[int(g.table[a1, a2]) * m + int(h.table[b1, b2])
              for a2 in range(n) for b2 in range(m)]
             for a1 in range(n) for b1 in range(m)]
    return FiniteGroup(names, table, f"{g.name}x{h.name}")


def symmetric_group(k):
    perms = list(itertools.permutations(range(k)))
    idx = {p: i for i, p in enumerate(perms)}

    def comp(a, b):  # (a b)(i) = a(b(i))
        return tuple(a[b[i]] for i in range(k))
    names = ["e" if p == tuple(range(k)) else "".join(str(x + 1) for x in p) for p in perms]
    table = [[idx[comp(a, b)] for b in perms] for a in perms]
    return FiniteGroup(names, table, f"S{k}")


def builtin_group(name):
    key = name.strip().upper().replace("×", "X").replace("Z/", "Z")
    if key in ("E", "1", "TRIVIAL", "Z1"):
        return cyclic_group(1)
    if key == "S3":
        return symmetric_group(3)
    if key == "Z2XZ2":
        g = product_group(cyclic_group(2), cyclic_group(2))
        g.name = "Z2xZ2"
        return g
    if key.startswith("Z") and key[1:].isdigit():
        return cyclic_group(int(key[1:]))
    raise ValueError(f"unknown group {name!r}; built-ins are Z2, Z3, Z2xZ2, S3 (and Zn)")


class FiniteCategory:
    """Finite category: objects, morphisms ``(source, target)``, composition.

    ``compose[(g, f)]`` is ``g o f`` for ``target(f) == source(g)``;
    ``identity[x]`` is the identity morphism of object ``x``.
    """

    def __init__(self, objects, morphisms, compose, identity):
        self.objects = list(objects)
        self.morphisms = dict(morphisms)
        self.compose = dict(compose)
        self.identity = dict(identity)
        self.check()

    def check(self):
        M = self.morphisms
        for x in self.objects:
            i = self.identity[x]
            if M[i] != (x, x):
                raise ValueError(f"identity of {x} has wrong endpoints")
        for f, (a, b) in M.items():
            if self.compose.get((self.identity[b], f)) != f or \
                    self.compose.get((f, self.identity[a])) != f:
                raise ValueError(f"identity law fails for {f}")
        for (g, f), h in self.compose.items():
            if M[f][1] != M[g][0] or M[h] != (M[f][0], M[g][1]):
                raise ValueError(f"composite {g} o {f} has wrong endpoints")
        for f, (a, b) in M.items():
            for g, (b2, c) in M.items():
                if b2 != b:
                    continue
                if (g, f) not in self.compose:
                    raise ValueError(f"missing composite {g} o {f}")
                for h, (c2, _) in M.items():
                    if c2 != c:
                        continue
                    l = self.compose[(h, self.compose[(g, f)])]
                    r = self.compose[(self.compose[(h, g)], f)]
                    if l != r:
                        raise ValueError("composition is not associative")

    @classmethod
    def from_group(cls, G):
        ms = {g: ("*", "*") for g in range(G.order)}
        comp = {(g, f): G.mul(g, f) for g in range(G.order) for f in range(G.order)}
        return cls(["*"], ms, comp, {"*": G.e})

    @classmethod
    def from_poset(cls, elements, leq):
        ms = {(a, b): (a, b) for a in elements for b in elements if leq(a, b)}
        comp = {((b, c), (a, b)): (a, c) for (a, b) in ms for (b2, c) in ms if b2 == b}
        return cls(elements, ms, comp, {x: (x, x) for x in elements})


def _group_nerve_tables(G, N):
    """Face and degeneracy tables of the nerve of G in mixed-radix indices.

    The p-simplex (g1, ..., gp) has index sum g_i |G|^(p-i).  Returns the
    digit arrays too, since transformation groupoids need g1.
    """
    n = G.order
    T = G.table
    digits = {}
    for p in range(N + 2):
        size = n ** p
        ar = np.arange(size, dtype=np.int64)
        dg = np.empty((p, size), dtype=np.int64)
        for i in range(p):
            dg[i] = (ar // n ** (p - 1 - i)) % n
        digits[p] = dg

    def encode(dg, p):
        out = np.zeros(dg.shape[1] if dg.ndim == 2 else 1, dtype=np.int64)
        for i in range(p):
            out = out * n + dg[i]
        return out

    faces = {}
    degens = {}
    for p in range(1, N + 2):
        dg = digits[p]
        rows = []
        for i in range(p + 1):
            if i == 0:
                nd = dg[1:]
            elif i == p:
                nd = dg[:-1]
            else:
                merged = T[dg[i], dg[i - 1]]  # g_{i+1} g_i
                nd = np.vstack([dg[:i - 1], merged[None, :], dg[i + 1:]])
            rows.append(encode(nd, p - 1) if p - 1 else np.zeros(dg.shape[1], dtype=np.int64))
        faces[p] = np.array(rows, dtype=np.int64)
    for p in range(N + 1):
        dg = digits[p]
        size = n ** p
        rows = []
        for j in range(p + 1):
            ins = np.full((1, size), G.e, dtype=np.int64)
            nd = np.vstack([dg[:j], ins, dg[j:]])
            rows.append(encode(nd, p + 1))
        degens[p] = np.array(rows, dtype=np.int64).reshape(p + 1, size)
    return digits, faces, degens


def nerve(c, N):
    """Nerve of a finite group or finite category, truncated at ``N``.

    An n-simplex is a chain x0 -> x1 -> ... -> xn; d_0 and d_n drop the end
    arrows, inner faces compose, s_j inserts an identity at x_j.
    """
    if isinstance(c, FiniteGroup):
        _, faces, degens = _group_nerve_tables(c, N)
        return TruncatedSimplicialSet(
            N, [c.order ** n for n in range(N + 1)],
            {n: faces[n] for n in range(1, N + 1)},
            {n: degens[n] for n in range(N)},
            known_dim=0 if c.order == 1 else None)
    M = c.morphisms
    chains = [[(x,) for x in c.objects]]
    for n in range(1, N + 1):
        nxt = []
        for ch in chains[-1]:
            if n == 1:
                x = ch[0]
                nxt.extend((f,) for f, (a, _) in M.items() if a == x)
            else:
                t = M[ch[-1]][1]
                nxt.extend(ch + (f,) for f, (a, _) in M.items() if a == t)
        chains.append(nxt)

    def face(n, i, s):
        if n == 1:
            return (M[s[0]][1],) if i == 0 else (M[s[0]][0],)
        if i == 0:
            return s[1:]
        if i == n:
            return s[:-1]
        return s[:i - 1] + (c.compose[(s[i], s[i - 1])],) + s[i + 1:]

    def degen(n, j, s):
        if n == 0:
            return (c.identity[s[0]],)
        obj = M[s[0]][0] if j == 0 else M[s[j - 1]][1]
        return s[:j] + (c.identity[obj],) + s[j:]
    return TruncatedSimplicialSet.from_labelled(N, chains, face, degen)


# ---------------------------------------------------------------------------
# G-simplicial sets


class GSimplicialSet:
    """A truncated simplicial set with a left action of a finite group.

    ``action[n]`` has shape ``(|G|, sizes[n])``: ``action[n][g][x] = g.x``.
    """

    def __init__(self, sset, group, action):
        self.sset = sset
        self.group = group
        self.action = {n: np.asarray(action[n], dtype=np.int64).reshape(group.order, sset.sizes[n])
                       for n in range(sset.N + 1)}

    @property
    def N(self):
        return self.sset.N

    def check(self):
        s, G = self.sset, self.group
        for n in range(s.N + 1):
            a = self.action[n]
            if not np.array_equal(a[G.e], np.arange(s.sizes[n])):
                raise AssertionError("identity does not act trivially")
            for g in range(G.order):
                if len(np.unique(a[g])) != s.sizes[n]:
                    raise AssertionError("action is not a bijection")
                for h in range(G.order):
                    if not np.array_equal(a[g][a[h]], a[G.mul(g, h)]):
                        raise AssertionError("action is not a group action")
                if n >= 1:
                    for i in range(n + 1):
                        if not np.array_equal(s.faces[n][i][a[g]], self.action[n - 1][g][s.faces[n][i]]):
                            raise AssertionError("action does not commute with faces")
                if n < s.N:
                    for j in range(n + 1):
                        if not np.array_equal(s.degens[n][j][a[g]],
                                              self.action[n + 1][g][s.degens[n][j]]):
                            raise AssertionError("action does not commute with degeneracies")
        return True

    def is_free(self):
        for n in range(self.N + 1):
            ar = np.arange(self.sset.sizes[n])
            for g in range(self.group.order):
                if g != self.group.e and np.any(self.action[n][g] == ar):
                    return False
        return True

    def __repr__(self):
        return f"GSimplicialSet({self.group.name} on {self.sset})"


def trivial_action(sset, group):
    return GSimplicialSet(sset, group,
                          {n: np.tile(np.arange(sset.sizes[n]), (group.order, 1))
                           for n in range(sset.N + 1)})


def poset_nerve(elements, leq, N, automorphisms=None, group=None):
    """Nerve of a finite poset: n-simplices are chains x0 <= ... <= xn.

    If ``automorphisms`` (a list of dicts element -> element, one per group
    element, in group order) is given, returns a GSimplicialSet.
    """
    elements = list(elements)
    up = {a: [b for b in elements if leq(a, b)] for a in elements}
    chains = [[(a,) for a in elements]]
    for n in range(1, N + 1):
        chains.append([c + (b,) for c in chains[-1] for b in up[c[-1]]])
    height = 0
    strict = [[(a,) for a in elements]]
    while strict[-1]:
        nxt = [c + (b,) for c in strict[-1] for b in up[c[-1]] if b != c[-1]]
        strict.append(nxt)
    height = len(strict) - 2
    sset = TruncatedSimplicialSet.from_labelled(
        N, chains, lambda n, i, s: s[:i] + s[i + 1:], lambda n, j, s: s[:j + 1] + s[j:],
        known_dim=height)
    if automorphisms is None:
        return sset
    index = [{c: k for k, c in enumerate(chains[n])} for n in range(N + 1)]
    action = {n: np.array([[index[n][tuple(phi[x] for x in c)] for c in chains[n]]
                           for phi in automorphisms], dtype=np.int64)
              for n in range(N + 1)}
    return GSimplicialSet(sset, group, action)


def _face_poset_nerve(faces, N, group=None, vertex_action=None):
    """Nerve of the face poset of a simplicial complex (barycentric subdivision)."""
    faces = sorted({frozenset(f) for f in faces}, key=lambda f: (len(f), sorted(f)))
    leq = lambda a, b: a <= b
    if group is None:
        return poset_nerve(faces, leq, N)
    autos = [{f: frozenset(vertex_action[g][v] for v in f) for f in faces}
             for g in range(group.order)]
    return poset_nerve(faces, leq, N, autos, group)


def sphere_model(n, N=None):
    """Antipodal Z/2-simplicial n-sphere.

    Barycentric subdivision of the boundary of the (n+1)-cross-polytope,
    realized as the nerve of its face poset.  Vertices are signed basis
    vectors ``(i, +1)``/``(i, -1)``; a face is a nonempty set of them with no
    antipodal pair.
    """
    if n < 1:
        raise ValueError("sphere_model needs n >= 1")
    if N is None:
        N = n + 1
    verts = [(i, s) for i in range(n + 1) for s in (1, -1)]
    faces = []
    for k in range(1, n + 2):
        for coords in itertools.combinations(range(n + 1), k):
            for signs in itertools.product((1, -1), repeat=k):
                faces.append(frozenset(zip(coords, signs)))
    G = cyclic_group(2)
    vact = [{v: v for v in verts}, {(i, s): (i, -s) for (i, s) in verts}]
    return _face_poset_nerve(faces, N, G, vact)


def parse_space(name, N=None):
    key = name.strip().lower()
    if key.startswith("sphere") and key[6:].isdigit():
        return sphere_model(int(key[6:]), N)
    if key in ("point", "pt"):
        G = cyclic_group(2)
        return trivial_action(point(N or 2), G)
    raise ValueError(f"unknown space {name!r}; built-ins are sphereN and point")


def fixed_points(x, g):
    """Sub-simplicial set of simplices fixed by ``g``."""
    s = x.sset
    keep = {n: np.flatnonzero(x.action[n][g] == np.arange(s.sizes[n])) for n in range(s.N + 1)}
    return s.subset(keep), keep


def inertia_groupoid(x):
    """The G-simplicial set of pairs (s, g) with g.s = s, h.(s, g) = (hs, hgh^-1).

    Returns ``(GSimplicialSet, components)`` where ``components[g]`` is the
    fixed sub-simplicial set X^g and the union is ordered by g.
    """
    G = x.group
    s = x.sset
    comps = {}
    keeps = {}
    for g in range(G.order):
        comps[g], keeps[g] = fixed_points(x, g)
    union = disjoint_union([comps[g] for g in range(G.order)])
    off = {n: np.cumsum([0] + [len(keeps[g][n]) for g in range(G.order)]) for n in range(s.N + 1)}
    action = {}
    for n in range(s.N + 1):
        pos = {g: np.full(s.sizes[n], -1, dtype=np.int64) for g in range(G.order)}
        for g in range(G.order):
            pos[g][keeps[g][n]] = np.arange(len(keeps[g][n]))
        a = np.empty((G.order, union.sizes[n]), dtype=np.int64)
        for h in range(G.order):
            for g in range(G.order):
                cg = G.conj(h, g)
                src = keeps[g][n]
                tgt = pos[cg][x.action[n][h][src]]
                a[h, off[n][g]:off[n][g + 1]] = off[n][cg] + tgt
        action[n] = a
    return GSimplicialSet(union, G, action), comps


def random_g_complex(rng, group, n_vertex_orbits=2, max_dim=2, n_faces=4, N=3):
    """Random G-simplicial set: face-poset nerve of a random G-invariant complex.

    The group acts on the vertex set ``G x {0..n_vertex_orbits-1}`` by left
    multiplication on the first factor (free orbits), or trivially on orbits
    listed in a random subset.
    """
    G = group
    free = [bool(rng.integers(0, 2)) for _ in range(n_vertex_orbits)]
    verts = []
    for k in range(n_vertex_orbits):
        if free[k]:
            verts.extend((g, k) for g in range(G.order))
        else:
            verts.append((G.e, k))

    def act(h, v):
        g, k = v
        return (G.mul(h, g), k) if free[k] else v
    simplices = set()
    for _ in range(n_faces):
        size = int(rng.integers(1, max_dim + 2))
        pick = rng.choice(len(verts), size=min(size, len(verts)), replace=False)
        top = frozenset(verts[i] for i in pick)
        for h in range(G.order):
            img = frozenset(act(h, v) for v in top)
            for r in range(1, len(img) + 1):
                for sub in itertools.combinations(sorted(img), r):
                    simplices.add(frozenset(sub))
    for v in verts:
        simplices.add(frozenset([v]))
    vact = [{v: act(h, v) for v in verts} for h in range(G.order)]
    return _face_poset_nerve(simplices, N, G, vact)


def random_poset_nerve(rng, n_elements=4, N=3):
    """Nerve of a random poset (a random sub-order of a total order)."""
    rel = {(a, b) for a in range(n_elements) for b in range(a + 1, n_elements)
           if rng.random() < 0.5}
    # transitive closure
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, d) in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return poset_nerve(range(n_elements), lambda a, b: a == b or (a, b) in rel, N)


# ---------------------------------------------------------------------------
# normalized cochains


def _vec_dtype(F):
    return object if F.p == 0 else np.int64


class NormalizedCochains:
    """Normalized cochains of a truncated simplicial set with the AW cup.

    Cochains are numpy vectors (int64 mod p, or object arrays of Fractions)
    indexed by the nondegenerate simplices of each dimension.
    """

    def __init__(self, sset, field, top=None):
        self.sset = sset
        self.field = as_field(field)
        self.top = sset.N if top is None else top
        self.nd = {n: sset.nondegenerate(n) for n in range(self.top + 1)}
        self.pos = {}
        for n in range(self.top + 1):
            a = np.full(sset.sizes[n], -1, dtype=np.int64)
            a[self.nd[n]] = np.arange(len(self.nd[n]))
            self.pos[n] = a
        self._complex = None

    def dim(self, n):
        return len(self.nd[n])

    def coboundary(self, n):
        """Sparse matrix of d: C^n -> C^{n+1}."""
        F = self.field
        rows_nd = self.nd[n + 1]
        rr, cc, vv = [], [], []
        for i in range(n + 2):
            f = self.pos[n][self.sset.faces[n + 1][i][rows_nd]]
            ok = np.flatnonzero(f >= 0)
            rr.append(ok)
            cc.append(f[ok])
            vv.append(np.full(len(ok), (-1) ** i, dtype=np.int64))
        return SparseMatrix.from_coo(F, len(rows_nd), len(self.nd[n]),
                                     np.concatenate(rr), np.concatenate(cc), np.concatenate(vv))

    def complex(self):
        if self._complex is None:
            labels = {n: list(range(self.dim(n))) for n in range(self.top + 1)}
            d = {n: self.coboundary(n) for n in range(self.top)}
            self._complex = CochainComplex(GradedVectorSpace(labels, self.top), d, self.field)
        return self._complex

    def zero(self, n):
        F = self.field
        if F.p == 0:
            return np.array([F.zero] * self.dim(n), dtype=object)
        return np.zeros(self.dim(n), dtype=np.int64)

    def front(self, n, k):
        """Index of the front k-face (vertices 0..k) of every n-simplex."""
        idx = np.arange(self.sset.sizes[n])
        for m in range(n, k, -1):
            idx = self.sset.faces[m][m][idx]
        return idx

    def back(self, n, k):
        """Index of the back k-face (vertices n-k..n) of every n-simplex."""
        idx = np.arange(self.sset.sizes[n])
        for m in range(n, k, -1):
            idx = self.sset.faces[m][0][idx]
        return idx

    def evaluate(self, f, n, simplices):
        """Values of the n-cochain f on arbitrary simplices (0 on degenerate)."""
        pos = self.pos[n][simplices]
        out = np.where(pos >= 0, f[np.maximum(pos, 0)], 0)
        if self.field.p == 0:
            out = out.astype(object)
        return out

    def cup(self, f, a, g, b):
        """Alexander-Whitney cup of an a-cochain and a b-cochain."""
        n = a + b
        sig = self.nd[n]
        fv = self.evaluate(f, a, self.front(n, a)[sig])
        gv = self.evaluate(g, b, self.back(n, b)[sig])
        out = fv * gv
        if self.field.p:
            out %= self.field.p
        return out

    def apply(self, d, f):
        """Apply a sparse coboundary matrix to a cochain vector."""
        return apply_sparse(d, f, self.field)

    def unit(self):
        F = self.field
        v = self.zero(0)
        v[:] = F.one
        return v


def apply_sparse(m, v, F):
    """Matrix-vector product for a SparseMatrix and a numpy vector."""
    F = as_field(F)
    out = np.zeros(m.nrows, dtype=_vec_dtype(F))
    if F.p == 0:
        out[:] = F.zero
    if m.ncols == 0:
        return out
    cols = np.repeat(np.arange(m.ncols), np.diff(m.indptr))
    prod = m.data * v[cols]
    np.add.at(out, m.indices, prod)
    if F.p:
        out %= F.p
    return out


def normalized_cochains(sset, field, top=None):
    return NormalizedCochains(sset, field, top)


def sset_cohomology(sset, field, top=None, representatives=False):
    """Cohomology of the normalized cochains; certified through ``top - 1``."""
    nc = NormalizedCochains(sset, field, top)
    return cohomology(nc.complex(), representatives=representatives, check=False)


def action_on_cohomology(x, field, degrees=None):
    """Matrices of g^* on H^n(X) in the chosen representative basis.

    Returns ``(result, mats)`` with ``mats[n][g]`` a list of columns:
    column k holds the coordinates of g^*(rep_k).  Here ``(g^*f)(s) = f(g s)``.
    """
    F = as_field(field)
    nc = NormalizedCochains(x.sset, F)
    res = cohomology(nc.complex(), representatives=True, check=False)
    mats = {}
    degrees = range(x.N) if degrees is None else degrees
    for n in degrees:
        sq = res.subquotients.get(n)
        mats[n] = {}
        for g in range(x.group.order):
            cols = []
            if sq is not None:
                for rep in sq.chosen_representatives:
                    f = np.array(rep, dtype=_vec_dtype(F))
                    gf = nc.evaluate(f, n, x.action[n][g][nc.nd[n]])
                    cols.append(sq.coordinates(list(gf)))
            mats[n][g] = cols
    return res, mats


# ---------------------------------------------------------------------------
# bisimplicial sets


class BisimplicialSet:
    """Lazy bisimplicial set; subclasses provide the per-bidegree tables.

    Horizontal operators change p, vertical ones change q.  Tables:
    ``hface(p, q)`` (p+1, size) into (p-1, q); ``hdeg(p, q)`` into (p+1, q);
    ``vface(p, q)`` (q+1, size) into (p, q-1); ``vdeg(p, q)`` into (p, q+1).
    """

    vertical_dim = None     # q beyond which no vertically nondegenerate simplices
    horizontal_constant = False
    vertical_constant = False

    def __init__(self):
        self._cache = {}

    def _cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def size(self, p, q):
        raise NotImplementedError

    def hface(self, p, q):
        return self._cached(("hf", p, q), lambda: self._hface(p, q))

    def hdeg(self, p, q):
        return self._cached(("hd", p, q), lambda: self._hdeg(p, q))

    def vface(self, p, q):
        return self._cached(("vf", p, q), lambda: self._vface(p, q))

    def vdeg(self, p, q):
        return self._cached(("vd", p, q), lambda: self._vdeg(p, q))

    def vertical_nondegenerate(self, p, q):
        def calc():
            ar = np.arange(self.size(p, q))
            m = np.zeros(len(ar), dtype=bool)
            if q > 0:
                vf = self.vface(p, q)
                vd = self.vdeg(p, q - 1)
                for j in range(q):
                    m |= vd[j][vf[j]] == ar
            return np.flatnonzero(~m)
        return self._cached(("vnd", p, q), calc)

    def row(self, p, N):
        """The vertical simplicial set S_{p, *} up to dimension N."""
        return TruncatedSimplicialSet(
            N, [self.size(p, q) for q in range(N + 1)],
            {q: self.vface(p, q) for q in range(1, N + 1)},
            {q: self.vdeg(p, q) for q in range(N)}, known_dim=self.vertical_dim)

    def check_identities(self, Nh, Nv):
        """Simplicial identities in both directions and their commutation."""
        for p in range(Nh + 1):
            self.row(p, Nv).check_identities()
        for q in range(Nv + 1):
            self.column(q, Nh).check_identities()
        for p in range(Nh + 1):
            for q in range(Nv + 1):
                if p >= 1 and q >= 1:
                    hf, vf = self.hface(p, q), self.vface(p, q)
                    for i in range(p + 1):
                        for j in range(q + 1):
                            a = self.vface(p - 1, q)[j][hf[i]]
                            b = self.hface(p, q - 1)[i][vf[j]]
                            if not np.array_equal(a, b):
                                raise AssertionError("horizontal and vertical faces do not commute")
                if p < Nh and q < Nv:
                    hd, vd = self.hdeg(p, q), self.vdeg(p, q)
                    for i in range(p + 1):
                        for j in range(q + 1):
                            a = self.vdeg(p + 1, q)[j][hd[i]]
                            b = self.hdeg(p, q + 1)[i][vd[j]]
                            if not np.array_equal(a, b):
                                raise AssertionError("degeneracies do not commute")
                if p >= 1 and q < Nv:
                    hf, vd = self.hface(p, q), self.vdeg(p, q)
                    for i in range(p + 1):
                        for j in range(q + 1):
                            a = self.hface(p, q + 1)[i][vd[j]]
                            b = self.vdeg(p - 1, q)[j][hf[i]]
                            if not np.array_equal(a, b):
                                raise AssertionError("hface and vdeg do not commute")
                if q >= 1 and p < Nh:
                    vf, hd = self.vface(p, q), self.hdeg(p, q)
                    for i in range(p + 1):
                        for j in range(q + 1):
                            a = self.vface(p + 1, q)[j][hd[i]]
                            b = self.hdeg(p, q - 1)[i][vf[j]]
                            if not np.array_equal(a, b):
                                raise AssertionError("vface and hdeg do not commute")
        return True

    def column(self, q, N):
        """The horizontal simplicial set S_{*, q} up to dimension N."""
        return TruncatedSimplicialSet(
            N, [self.size(p, q) for p in range(N + 1)],
            {p: self.hface(p, q) for p in range(1, N + 1)},
            {p: self.hdeg(p, q) for p in range(N)})


class TransformationGroupoid(BisimplicialSet):
    """Nerve of G acting on a G-simplicial set X: S_{p,q} = G^p x X_q.

    The (p, q)-simplex ``(g1, ..., gp; x)`` has index ``gidx * |X_q| + x``
    with ``gidx`` the mixed-radix index of the nerve of G.
    d^h_0 moves the base point to g1.x, inner faces compose, d^h_p drops gp.
    """

    def __init__(self, group, x, Nh):
        super().__init__()
        self.group = group
        self.x = x
        self.Nh = Nh
        self.Nv = x.N
        self.vertical_dim = x.sset.known_dim
        self.digits, self.gfaces, self.gdegens = _group_nerve_tables(group, Nh + 1)

    def size(self, p, q):
        return self.group.order ** p * self.x.sset.sizes[q]

    def _xs(self, q):
        return self.x.sset.sizes[q]

    def _hface(self, p, q):
        n = self._xs(q)
        gsz = self.group.order ** p
        xs = np.arange(n, dtype=np.int64)
        out = np.empty((p + 1, gsz * n), dtype=np.int64)
        for i in range(p + 1):
            gnew = self.gfaces[p][i]
            if i == 0:
                g1 = self.digits[p][0]
                xnew = self.x.action[q][g1]           # shape (gsz, n)
            else:
                xnew = np.broadcast_to(xs, (gsz, n))
            out[i] = (gnew[:, None] * n + xnew).ravel()
        return out

    def _hdeg(self, p, q):
        n = self._xs(q)
        xs = np.arange(n, dtype=np.int64)
        return np.array([(self.gdegens[p][j][:, None] * n + xs[None, :]).ravel()
                         for j in range(p + 1)], dtype=np.int64).reshape(p + 1, -1)

    def _vface(self, p, q):
        gsz = self.group.order ** p
        m = self._xs(q - 1)
        g = np.arange(gsz, dtype=np.int64)
        f = self.x.sset.faces[q]
        return np.array([(g[:, None] * m + f[j][None, :]).ravel() for j in range(q + 1)],
                        dtype=np.int64).reshape(q + 1, -1)

    def _vdeg(self, p, q):
        gsz = self.group.order ** p
        m = self._xs(q + 1)
        g = np.arange(gsz, dtype=np.int64)
        s = self.x.sset.degens[q]
        return np.array([(g[:, None] * m + s[j][None, :]).ravel() for j in range(q + 1)],
                        dtype=np.int64).reshape(q + 1, -1)


def transformation_groupoid(group, x, Nh=None):
    if x.group is not group and x.group.order != group.order:
        raise ValueError("the G-simplicial set is acted on by a different group")
    return TransformationGroupoid(group, x, x.N if Nh is None else Nh)


class ProductBisimplicialSet(BisimplicialSet):
    """K in the horizontal direction, L in the vertical: S_{p,q} = K_p x L_q."""

    def __init__(self, K, L):
        super().__init__()
        self.K, self.L = K, L
        self.Nh, self.Nv = K.N, L.N
        self.vertical_dim = L.known_dim
        self.horizontal_constant = K.known_dim == 0 and K.sizes[0] == 1
        self.vertical_constant = L.known_dim == 0 and L.sizes[0] == 1

    def size(self, p, q):
        return self.K.sizes[p] * self.L.sizes[q]

    def _hface(self, p, q):
        m = self.L.sizes[q]
        l = np.arange(m)
        return np.array([(self.K.faces[p][i][:, None] * m + l[None, :]).ravel()
                         for i in range(p + 1)], dtype=np.int64).reshape(p + 1, -1)

    def _hdeg(self, p, q):
        m = self.L.sizes[q]
        l = np.arange(m)
        return np.array([(self.K.degens[p][i][:, None] * m + l[None, :]).ravel()
                         for i in range(p + 1)], dtype=np.int64).reshape(p + 1, -1)

    def _vface(self, p, q):
        m = self.L.sizes[q - 1]
        k = np.arange(self.K.sizes[p])
        return np.array([(k[:, None] * m + self.L.faces[q][j][None, :]).ravel()
                         for j in range(q + 1)], dtype=np.int64).reshape(q + 1, -1)

    def _vdeg(self, p, q):
        m = self.L.sizes[q + 1]
        k = np.arange(self.K.sizes[p])
        return np.array([(k[:, None] * m + self.L.degens[q][j][None, :]).ravel()
                         for j in range(q + 1)], dtype=np.int64).reshape(q + 1, -1)


def box_product(K, L):
    """Bisimplicial set K ⊠ L."""
    return ProductBisimplicialSet(K, L)


def constant_horizontal(X, Nh=None):
    """S_{p,q} = X_q with identity horizontal operators."""
    b = ProductBisimplicialSet(point(X.N if Nh is None else Nh), X)
    return b


def constant_vertical(K, Nv=None):
    """S_{p,q} = K_p with identity vertical operators."""
    return ProductBisimplicialSet(K, point(K.N if Nv is None else Nv))


class TableBisimplicialSet(BisimplicialSet):
    """Bisimplicial set given by explicit tables (e.g. loaded from JSON)."""

    def __init__(self, Nh, Nv, sizes, hfaces, hdegs, vfaces, vdegs, vertical_dim=None):
        super().__init__()
        self.Nh, self.Nv = Nh, Nv
        self.sizes = {k: int(v) for k, v in sizes.items()}
        self.tables = {"hf": hfaces, "hd": hdegs, "vf": vfaces, "vd": vdegs}
        self.vertical_dim = vertical_dim

    def size(self, p, q):
        return self.sizes[(p, q)]

    def _get(self, kind, p, q, n):
        return np.asarray(self.tables[kind][(p, q)], dtype=np.int64).reshape(n, self.size(p, q))

    def _hface(self, p, q):
        return self._get("hf", p, q, p + 1)

    def _hdeg(self, p, q):
        return self._get("hd", p, q, p + 1)

    def _vface(self, p, q):
        return self._get("vf", p, q, q + 1)

    def _vdeg(self, p, q):
        return self._get("vd", p, q, q + 1)


def diagonal(b, N):
    """Diagonal simplicial set: X_n = S_{n,n}, d_i = d^h_i d^v_i, s_j = s^h_j s^v_j."""
    if N > min(b.Nh, b.Nv):
        raise ValueError(f"diagonal up to {N} exceeds truncation ({b.Nh}, {b.Nv})")
    faces = {}
    degens = {}
    for n in range(1, N + 1):
        vf = b.vface(n, n)
        hf = b.hface(n, n - 1)
        faces[n] = np.array([hf[i][vf[i]] for i in range(n + 1)], dtype=np.int64)
    for n in range(N):
        vd = b.vdeg(n, n)
        hd = b.hdeg(n, n + 1)
        degens[n] = np.array([hd[j][vd[j]] for j in range(n + 1)], dtype=np.int64)
    return TruncatedSimplicialSet(N, [b.size(n, n) for n in range(N + 1)], faces, degens)
