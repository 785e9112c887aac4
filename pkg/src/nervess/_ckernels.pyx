# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled elimination kernels.

Every routine here has a pure-Python twin in ``_pykernels`` with the same
signature and the same output, bit for bit.  Matrices arrive in CSC form as
int64 arrays whose entries are already reduced into ``[0, p)``.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memset
from libc.stdint cimport int64_t, uint8_t

cnp.import_array()


cdef extern from *:
    """
    static inline int nvs_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int nvs_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int nvs_mul_ovf(long long a, long long b, long long *r) nogil
    int nvs_sub_ovf(long long a, long long b, long long *r) nogil


cdef inline int64_t _inv(int64_t a, int64_t p) noexcept nogil:
    cdef int64_t t = 0, nt = 1, r = p, nr = a % p, q, tmp
    while nr != 0:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    if t < 0:
        t += p
    return t


cdef inline int64_t _gcd(int64_t a, int64_t b) noexcept nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# growable storage and a max-heap of row indices

cdef struct Store:
    int64_t *ptr       # ncols + 1 offsets
    int64_t *idx
    int64_t *val
    int64_t nnz
    int64_t cap


cdef int _store_init(Store *s, int64_t ncols) noexcept nogil:
    s.ptr = <int64_t *> malloc((ncols + 1) * sizeof(int64_t))
    s.cap = 1024
    s.idx = <int64_t *> malloc(s.cap * sizeof(int64_t))
    s.val = <int64_t *> malloc(s.cap * sizeof(int64_t))
    s.nnz = 0
    if s.ptr == NULL or s.idx == NULL or s.val == NULL:
        return -1
    s.ptr[0] = 0
    return 0


cdef int _store_reserve(Store *s, int64_t extra) noexcept nogil:
    cdef int64_t need = s.nnz + extra
    cdef int64_t *ni
    cdef int64_t *nv
    if need <= s.cap:
        return 0
    while s.cap < need:
        s.cap *= 2
    ni = <int64_t *> realloc(s.idx, s.cap * sizeof(int64_t))
    if ni == NULL:
        return -1
    s.idx = ni
    nv = <int64_t *> realloc(s.val, s.cap * sizeof(int64_t))
    if nv == NULL:
        return -1
    s.val = nv
    return 0


cdef void _store_free(Store *s) noexcept nogil:
    free(s.ptr)
    free(s.idx)
    free(s.val)


cdef struct Heap:
    int64_t *a
    int64_t n
    int64_t cap


cdef int _heap_push(Heap *h, int64_t x) noexcept nogil:
    cdef int64_t i, parent, tmp
    cdef int64_t *na
    if h.n == h.cap:
        h.cap = h.cap * 2 if h.cap else 64
        na = <int64_t *> realloc(h.a, h.cap * sizeof(int64_t))
        if na == NULL:
            return -1
        h.a = na
    i = h.n
    h.a[i] = x
    h.n += 1
    while i > 0:
        parent = (i - 1) >> 1
        if h.a[parent] >= h.a[i]:
            break
        tmp = h.a[parent]
        h.a[parent] = h.a[i]
        h.a[i] = tmp
        i = parent
    return 0


cdef void _heap_pop(Heap *h) noexcept nogil:
    cdef int64_t i = 0, l, r, m, tmp
    h.n -= 1
    if h.n == 0:
        return
    h.a[0] = h.a[h.n]
    while True:
        l = 2 * i + 1
        r = l + 1
        m = i
        if l < h.n and h.a[l] > h.a[m]:
            m = l
        if r < h.n and h.a[r] > h.a[m]:
            m = r
        if m == i:
            break
        tmp = h.a[m]
        h.a[m] = h.a[i]
        h.a[i] = tmp
        i = m


cdef int64_t _heap_low(Heap *h, int64_t *acc, uint8_t *mark) noexcept nogil:
    # largest index with a nonzero accumulator entry; stale entries dropped
    cdef int64_t top
    while h.n > 0:
        top = h.a[0]
        if acc[top] != 0:
            return top
        _heap_pop(h)
        mark[top] = 0
    return -1


cdef int64_t _drain(Heap *h, int64_t *acc, uint8_t *mark, Store *out,
                    int64_t *scratch) noexcept nogil:
    # move the nonzero entries of acc into out (ascending order), clear acc
    cdef int64_t k = 0, i, x
    while h.n > 0:
        x = h.a[0]
        _heap_pop(h)
        if mark[x]:
            mark[x] = 0
            if acc[x] != 0:
                scratch[k] = x
                k += 1
    if out != NULL:
        if _store_reserve(out, k) != 0:
            return -1
        for i in range(k):
            x = scratch[k - 1 - i]
            out.idx[out.nnz] = x
            out.val[out.nnz] = acc[x]
            out.nnz += 1
    for i in range(k):
        acc[scratch[i]] = 0
    return k


cdef object _export(Store *s, int64_t ncols):
    cdef int64_t i
    ptr = np.empty(ncols + 1, dtype=np.int64)
    idx = np.empty(s.nnz, dtype=np.int64)
    val = np.empty(s.nnz, dtype=np.int64)
    cdef int64_t[::1] pv = ptr
    cdef int64_t[::1] iv = idx
    cdef int64_t[::1] vv = val
    for i in range(ncols + 1):
        pv[i] = s.ptr[i]
    for i in range(s.nnz):
        iv[i] = s.idx[i]
        vv[i] = s.val[i]
    return ptr, idx, val


# ---------------------------------------------------------------------------

def sparse_reduce_modp(int64_t nrows, const int64_t[::1] indptr,
                       const int64_t[::1] indices, const int64_t[::1] data,
                       int64_t p, skip=None, bint track_r=False,
                       bint track_v=False):
    """Left-to-right column reduction mod ``p`` keyed on the largest row index.

    Returns ``(lows, R, V)``; ``lows[j]`` is the pivot row of reduced column
    ``j``, ``-1`` for a column that reduced to zero and ``-2`` for a skipped
    column.  ``R`` and ``V`` are CSC triples (or ``None``): ``R`` holds the
    reduced columns, ``V`` the column operations, so that ``D @ V = R``.
    """
    cdef int64_t ncols = indptr.shape[0] - 1
    cdef int64_t j, t, k, low, piv, f, x, q, nv
    cdef const uint8_t[::1] skipv
    cdef bint use_skip = skip is not None
    if use_skip:
        skipv = skip
    lows_arr = np.full(ncols, -1, dtype=np.int64)
    cdef int64_t[::1] lows = lows_arr
    cdef int64_t *row_piv = <int64_t *> malloc(max(nrows, 1) * sizeof(int64_t))
    cdef int64_t *acc = <int64_t *> malloc(max(nrows, 1) * sizeof(int64_t))
    cdef uint8_t *mark = <uint8_t *> malloc(max(nrows, 1))
    cdef int64_t *scratch = <int64_t *> malloc(max(nrows, 1) * sizeof(int64_t))
    cdef int64_t *vacc = <int64_t *> malloc(max(ncols, 1) * sizeof(int64_t))
    cdef uint8_t *vmark = <uint8_t *> malloc(max(ncols, 1))
    cdef int64_t *vscratch = <int64_t *> malloc(max(ncols, 1) * sizeof(int64_t))
    cdef Heap h
    cdef Heap vh
    cdef Store rs
    cdef Store vs
    h.a = NULL; h.n = 0; h.cap = 0
    vh.a = NULL; vh.n = 0; vh.cap = 0
    if _store_init(&rs, ncols) != 0 or _store_init(&vs, ncols) != 0:
        raise MemoryError()
    for t in range(nrows):
        row_piv[t] = -1
        acc[t] = 0
        mark[t] = 0
    for t in range(ncols):
        vacc[t] = 0
        vmark[t] = 0
    try:
        with nogil:
            for j in range(ncols):
                if use_skip and skipv[j]:
                    lows[j] = -2
                    rs.ptr[j + 1] = rs.nnz
                    vs.ptr[j + 1] = vs.nnz
                    continue
                for t in range(indptr[j], indptr[j + 1]):
                    x = indices[t]
                    acc[x] = (acc[x] + data[t]) % p
                    if not mark[x]:
                        mark[x] = 1
                        _heap_push(&h, x)
                if track_v:
                    vacc[j] = 1
                    vmark[j] = 1
                    _heap_push(&vh, j)
                low = _heap_low(&h, acc, mark)
                while low >= 0 and row_piv[low] >= 0:
                    k = row_piv[low]
                    piv = rs.val[rs.ptr[k + 1] - 1]
                    f = (acc[low] * _inv(piv, p)) % p
                    for t in range(rs.ptr[k], rs.ptr[k + 1]):
                        x = rs.idx[t]
                        acc[x] = (acc[x] + (p - f) * rs.val[t]) % p
                        if not mark[x]:
                            mark[x] = 1
                            _heap_push(&h, x)
                    if track_v:
                        for t in range(vs.ptr[k], vs.ptr[k + 1]):
                            x = vs.idx[t]
                            vacc[x] = (vacc[x] + (p - f) * vs.val[t]) % p
                            if not vmark[x]:
                                vmark[x] = 1
                                _heap_push(&vh, x)
                    low = _heap_low(&h, acc, mark)
                lows[j] = low
                if low >= 0:
                    row_piv[low] = j
                    if _drain(&h, acc, mark, &rs, scratch) < 0:
                        with gil:
                            raise MemoryError()
                else:
                    _drain(&h, acc, mark, NULL, scratch)
                rs.ptr[j + 1] = rs.nnz
                if track_v:
                    if _drain(&vh, vacc, vmark, &vs, vscratch) < 0:
                        with gil:
                            raise MemoryError()
                vs.ptr[j + 1] = vs.nnz
        R = _export(&rs, ncols) if track_r else None
        V = _export(&vs, ncols) if track_v else None
    finally:
        free(row_piv); free(acc); free(mark); free(scratch)
        free(vacc); free(vmark); free(vscratch)
        free(h.a); free(vh.a)
        _store_free(&rs); _store_free(&vs)
    return lows_arr, R, V


def sparse_rank_int(int64_t nrows, const int64_t[::1] indptr,
                    const int64_t[::1] indices, const int64_t[::1] data,
                    skip=None):
    """Fraction-free integer column reduction; rank over the rationals.

    Returns ``lows`` as in :func:`sparse_reduce_modp`, or ``None`` when an
    intermediate value leaves the int64 range (the caller redoes the work
    with Python integers).
    """
    cdef int64_t ncols = indptr.shape[0] - 1
    cdef int64_t j, t, k, low, piv, cv, g, a, b, x, n, cont
    cdef long long m1, m2, d
    cdef bint overflow = 0
    cdef const uint8_t[::1] skipv
    cdef bint use_skip = skip is not None
    if use_skip:
        skipv = skip
    lows_arr = np.full(ncols, -1, dtype=np.int64)
    cdef int64_t[::1] lows = lows_arr
    cdef int64_t *row_piv = <int64_t *> malloc(max(nrows, 1) * sizeof(int64_t))
    cdef int64_t *acc = <int64_t *> malloc(max(nrows, 1) * sizeof(int64_t))
    cdef uint8_t *mark = <uint8_t *> malloc(max(nrows, 1))
    cdef int64_t *scratch = <int64_t *> malloc(max(nrows, 1) * sizeof(int64_t))
    cdef Heap h
    cdef Store rs
    h.a = NULL; h.n = 0; h.cap = 0
    if _store_init(&rs, ncols) != 0:
        raise MemoryError()
    for t in range(nrows):
        row_piv[t] = -1
        acc[t] = 0
        mark[t] = 0
    try:
        with nogil:
            for j in range(ncols):
                if overflow:
                    break
                if use_skip and skipv[j]:
                    lows[j] = -2
                    rs.ptr[j + 1] = rs.nnz
                    continue
                for t in range(indptr[j], indptr[j + 1]):
                    x = indices[t]
                    acc[x] = acc[x] + data[t]
                    if not mark[x]:
                        mark[x] = 1
                        _heap_push(&h, x)
                low = _heap_low(&h, acc, mark)
                while low >= 0 and row_piv[low] >= 0:
                    k = row_piv[low]
                    piv = rs.val[rs.ptr[k + 1] - 1]
                    cv = acc[low]
                    g = _gcd(piv, cv)
                    a = piv // g
                    b = cv // g
                    # acc <- a*acc - b*R_k
                    if a != 1:
                        for t in range(h.n):
                            x = h.a[t]
                            if nvs_mul_ovf(acc[x], a, &m1):
                                overflow = 1
                                break
                            acc[x] = m1
                    if overflow:
                        break
                    for t in range(rs.ptr[k], rs.ptr[k + 1]):
                        x = rs.idx[t]
                        if nvs_mul_ovf(b, rs.val[t], &m2) or nvs_sub_ovf(acc[x], m2, &d):
                            overflow = 1
                            break
                        acc[x] = d
                        if not mark[x]:
                            mark[x] = 1
                            _heap_push(&h, x)
                    if overflow:
                        break
                    low = _heap_low(&h, acc, mark)
                if overflow:
                    break
                lows[j] = low
                if low >= 0:
                    row_piv[low] = j
                    n = _drain(&h, acc, mark, &rs, scratch)
                    if n < 0:
                        with gil:
                            raise MemoryError()
                    cont = 0
                    for t in range(rs.nnz - n, rs.nnz):
                        cont = _gcd(cont, rs.val[t])
                    if cont > 1:
                        for t in range(rs.nnz - n, rs.nnz):
                            rs.val[t] = rs.val[t] // cont
                else:
                    _drain(&h, acc, mark, NULL, scratch)
                rs.ptr[j + 1] = rs.nnz
    finally:
        free(row_piv); free(acc); free(mark); free(scratch)
        free(h.a)
        _store_free(&rs)
    if overflow:
        return None
    return lows_arr


def dense_rref_modp(int64_t[:, ::1] a, int64_t p):
    """In-place reduced row echelon form mod ``p``; returns pivot columns."""
    cdef Py_ssize_t nr = a.shape[0], nc = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, k
    cdef int64_t inv, f
    pivots = []
    with nogil:
        for c in range(nc):
            if r >= nr:
                break
            i = r
            while i < nr and a[i, c] == 0:
                i += 1
            if i == nr:
                continue
            if i != r:
                for k in range(nc):
                    f = a[i, k]
                    a[i, k] = a[r, k]
                    a[r, k] = f
            inv = _inv(a[r, c], p)
            for k in range(c, nc):
                a[r, k] = (a[r, k] * inv) % p
            for i in range(nr):
                if i != r and a[i, c] != 0:
                    f = a[i, c]
                    for k in range(c, nc):
                        if a[r, k] != 0:
                            a[i, k] = (a[i, k] + (p - f) * a[r, k]) % p
            with gil:
                pivots.append(c)
            r += 1
    return pivots
