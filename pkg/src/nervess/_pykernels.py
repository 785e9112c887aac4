"""Pure-Python twins of the compiled kernels in ``_ckernels``.

Same signatures, same outputs.  Columns are handled as dicts and the current
pivot row ("low") is tracked with a heap, exactly as in the compiled path.
"""

import heapq
from math import gcd

import numpy as np


def _columns(indptr, indices, data):
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    data = [int(x) for x in data]
    for j in range(len(indptr) - 1):
        yield indices[indptr[j]:indptr[j + 1]], data[indptr[j]:indptr[j + 1]]


def _low(acc, heap):
    while heap:
        top = -heap[0]
        if acc.get(top, 0):
            return top
        heapq.heappop(heap)
        acc.pop(top, None)
    return -1


def _pack(cols):
    ptr = np.zeros(len(cols) + 1, dtype=np.int64)
    idx, val = [], []
    for j, c in enumerate(cols):
        keys = sorted(k for k, v in c.items() if v)
        idx.extend(keys)
        val.extend(c[k] for k in keys)
        ptr[j + 1] = len(idx)
    return ptr, np.array(idx, dtype=np.int64), np.array(val, dtype=np.int64)


def sparse_reduce_modp(nrows, indptr, indices, data, p, skip=None,
                       track_r=False, track_v=False):
    ncols = len(indptr) - 1
    lows = np.full(ncols, -1, dtype=np.int64)
    row_piv = {}
    rcols = [None] * ncols
    vcols = [None] * ncols
    for j, (idx, val) in enumerate(_columns(indptr, indices, data)):
        if skip is not None and skip[j]:
            lows[j] = -2
            rcols[j] = {}
            vcols[j] = {}
            continue
        acc = {}
        for i, v in zip(idx, val):
            acc[i] = (acc.get(i, 0) + v) % p
        heap = [-i for i in acc]
        heapq.heapify(heap)
        vacc = {j: 1} if track_v else None
        low = _low(acc, heap)
        while low >= 0 and low in row_piv:
            k = row_piv[low]
            rk = rcols[k]
            f = acc[low] * pow(rk[low], -1, p) % p
            for i, v in rk.items():
                if i not in acc:
                    heapq.heappush(heap, -i)
                acc[i] = (acc.get(i, 0) - f * v) % p
            if track_v:
                for i, v in vcols[k].items():
                    vacc[i] = (vacc.get(i, 0) - f * v) % p
            low = _low(acc, heap)
        lows[j] = low
        acc = {i: v for i, v in acc.items() if v}
        if low >= 0:
            row_piv[low] = j
            rcols[j] = acc
        else:
            rcols[j] = {}
        if track_v:
            vcols[j] = {i: v for i, v in vacc.items() if v}
        else:
            vcols[j] = {}
    R = _pack(rcols) if track_r else None
    V = _pack(vcols) if track_v else None
    return lows, R, V


def sparse_rank_int(nrows, indptr, indices, data, skip=None):
    # Python integers never overflow, so this never returns None.
    ncols = len(indptr) - 1
    lows = np.full(ncols, -1, dtype=np.int64)
    row_piv = {}
    rcols = {}
    for j, (idx, val) in enumerate(_columns(indptr, indices, data)):
        if skip is not None and skip[j]:
            lows[j] = -2
            continue
        acc = {}
        for i, v in zip(idx, val):
            acc[i] = acc.get(i, 0) + v
        heap = [-i for i in acc]
        heapq.heapify(heap)
        low = _low(acc, heap)
        while low >= 0 and low in row_piv:
            rk = rcols[row_piv[low]]
            piv, cv = rk[low], acc[low]
            g = gcd(piv, cv)
            a, b = piv // g, cv // g
            if a != 1:
                for i in acc:
                    acc[i] *= a
            for i, v in rk.items():
                if i not in acc:
                    heapq.heappush(heap, -i)
                acc[i] = acc.get(i, 0) - b * v
            low = _low(acc, heap)
        lows[j] = low
        if low >= 0:
            row_piv[low] = j
            col = {i: v for i, v in acc.items() if v}
            cont = 0
            for v in col.values():
                cont = gcd(cont, v)
            if cont > 1:
                col = {i: v // cont for i, v in col.items()}
            rcols[j] = col
    return lows


def dense_rref_modp(a, p):
    """In-place RREF mod ``p`` of a 2-D int64 array (or list of lists)."""
    rows = [list(map(int, r)) for r in a]
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    r = 0
    pivots = []
    for c in range(nc):
        if r >= nr:
            break
        i = r
        while i < nr and rows[i][c] == 0:
            i += 1
        if i == nr:
            continue
        rows[i], rows[r] = rows[r], rows[i]
        inv = pow(rows[r][c], -1, p)
        pr = rows[r] = [x * inv % p for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c]:
                f = rows[i][c]
                ri = rows[i]
                rows[i] = [(x - f * y) % p for x, y in zip(ri, pr)]
        pivots.append(c)
        r += 1
    for i in range(nr):
        for k in range(nc):
            a[i][k] = rows[i][k]
    return pivots
