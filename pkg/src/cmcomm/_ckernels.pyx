# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled closure kernels; see ``_pykernels`` for the reference versions."""

from libc.stdlib cimport calloc, free, malloc, realloc
from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t
from libcpp.unordered_set cimport unordered_set

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef struct Store:
    int32_t *rows
    int64_t count
    int64_t cap
    int width


cdef int store_push(Store *st, int32_t *row) except -1:
    cdef int64_t newcap
    cdef int32_t *grown
    cdef int c
    if st.count == st.cap:
        newcap = st.cap * 2 if st.cap else 1024
        grown = <int32_t *> realloc(st.rows, newcap * st.width * sizeof(int32_t))
        if grown == NULL:
            raise MemoryError()
        st.rows = grown
        st.cap = newcap
    for c in range(st.width):
        st.rows[st.count * st.width + c] = row[c]
    st.count += 1
    return 0


def closure_rows(list ops, int n, int width, gens, int64_t target=0, uint64_t bitmap_limit=(1 << 28)):
    """Subuniverse of ``A^width`` generated by the rows of ``gens``.

    ``ops`` is a list of ``(arity, table)`` with row-major int64 tables. Rows
    are packed as ``sum(row[c] * n**c)``; the caller guarantees this fits in
    63 bits. Stops early once ``target`` rows are known (``target <= 0``
    disables that). Returns the rows in discovery order.
    """
    cdef cnp.int64_t[:, :] g = np.ascontiguousarray(gens, dtype=np.int64)
    cdef int nops = len(ops)
    cdef int i, c, q, r, pos, oi
    cdef int64_t p, idx, packed, j
    cdef uint64_t ambient = 1
    for c in range(width):
        ambient *= <uint64_t> n
    cdef bint use_bitmap = ambient <= bitmap_limit
    cdef uint8_t *bitmap = NULL
    cdef unordered_set[uint64_t] seen
    cdef int64_t *pw = <int64_t *> malloc(width * sizeof(int64_t))
    cdef int32_t *out = <int32_t *> malloc(width * sizeof(int32_t))
    cdef int *arity = <int *> malloc(max(nops, 1) * sizeof(int))
    cdef int64_t **tables = <int64_t **> malloc(max(nops, 1) * sizeof(int64_t *))
    cdef int64_t t[64]
    cdef int64_t hi[64]
    cdef Store st
    cdef bint finished = False
    cdef bint carry
    keep = []
    st.rows = NULL
    st.count = 0
    st.cap = 0
    st.width = width
    try:
        pw[0] = 1
        for c in range(1, width):
            pw[c] = pw[c - 1] * n
        for oi in range(nops):
            arr = np.ascontiguousarray(ops[oi][1], dtype=np.int64)
            keep.append(arr)
            arity[oi] = ops[oi][0]
            if arity[oi] > 64:
                raise ValueError("arity above 64 not supported")
            tables[oi] = <int64_t *> cnp.PyArray_DATA(arr)
        if use_bitmap:
            bitmap = <uint8_t *> calloc(ambient // 8 + 1, 1)
            if bitmap == NULL:
                raise MemoryError()
        for j in range(g.shape[0]):
            packed = 0
            for c in range(width):
                out[c] = <int32_t> g[j, c]
                packed += g[j, c] * pw[c]
            if use_bitmap:
                if bitmap[packed >> 3] & (1 << (packed & 7)):
                    continue
                bitmap[packed >> 3] |= (1 << (packed & 7))
            else:
                if seen.count(<uint64_t> packed):
                    continue
                seen.insert(<uint64_t> packed)
            store_push(&st, out)
            if target > 0 and st.count >= target:
                finished = True
                break
        p = 0
        while not finished and p < st.count:
            for oi in range(nops):
                r = arity[oi]
                if r == 0:
                    continue
                for q in range(r):
                    if q > 0 and p == 0:
                        continue
                    # odometer over positions != q; before q: 0..p-1, after q: 0..p
                    for pos in range(r):
                        t[pos] = 0
                        hi[pos] = p if pos < q else p + 1
                    t[q] = p
                    hi[q] = p + 1
                    while True:
                        packed = 0
                        for c in range(width):
                            idx = 0
                            for pos in range(r):
                                idx = idx * n + st.rows[t[pos] * width + c]
                            out[c] = <int32_t> tables[oi][idx]
                            packed += out[c] * pw[c]
                        if use_bitmap:
                            if not (bitmap[packed >> 3] & (1 << (packed & 7))):
                                bitmap[packed >> 3] |= (1 << (packed & 7))
                                store_push(&st, out)
                                if target > 0 and st.count >= target:
                                    finished = True
                                    break
                        else:
                            if not seen.count(<uint64_t> packed):
                                seen.insert(<uint64_t> packed)
                                store_push(&st, out)
                                if target > 0 and st.count >= target:
                                    finished = True
                                    break
                        carry = True
                        pos = r - 1
                        while pos >= 0 and carry:
                            if pos == q:
                                pos -= 1
                                continue
                            t[pos] += 1
                            if t[pos] < hi[pos]:
                                carry = False
                            else:
                                t[pos] = 0
                                pos -= 1
                        if carry:
                            break
                    if finished:
                        break
                if finished:
                    break
            p += 1
        result = np.empty((st.count, width), dtype=np.int64)
        for j in range(st.count):
            for c in range(width):
                result[j, c] = st.rows[j * width + c]
        return result
    finally:
        free(st.rows)
        free(bitmap)
        free(pw)
        free(out)
        free(arity)
        free(tables)


def count_edge_consistent(reps, int n, int k):
    """Number of maps ``2^k -> A`` whose ``j``-edges stay inside ``reps[j]``'s blocks.

    Depth-first over vertices in index order; each vertex is checked against
    its lower neighbours, which are already assigned.
    """
    cdef cnp.int64_t[:, :] R = np.ascontiguousarray(reps, dtype=np.int64)
    cdef int w = 1 << k
    cdef int64_t *val = <int64_t *> malloc(w * sizeof(int64_t))
    cdef int v, j, lo
    cdef int64_t total = 0
    cdef bint ok
    try:
        for v in range(w):
            val[v] = -1
        v = 0
        while v >= 0:
            val[v] += 1
            if val[v] >= n:
                val[v] = -1
                v -= 1
                continue
            ok = True
            for j in range(k):
                if v & (1 << j):
                    lo = v ^ (1 << j)
                    if R[j, val[lo]] != R[j, val[v]]:
                        ok = False
                        break
            if not ok:
                continue
            if v == w - 1:
                total += 1
            else:
                v += 1
        return total
    finally:
        free(val)


def group_closure_rows(mul, int n, int width, gens, int64_t target=0, uint64_t bitmap_limit=(1 << 28)):
    """Subgroup of ``G^width`` generated by the rows of ``gens``.

    ``mul`` is the row-major table of a finite group operation. In a finite
    group the generated subgroup is the set of products of generators, so
    every known row is only multiplied on the right by each generator.
    """
    cdef cnp.int64_t[:] tab = np.ascontiguousarray(mul, dtype=np.int64)
    cdef cnp.int64_t[:, :] g = np.ascontiguousarray(gens, dtype=np.int64)
    cdef int64_t ngens = g.shape[0]
    cdef int64_t p, j, packed
    cdef int c
    cdef uint64_t ambient = 1
    for c in range(width):
        ambient *= <uint64_t> n
    cdef bint use_bitmap = ambient <= bitmap_limit
    cdef uint8_t *bitmap = NULL
    cdef unordered_set[uint64_t] seen
    cdef int64_t *pw = <int64_t *> malloc(width * sizeof(int64_t))
    cdef int32_t *out = <int32_t *> malloc(width * sizeof(int32_t))
    cdef Store st
    cdef bint finished = False
    cdef bint fresh
    st.rows = NULL
    st.count = 0
    st.cap = 0
    st.width = width
    try:
        pw[0] = 1
        for c in range(1, width):
            pw[c] = pw[c - 1] * n
        if use_bitmap:
            bitmap = <uint8_t *> calloc(ambient // 8 + 1, 1)
            if bitmap == NULL:
                raise MemoryError()
        p = -1
        while not finished and p < st.count:
            for j in range(ngens):
                packed = 0
                for c in range(width):
                    if p < 0:
                        out[c] = <int32_t> g[j, c]
                    else:
                        out[c] = <int32_t> tab[st.rows[p * width + c] * n + g[j, c]]
                    packed += out[c] * pw[c]
                if use_bitmap:
                    fresh = not (bitmap[packed >> 3] & (1 << (packed & 7)))
                    if fresh:
                        bitmap[packed >> 3] |= (1 << (packed & 7))
                else:
                    fresh = not seen.count(<uint64_t> packed)
                    if fresh:
                        seen.insert(<uint64_t> packed)
                if fresh:
                    store_push(&st, out)
                    if target > 0 and st.count >= target:
                        finished = True
                        break
            p += 1
        result = np.empty((st.count, width), dtype=np.int64)
        for j in range(st.count):
            for c in range(width):
                result[j, c] = st.rows[j * width + c]
        return result
    finally:
        free(st.rows)
        free(bitmap)
        free(pw)
        free(out)
