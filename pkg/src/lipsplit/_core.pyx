# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch engine: candidate heap and split bookkeeping in C.

The objective stays a Python callable; everything else (heap, per-depth edge
tables, center arithmetic, trace columns) runs in C.  Arithmetic mirrors the
pure-Python engine operation for operation, and the extension is compiled
with FP contraction off, so both engines emit bit-identical traces.
"""

from libc.math cimport NAN, isfinite, isnan, pow, sqrt
from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memcpy

from cpython.ref cimport Py_INCREF
from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM

import numpy as np

from .errors import QueueExhausted


cdef struct Tables:
    # Per-depth split data; all boxes at one depth share an edge vector.
    double *edges   # (cap, n) row-major edge vectors
    double *norm    # (cap,) edge norms
    int *axis       # (cap,) split axis of a depth-d box
    double *half    # (cap,) center offset when splitting a depth-d box
    long cap
    long built      # depths 0..built-1 have split data; edge rows exist for 0..built


cdef struct Pool:
    # Candidate slots (struct of arrays) with a freelist.
    double *score
    int *depth
    long *seq
    double *ctr     # (cap, n) centers
    long cap
    long used
    long *freelist
    long nfree


cdef int tables_reserve(Tables *tb, long depth_needed, int n) except -1:
    cdef long newcap = tb.cap
    if depth_needed + 2 <= tb.cap:
        return 0
    while newcap < depth_needed + 2:
        newcap *= 2
    tb.edges = <double *> realloc(tb.edges, newcap * n * sizeof(double))
    tb.norm = <double *> realloc(tb.norm, newcap * sizeof(double))
    tb.axis = <int *> realloc(tb.axis, newcap * sizeof(int))
    tb.half = <double *> realloc(tb.half, newcap * sizeof(double))
    if tb.edges == NULL or tb.norm == NULL or tb.axis == NULL or tb.half == NULL:
        raise MemoryError()
    tb.cap = newcap
    return 0


cdef int tables_extend(Tables *tb, long depth, int n) except -1:
    # Ensure split data for depths 0..depth (and edge rows 0..depth+1).
    cdef long d
    cdef int i, ax
    cdef double best, z, s
    cdef double *row
    cdef double *child
    if depth < tb.built:
        return 0
    tables_reserve(tb, depth, n)
    for d in range(tb.built, depth + 1):
        row = tb.edges + d * n
        best = -1.0
        ax = 0
        for i in range(n):
            if row[i] > best:
                best = row[i]
                ax = i
        z = row[ax] * 0.5
        child = tb.edges + (d + 1) * n
        memcpy(child, row, n * sizeof(double))
        child[ax] = row[ax] - z
        s = 0.0
        for i in range(n):
            s += child[i] * child[i]
        tb.axis[d] = ax
        tb.half[d] = z
        tb.norm[d + 1] = sqrt(s)
        tb.built = d + 1
    return 0


cdef long pool_alloc(Pool *pl, int n) except -1:
    cdef long slot, newcap
    if pl.nfree > 0:
        pl.nfree -= 1
        return pl.freelist[pl.nfree]
    if pl.used == pl.cap:
        newcap = pl.cap * 2
        pl.score = <double *> realloc(pl.score, newcap * sizeof(double))
        pl.depth = <int *> realloc(pl.depth, newcap * sizeof(int))
        pl.seq = <long *> realloc(pl.seq, newcap * sizeof(long))
        pl.ctr = <double *> realloc(pl.ctr, newcap * n * sizeof(double))
        pl.freelist = <long *> realloc(pl.freelist, newcap * sizeof(long))
        if (pl.score == NULL or pl.depth == NULL or pl.seq == NULL
                or pl.ctr == NULL or pl.freelist == NULL):
            raise MemoryError()
        pl.cap = newcap
    slot = pl.used
    pl.used += 1
    return slot


cdef inline void pool_free(Pool *pl, long slot) noexcept:
    pl.freelist[pl.nfree] = slot
    pl.nfree += 1


cdef inline bint heap_less(Pool *pl, long a, long b) noexcept:
    # score asc, then depth asc (larger boxes first), then seq asc.
    if pl.score[a] != pl.score[b]:
        return pl.score[a] < pl.score[b]
    if pl.depth[a] != pl.depth[b]:
        return pl.depth[a] < pl.depth[b]
    return pl.seq[a] < pl.seq[b]


cdef void heap_sift_up(long *heap, Pool *pl, long pos) noexcept:
    cdef long item = heap[pos]
    cdef long parent
    while pos > 0:
        parent = (pos - 1) >> 1
        if heap_less(pl, item, heap[parent]):
            heap[pos] = heap[parent]
            pos = parent
        else:
            break
    heap[pos] = item


cdef void heap_sift_down(long *heap, Pool *pl, long size, long pos) noexcept:
    cdef long item = heap[pos]
    cdef long child
    while True:
        child = 2 * pos + 1
        if child >= size:
            break
        if child + 1 < size and heap_less(pl, heap[child + 1], heap[child]):
            child += 1
        if heap_less(pl, heap[child], item):
            heap[pos] = heap[child]
            pos = child
        else:
            break
    heap[pos] = item


cdef inline tuple make_point(double *coords, int n):
    cdef tuple t = PyTuple_New(n)
    cdef int i
    cdef object v
    for i in range(n):
        v = coords[i]
        Py_INCREF(v)
        PyTuple_SET_ITEM(t, i, v)
    return t


def run_loop(object objective, int n, double L, long T, bint prune, double gap_tol):
    """Run the query loop; returns the trace columns and the completed count."""
    cdef bint use_gap = not isnan(gap_tol)
    cdef object pth_arr = np.empty((T, n))
    cdef object pom_arr = np.empty((T, n))
    cdef object vals_arr = np.empty(T)
    cdef object ncol_arr = np.empty(T)
    cdef object scol_arr = np.empty(T)
    cdef double[:, ::1] pth = pth_arr
    cdef double[:, ::1] pom = pom_arr
    cdef double[::1] vals = vals_arr
    cdef double[::1] ncol = ncol_arr
    cdef double[::1] scol = scol_arr

    cdef Tables tb
    cdef Pool pl
    cdef long *heap = NULL
    cdef long heap_cap = 1024
    cdef long heap_size = 0
    cdef double *cbuf = NULL
    cdef double *omega = NULL

    cdef long done = 1, t, seq = 1, slot, kept, k, child_seq
    cdef int i, ax, d
    cdef double theta, val, best, score, z, x
    cdef bint improved
    cdef object pt, ret

    tb.cap = 64
    tb.built = 0
    tb.edges = <double *> malloc(tb.cap * n * sizeof(double))
    tb.norm = <double *> malloc(tb.cap * sizeof(double))
    tb.axis = <int *> malloc(tb.cap * sizeof(int))
    tb.half = <double *> malloc(tb.cap * sizeof(double))

    pl.cap = 1024
    pl.used = 0
    pl.nfree = 0
    pl.score = <double *> malloc(pl.cap * sizeof(double))
    pl.depth = <int *> malloc(pl.cap * sizeof(int))
    pl.seq = <long *> malloc(pl.cap * sizeof(long))
    pl.ctr = <double *> malloc(pl.cap * n * sizeof(double))
    pl.freelist = <long *> malloc(pl.cap * sizeof(long))

    heap = <long *> malloc(heap_cap * sizeof(long))
    cbuf = <double *> malloc(n * sizeof(double))
    omega = <double *> malloc(n * sizeof(double))

    try:
        if (tb.edges == NULL or tb.norm == NULL or tb.axis == NULL or tb.half == NULL
                or pl.score == NULL or pl.depth == NULL or pl.seq == NULL
                or pl.ctr == NULL or pl.freelist == NULL or heap == NULL
                or cbuf == NULL or omega == NULL):
            raise MemoryError()

        theta = pow(2.0, 1.0 / n)
        for i in range(n):
            cbuf[i] = pow(theta, -(i + 1.0))
            tb.edges[i] = cbuf[i]
        z = 0.0
        for i in range(n):
            z += tb.edges[i] * tb.edges[i]
        tb.norm[0] = sqrt(z)

        # t = 1: evaluate the root center.
        for i in range(n):
            x = cbuf[i]
            if x > 1.0:
                x = 1.0
            if x < 0.0:
                x = 0.0
            omega[i] = x
        pt = make_point(omega, n)
        ret = objective(pt)
        val = ret
        if not isfinite(val):
            raise ValueError(f"objective returned non-finite value {val}")
        for i in range(n):
            pth[0, i] = cbuf[i]
            pom[0, i] = omega[i]
        vals[0] = val
        ncol[0] = tb.norm[0]
        scol[0] = NAN
        best = val

        # Children of the root (minus side first, matching Python insertion order).
        d = 0
        while True:
            tables_extend(&tb, d, n)
            score = val - L * tb.norm[d]
            ax = tb.axis[d]
            z = tb.half[d]
            for k in range(2):
                child_seq = seq
                seq += 1
                if prune and score >= best:
                    continue
                slot = pool_alloc(&pl, n)
                memcpy(pl.ctr + slot * n, cbuf, n * sizeof(double))
                if k == 0:
                    pl.ctr[slot * n + ax] = cbuf[ax] - z
                else:
                    pl.ctr[slot * n + ax] = cbuf[ax] + z
                pl.score[slot] = score
                pl.depth[slot] = d + 1
                pl.seq[slot] = child_seq
                if heap_size == heap_cap:
                    heap_cap *= 2
                    heap = <long *> realloc(heap, heap_cap * sizeof(long))
                    if heap == NULL:
                        raise MemoryError()
                heap[heap_size] = slot
                heap_size += 1
                heap_sift_up(heap, &pl, heap_size - 1)
            if done >= T:
                break

            # Next step: optional gap stop, then pop the lowest-score candidate.
            if use_gap and heap_size > 0 and best - pl.score[heap[0]] <= gap_tol:
                break
            if heap_size == 0:
                raise QueueExhausted(
                    f"candidate queue exhausted after {done} queries: "
                    "best value is certified optimal"
                )
            slot = heap[0]
            heap_size -= 1
            if heap_size > 0:
                heap[0] = heap[heap_size]
                heap_sift_down(heap, &pl, heap_size, 0)
            t = done  # 0-based row index of this record
            score = pl.score[slot]
            d = pl.depth[slot]
            memcpy(cbuf, pl.ctr + slot * n, n * sizeof(double))
            pool_free(&pl, slot)

            for i in range(n):
                x = cbuf[i]
                if x > 1.0:
                    x = 1.0
                if x < 0.0:
                    x = 0.0
                omega[i] = x
            pt = make_point(omega, n)
            ret = objective(pt)
            val = ret
            if not isfinite(val):
                raise ValueError(f"objective returned non-finite value {val}")
            for i in range(n):
                pth[t, i] = cbuf[i]
                pom[t, i] = omega[i]
            vals[t] = val
            ncol[t] = tb.norm[d]
            scol[t] = score
            improved = val < best
            if improved:
                best = val
            done = t + 1
            # Loop back to push this candidate's children, then prune if needed.
            if prune and improved:
                kept = 0
                for k in range(heap_size):
                    if pl.score[heap[k]] < best:
                        heap[kept] = heap[k]
                        kept += 1
                    else:
                        pool_free(&pl, heap[k])
                heap_size = kept
                k = (heap_size >> 1) - 1
                while k >= 0:
                    heap_sift_down(heap, &pl, heap_size, k)
                    k -= 1

        return pth_arr, pom_arr, vals_arr, ncol_arr, scol_arr, done
    finally:
        free(tb.edges)
        free(tb.norm)
        free(tb.axis)
        free(tb.half)
        free(pl.score)
        free(pl.depth)
        free(pl.seq)
        free(pl.ctr)
        free(pl.freelist)
        free(heap)
        free(cbuf)
        free(omega)
