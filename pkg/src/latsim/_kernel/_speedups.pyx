# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled trial kernel.

Mirrors ``python.run_trial`` exactly: same splitmix64 stream arithmetic,
same draw protocol, same frontier bookkeeping.  Any semantic change must
land in both files; the parity test suite compares full walks.
"""

import numpy as np

cimport numpy as cnp
from libc.string cimport memmove

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.int8_t i8
ctypedef unsigned long long u64

cdef double JUMP_PROB = 0.15
cdef double INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53

TERM_REACHED_DC = 0
TERM_FRONTIER_EXHAUSTED = 1
TERM_ALL_TRIED = 2


cdef inline u64 _mix(u64 z) nogil:
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline u64 _next_u64(u64* state) nogil:
    state[0] = state[0] + <u64>0x9E3779B97F4A7C15
    return _mix(state[0])


cdef inline double _random(u64* state) nogil:
    return <double>(_next_u64(state) >> 11) * INV_2_53


cdef inline u64 _randrange(u64* state, u64 n) nogil:
    # Unbiased bounded draw: reject below 2**64 mod n, then reduce.
    cdef u64 threshold = (<u64>0 - n) % n
    cdef u64 x
    while True:
        x = _next_u64(state)
        if x >= threshold:
            return x % n


cdef inline long _sorted_index(const i64* arr, long size, i64 v) nogil:
    """Position of v in a sorted array, or -1."""
    cdef long lo = 0, hi = size, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    if lo < size and arr[lo] == v:
        return lo
    return -1


cdef inline long _insert_sorted(i64* arr, long size, i64 v) nogil:
    """Insert v into a sorted array (caller guarantees capacity and absence)."""
    cdef long lo = 0, hi = size, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    memmove(arr + lo + 1, arr + lo, (size - lo) * sizeof(i64))
    arr[lo] = v
    return size + 1


def run_trial(
    const i64[::1] out_indptr,
    const i64[::1] out_indices,
    const i8[::1] levels,
    long dc,
    const i64[::1] start_nodes,
    int weighted,
    const double[::1] weights,
    object state,
    long start=-1,
):
    """Compiled counterpart of ``python.run_trial`` (same signature)."""
    cdef long n = out_indptr.shape[0] - 1
    cdef long n_start = start_nodes.shape[0]
    cdef u64 st = <u64>state

    if start < 0:
        if n_start == 0:
            raise ValueError("randrange() bound must be positive")
        start = <long>start_nodes[_randrange(&st, <u64>n_start)]

    cdef cnp.ndarray[i64, ndim=1] frontier_arr = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] path_arr = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] tried_arr = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] in_frontier = np.zeros(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] in_tried = np.zeros(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] in_visited = np.zeros(n, dtype=np.uint8)
    cdef i64* frontier = <i64*>frontier_arr.data
    cdef i64* path = <i64*>path_arr.data
    cdef i64* tried_list = <i64*>tried_arr.data
    cdef cnp.uint8_t* f_mask = <cnp.uint8_t*>in_frontier.data
    cdef cnp.uint8_t* t_mask = <cnp.uint8_t*>in_tried.data
    cdef cnp.uint8_t* v_mask = <cnp.uint8_t*>in_visited.data

    cdef long t_size = 0, n_tried = 0, path_len = 0
    cdef long collected = levels[start]
    # v is the last *accepted* node; cand the last drawn candidate.  A
    # rejected draw of dc must not end the walk.
    cdef long v = start, cand = -1, i, j, pos, n_avail, idx
    cdef i64 w
    cdef double x, total, target, acc
    cdef bint jump

    path[path_len] = start
    path_len += 1
    v_mask[start] = 1
    for i in range(out_indptr[start], out_indptr[start + 1]):
        w = out_indices[i]
        frontier[t_size] = w  # CSR rows ascending: stays sorted
        t_size += 1
        f_mask[w] = 1

    while v != dc and t_size > 0 and n_tried < t_size:
        x = _random(&st)
        n_avail = t_size - n_tried  # tried nodes are all in the frontier
        jump = (n_avail == 0) or (n_start > 0 and x < JUMP_PROB)
        if jump:
            cand = <long>start_nodes[_randrange(&st, <u64>n_start)]
        elif not weighted:
            idx = <long>_randrange(&st, <u64>n_avail)
            j = -1
            for i in range(t_size):
                if not t_mask[frontier[i]]:
                    j += 1
                    if j == idx:
                        cand = <long>frontier[i]
                        break
        else:
            total = 0.0
            for i in range(t_size):
                if not t_mask[frontier[i]]:
                    total += weights[frontier[i]]
            if total <= 0.0:
                idx = <long>_randrange(&st, <u64>n_avail)
                j = -1
                for i in range(t_size):
                    if not t_mask[frontier[i]]:
                        j += 1
                        if j == idx:
                            cand = <long>frontier[i]
                            break
            else:
                target = _random(&st) * total
                acc = 0.0
                cand = -1
                for i in range(t_size):
                    if not t_mask[frontier[i]]:
                        acc += weights[frontier[i]]
                        if target < acc:
                            cand = <long>frontier[i]
                            break
                if cand < 0:  # fp dust: fall back to the last available node
                    for i in range(t_size - 1, -1, -1):
                        if not t_mask[frontier[i]]:
                            cand = <long>frontier[i]
                            break

        if levels[cand] <= collected + 1 and not v_mask[cand]:
            for i in range(n_tried):
                t_mask[tried_list[i]] = 0
            n_tried = 0
            pos = _sorted_index(frontier, t_size, cand)
            if pos >= 0:
                memmove(frontier + pos, frontier + pos + 1,
                        (t_size - pos - 1) * sizeof(i64))
                t_size -= 1
                f_mask[cand] = 0
            for i in range(out_indptr[cand], out_indptr[cand + 1]):
                w = out_indices[i]
                if not f_mask[w]:
                    t_size = _insert_sorted(frontier, t_size, w)
                    f_mask[w] = 1
            path[path_len] = cand
            path_len += 1
            v_mask[cand] = 1
            if levels[cand] > collected:
                collected = levels[cand]
            v = cand
        else:
            if not t_mask[cand]:
                tried_list[n_tried] = cand
                t_mask[cand] = 1
                n_tried += 1
            if not f_mask[cand]:
                t_size = _insert_sorted(frontier, t_size, cand)
                f_mask[cand] = 1

    if v == dc:
        term = TERM_REACHED_DC
    elif t_size == 0:
        term = TERM_FRONTIER_EXHAUSTED
    else:
        term = TERM_ALL_TRIED
    return path_arr[:path_len].copy(), term
