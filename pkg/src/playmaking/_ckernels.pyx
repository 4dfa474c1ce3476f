# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled interval kernels; same contract as ``_pykernels``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef Py_ssize_t _lower_bound(const long long[:] a, long long x) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = a.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def sweep_membership(starts, ends, cols, Py_ssize_t n_cols, long long game_end):
    cdef const long long[:] s = np.ascontiguousarray(starts, dtype=np.int64)
    cdef const long long[:] e = np.ascontiguousarray(ends, dtype=np.int64)
    cdef const long long[:] c = np.ascontiguousarray(cols, dtype=np.int64)
    if game_end <= 0:
        return np.zeros(1, dtype=np.int64), np.zeros((0, n_cols), dtype=np.uint8)
    bounds_arr = np.unique(np.concatenate(([0, game_end], s, e)).astype(np.int64))
    cdef const long long[:] b = bounds_arr
    cdef Py_ssize_t n_seg = b.shape[0] - 1
    member_arr = np.zeros((n_seg, n_cols), dtype=np.uint8)
    cdef unsigned char[:, :] m = member_arr
    cdef Py_ssize_t i, k, lo, hi, col
    with nogil:
        for i in range(s.shape[0]):
            lo = _lower_bound(b, s[i])
            hi = _lower_bound(b, e[i])
            col = c[i]
            for k in range(lo, hi):
                m[k, col] += 1
    return bounds_arr, member_arr


def cooccurrence(member, weights):
    cdef const unsigned char[:, :] m = np.ascontiguousarray(member, dtype=np.uint8)
    cdef const long long[:] w = np.ascontiguousarray(weights, dtype=np.int64)
    cdef Py_ssize_t n_rows = m.shape[0], n_cols = m.shape[1]
    out_arr = np.zeros((n_cols, n_cols), dtype=np.int64)
    cdef long long[:, :] out = out_arr
    cdef Py_ssize_t[64] on_small
    cdef Py_ssize_t r, j, a, bb, n_on
    cdef long long wr
    with nogil:
        for r in range(n_rows):
            wr = w[r]
            if wr == 0:
                continue
            n_on = 0
            for j in range(n_cols):
                if m[r, j]:
                    if n_on < 64:
                        on_small[n_on] = j
                    n_on += 1
            if n_on <= 64:
                for a in range(n_on):
                    for bb in range(n_on):
                        out[on_small[a], on_small[bb]] += wr * m[r, on_small[a]] * m[r, on_small[bb]]
            else:
                for a in range(n_cols):
                    if m[r, a]:
                        for bb in range(n_cols):
                            out[a, bb] += wr * m[r, a] * m[r, bb]
    return out_arr
