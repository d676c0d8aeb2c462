# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pixel kernels.

Bit-for-bit equivalent to ``py_kernels``; this module only exists to make
the hot per-pixel loops (thinning fixpoint, ridge tracing, dangling-end
repair, window filters) fast.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()

# 8-neighborhood ring, clockwise from the top-left corner
cdef int RING_I[8]
cdef int RING_J[8]
RING_I[0] = -1; RING_J[0] = -1
RING_I[1] = -1; RING_J[1] = 0
RING_I[2] = -1; RING_J[2] = 1
RING_I[3] = 0;  RING_J[3] = 1
RING_I[4] = 1;  RING_J[4] = 1
RING_I[5] = 1;  RING_J[5] = 0
RING_I[6] = 1;  RING_J[6] = -1
RING_I[7] = 0;  RING_J[7] = -1


def crossing_number_map(skel):
    cdef cnp.uint8_t[:, ::1] s = np.ascontiguousarray(skel, dtype=np.uint8)
    cdef Py_ssize_t h = s.shape[0], w = s.shape[1]
    out_arr = np.zeros((h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, ni, nj
    cdef int k, total, cur, nxt
    cdef int ring[9]
    for i in range(h):
        for j in range(w):
            if s[i, j] == 0:
                continue
            for k in range(8):
                ni = i + RING_I[k]
                nj = j + RING_J[k]
                if 0 <= ni < h and 0 <= nj < w:
                    ring[k] = s[ni, nj]
                else:
                    ring[k] = 0
            ring[8] = ring[0]
            total = 0
            for k in range(8):
                cur = ring[k]
                nxt = ring[k + 1]
                total += nxt - cur if nxt >= cur else cur - nxt
            out[i, j] = <cnp.uint8_t>(total // 2)
    return out_arr


cdef inline int _nb(cnp.uint8_t[:, ::1] p, Py_ssize_t i, Py_ssize_t j, int which) nogil:
    # neighbor planes x1..x8 on a 1-padded image: east first,
    # counter-clockwise with y up (row-down order E, SE, S, SW, W, NW, N, NE)
    if which == 1:
        return p[i, j + 1]
    elif which == 2:
        return p[i + 1, j + 1]
    elif which == 3:
        return p[i + 1, j]
    elif which == 4:
        return p[i + 1, j - 1]
    elif which == 5:
        return p[i, j - 1]
    elif which == 6:
        return p[i - 1, j - 1]
    elif which == 7:
        return p[i - 1, j]
    else:
        return p[i - 1, j + 1]


def thin_baseline(img):
    """Two-subiteration parallel thinning to a fixpoint: the first
    subiteration deletes under G1, G2, G3, the second under G1, G2, G3'."""
    arr = (np.asarray(img) != 0).astype(np.uint8)
    padded = np.pad(arr, 1)
    cdef cnp.uint8_t[:, ::1] p = padded
    kill_arr = np.zeros_like(padded)
    cdef cnp.uint8_t[:, ::1] kill = kill_arr
    cdef Py_ssize_t h = arr.shape[0], w = arr.shape[1]
    cdef Py_ssize_t i, j
    cdef int phase, changed, any_change
    cdef int x1, x2, x3, x4, x5, x6, x7, x8
    cdef int b, n1, n2, nmin, g3

    changed = 1
    while changed:
        changed = 0
        for phase in range(2):
            any_change = 0
            for i in range(1, h + 1):
                for j in range(1, w + 1):
                    kill[i, j] = 0
                    if p[i, j] == 0:
                        continue
                    x1 = _nb(p, i, j, 1); x2 = _nb(p, i, j, 2)
                    x3 = _nb(p, i, j, 3); x4 = _nb(p, i, j, 4)
                    x5 = _nb(p, i, j, 5); x6 = _nb(p, i, j, 6)
                    x7 = _nb(p, i, j, 7); x8 = _nb(p, i, j, 8)
                    b = 0
                    if x1 == 0 and (x2 or x3):
                        b += 1
                    if x3 == 0 and (x4 or x5):
                        b += 1
                    if x5 == 0 and (x6 or x7):
                        b += 1
                    if x7 == 0 and (x8 or x1):
                        b += 1
                    if b != 1:
                        continue
                    n1 = (x1 | x2) + (x3 | x4) + (x5 | x6) + (x7 | x8)
                    n2 = (x2 | x3) + (x4 | x5) + (x6 | x7) + (x8 | x1)
                    nmin = n1 if n1 < n2 else n2
                    if nmin < 2 or nmin > 3:
                        continue
                    if phase == 0:
                        g3 = (x2 | x3 | (1 - x8)) & x1
                    else:
                        g3 = (x6 | x7 | (1 - x4)) & x5
                    if g3 != 0:
                        continue
                    kill[i, j] = 1
                    any_change = 1
            if any_change:
                changed = 1
                for i in range(1, h + 1):
                    for j in range(1, w + 1):
                        if kill[i, j]:
                            p[i, j] = 0
    return padded[1 : h + 1, 1 : w + 1].copy()


def mark_col_minima(gray, out, Py_ssize_t r0, Py_ssize_t r1, Py_ssize_t c0, Py_ssize_t c1):
    cdef cnp.uint8_t[:, ::1] g = np.ascontiguousarray(gray, dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] o = out
    cdef Py_ssize_t h = g.shape[0]
    cdef Py_ssize_t hi = r1 if r1 < h - 2 else h - 2
    cdef Py_ssize_t i, j
    for j in range(c0, c1):
        for i in range(r0, hi):
            if g[i, j] > g[i + 1, j] and g[i + 1, j] < g[i + 2, j]:
                o[i + 1, j] = 1


def mark_row_minima(gray, out, Py_ssize_t r0, Py_ssize_t r1, Py_ssize_t c0, Py_ssize_t c1):
    cdef cnp.uint8_t[:, ::1] g = np.ascontiguousarray(gray, dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] o = out
    cdef Py_ssize_t w = g.shape[1]
    cdef Py_ssize_t hi = c1 if c1 < w - 2 else w - 2
    cdef Py_ssize_t i, j
    for i in range(r0, r1):
        for j in range(c0, hi):
            if g[i, j] > g[i, j + 1] and g[i, j + 1] < g[i, j + 2]:
                o[i, j + 1] = 1


cdef inline int _sum3(cnp.uint8_t[:, ::1] s, Py_ssize_t i, Py_ssize_t j) nogil:
    return (
        s[i - 1, j - 1] + s[i - 1, j] + s[i - 1, j + 1]
        + s[i, j - 1] + s[i, j] + s[i, j + 1]
        + s[i + 1, j - 1] + s[i + 1, j] + s[i + 1, j + 1]
    )


def repair_dangling(skel, gray):
    cdef cnp.uint8_t[:, ::1] s = skel
    cdef cnp.uint8_t[:, ::1] g = np.ascontiguousarray(gray, dtype=np.uint8)
    cdef Py_ssize_t h = s.shape[0], w = s.shape[1]
    cdef Py_ssize_t i, j, bi, bj
    cdef int di, dj, best, v, added
    added = 0
    for i in range(3, h - 3):
        for j in range(3, w - 3):
            if s[i, j] != 1:
                continue
            if _sum3(s, i, j) != 2:
                continue
            best = 256
            bi = bj = -1
            for dj in range(-1, 2):        # column-major tie-break order
                for di in range(-1, 2):
                    if di == 0 and dj == 0:
                        continue
                    v = g[i + di, j + dj]
                    if v < best:
                        best = v
                        bi = i + di
                        bj = j + dj
            if s[bi, bj] != 0:
                continue
            if _sum3(s, bi, bj) < 3:
                continue
            s[bi, bj] = 1
            added += 1
            if s[bi, bj - 1] == 1 and s[bi, bj - 2] == 0:
                s[bi, bj - 1] = 0
            elif s[bi, bj + 1] == 1 and s[bi, bj + 2] == 0:
                s[bi, bj + 1] = 0
    return added


cdef int _trace(cnp.uint8_t[:, ::1] s, Py_ssize_t h, Py_ssize_t w,
                Py_ssize_t i, Py_ssize_t j, int newval,
                Py_ssize_t[::1] vis_i, Py_ssize_t[::1] vis_j):
    cdef int length = 0, v = -1, kb = -1, k
    cdef Py_ssize_t ni, nj, nvis = 0, t
    if s[i, j] == 0:
        return 0
    s[i, j] = 2
    vis_i[nvis] = i
    vis_j[nvis] = j
    nvis += 1
    while v != 0 and v != 2:
        if s[i, j] != 2:
            s[i, j] = 2
            vis_i[nvis] = i
            vis_j[nvis] = j
            nvis += 1
        kb = -1
        v = 0
        for k in range(8):
            ni = i + RING_I[k]
            nj = j + RING_J[k]
            if 0 <= ni < h and 0 <= nj < w and s[ni, nj] == 1:
                v += 1
                kb = k
        length += v
        if kb < 0:
            break
        i += RING_I[kb]
        j += RING_J[kb]
    for t in range(nvis):
        s[vis_i[t], vis_j[t]] = <cnp.uint8_t>newval
    if kb >= 0:
        s[i - RING_I[kb], j - RING_J[kb]] = 1
    return length


def remove_short_ridges(skel, term_mask, int min_len):
    cdef cnp.uint8_t[:, ::1] s = skel
    cdef cnp.uint8_t[:, ::1] tm = np.ascontiguousarray(term_mask, dtype=np.uint8)
    cdef Py_ssize_t h = s.shape[0], w = s.shape[1]
    scratch_i = np.empty(h * w + 8, dtype=np.intp)
    scratch_j = np.empty(h * w + 8, dtype=np.intp)
    cdef Py_ssize_t[::1] vis_i = scratch_i
    cdef Py_ssize_t[::1] vis_j = scratch_j
    cdef Py_ssize_t i, j
    cdef int erased = 0, length
    for i in range(h):
        for j in range(w):
            if tm[i, j] == 0:
                continue
            length = _trace(s, h, w, i, j, 1, vis_i, vis_j)
            if length < min_len:
                _trace(s, h, w, i, j, 0, vis_i, vis_j)
                erased += 1
    return erased


def trimmed_mean_filter(img, int ksize, int trim):
    if ksize % 2 != 1:
        raise ValueError("kernel size must be odd")
    if 2 * trim >= ksize * ksize:
        raise ValueError("trim removes every sample")
    cdef int half = ksize // 2
    padded = np.pad(np.asarray(img, dtype=np.float64), half, mode="reflect")
    cdef double[:, ::1] p = padded
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    out_arr = np.empty((h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef int a, b, n = ksize * ksize, kept = ksize * ksize - 2 * trim
    cdef double window[2401]
    cdef double key, total, mean
    if n > 2401:
        raise ValueError("kernel size too large")
    for i in range(h):
        for j in range(w):
            for b in range(n):
                window[b] = p[i + b // ksize, j + b % ksize]
            # insertion sort: windows are tiny
            for a in range(1, n):
                key = window[a]
                b = a - 1
                while b >= 0 and window[b] > key:
                    window[b + 1] = window[b]
                    b -= 1
                window[b + 1] = key
            total = 0.0
            for b in range(trim, n - trim):
                total += window[b]
            mean = floor(total / kept + 0.5)
            if mean < 0:
                mean = 0
            elif mean > 255:
                mean = 255
            out[i, j] = <cnp.uint8_t>mean
    return out_arr
