"""NumPy/pure-Python implementations of the pixel kernels.

Same contracts as the compiled backend in ``_speedups.pyx``; selected at
import time when the extension is unavailable (or when the environment
variable ``MINUTIA_PURE_PYTHON`` is set).  The sequential kernels
(``repair_dangling``, ``remove_short_ridges``) use list-of-lists state so
the fallback stays usable on full-size scans.
"""

from __future__ import annotations

import numpy as np

# 8-neighborhood ring, clockwise from the top-left corner
_RING = ((-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1))


def crossing_number_map(skel: np.ndarray) -> np.ndarray:
    """Per-pixel crossing number of a binary skeleton.

    cn = half the sum of absolute differences between consecutive pixels
    of the ordered 8-neighborhood; neighbors outside the image read as 0.
    Non-skeleton pixels map to 0.
    """
    s = np.asarray(skel, dtype=np.int16)
    p = np.pad(s, 1)
    ring = [p[1 + di : 1 + di + s.shape[0], 1 + dj : 1 + dj + s.shape[1]] for di, dj in _RING]
    total = np.zeros(s.shape, dtype=np.int16)
    for k in range(8):
        total += np.abs(ring[(k + 1) % 8] - ring[k])
    cn = (total // 2).astype(np.uint8)
    cn[s == 0] = 0
    return cn


def _neighbors(padded: np.ndarray) -> dict:
    """Boolean neighbor planes x1..x8: east first, counter-clockwise with
    the y axis pointing up, which in row-down array order reads E, SE, S,
    SW, W, NW, N, NE."""
    h, w = padded.shape[0] - 2, padded.shape[1] - 2
    sl = lambda di, dj: padded[1 + di : 1 + di + h, 1 + dj : 1 + dj + w]
    return {
        1: sl(0, 1),    # E
        2: sl(1, 1),    # SE
        3: sl(1, 0),    # S
        4: sl(1, -1),   # SW
        5: sl(0, -1),   # W
        6: sl(-1, -1),  # NW
        7: sl(-1, 0),   # N
        8: sl(-1, 1),   # NE
    }


def thin_baseline(img: np.ndarray) -> np.ndarray:
    """Two-subiteration parallel thinning, iterated to a fixpoint.

    Each iteration runs two parallel subiterations over the image: the
    first deletes pixels satisfying G1, G2, G3, the second those
    satisfying G1, G2, G3'.  G1 requires a single 0-to-1 transition
    pattern around the pixel (connectivity is preserved), G2 bounds the
    neighbor count (endpoints survive), and G3/G3' restrict each pass to
    one side of the stroke so opposite boundaries are not deleted at once.
    """
    skel = np.asarray(img, dtype=bool).copy()

    while True:
        changed = False
        for phase in (0, 1):
            p = np.pad(skel, 1)
            x = _neighbors(p)
            b1 = ~x[1] & (x[2] | x[3])
            b2 = ~x[3] & (x[4] | x[5])
            b3 = ~x[5] & (x[6] | x[7])
            b4 = ~x[7] & (x[8] | x[1])
            g1 = (
                b1.astype(np.uint8)
                + b2.astype(np.uint8)
                + b3.astype(np.uint8)
                + b4.astype(np.uint8)
            ) == 1
            n1 = (
                (x[1] | x[2]).astype(np.uint8)
                + (x[3] | x[4]).astype(np.uint8)
                + (x[5] | x[6]).astype(np.uint8)
                + (x[7] | x[8]).astype(np.uint8)
            )
            n2 = (
                (x[2] | x[3]).astype(np.uint8)
                + (x[4] | x[5]).astype(np.uint8)
                + (x[6] | x[7]).astype(np.uint8)
                + (x[8] | x[1]).astype(np.uint8)
            )
            nmin = np.minimum(n1, n2)
            g2 = (nmin >= 2) & (nmin <= 3)
            if phase == 0:
                g3 = ~((x[2] | x[3] | ~x[8]) & x[1])
            else:
                g3 = ~((x[6] | x[7] | ~x[4]) & x[5])
            kill = skel & g1 & g2 & g3
            if kill.any():
                skel[kill] = False
                changed = True
        if not changed:
            break
    return skel.astype(np.uint8)


def mark_col_minima(gray: np.ndarray, out: np.ndarray, r0: int, r1: int, c0: int, c1: int) -> None:
    """Mark vertical gray-level local minima inside a run of rows.

    For i in [r0, min(r1, H-2)) and each column j in [c0, c1):
    out[i+1, j] = 1 when gray[i, j] > gray[i+1, j] < gray[i+2, j].
    The comparison may read up to two rows past the run (but inside the
    image), so a minimum sitting on the run boundary is still found.
    """
    h = gray.shape[0]
    hi = min(r1, h - 2)
    if hi <= r0:
        return
    g = gray.astype(np.int16)
    g0 = g[r0:hi, c0:c1]
    g1 = g[r0 + 1 : hi + 1, c0:c1]
    g2 = g[r0 + 2 : hi + 2, c0:c1]
    m = (g0 > g1) & (g1 < g2)
    out[r0 + 1 : hi + 1, c0:c1] |= m.astype(out.dtype)


def mark_row_minima(gray: np.ndarray, out: np.ndarray, r0: int, r1: int, c0: int, c1: int) -> None:
    """Horizontal counterpart of mark_col_minima (scan left to right)."""
    w = gray.shape[1]
    hi = min(c1, w - 2)
    if hi <= c0:
        return
    g = gray.astype(np.int16)
    g0 = g[r0:r1, c0:hi]
    g1 = g[r0:r1, c0 + 1 : hi + 1]
    g2 = g[r0:r1, c0 + 2 : hi + 2]
    m = (g0 > g1) & (g1 < g2)
    out[r0:r1, c0 + 1 : hi + 1] |= m.astype(out.dtype)


def repair_dangling(skel: np.ndarray, gray: np.ndarray) -> int:
    """Reconnect bifurcations separated from a dangling ridge end.

    Sequential raster scan (updates are visible to later pixels): for each
    skeleton pixel with exactly one skeleton neighbor, take the darkest of
    its 8 gray neighbors; if that spot is empty and already touches >= 3
    skeleton pixels it becomes part of the skeleton, and a redundant
    horizontal neighbor of the new pixel is cleared.  Pixels within 3 px of
    the border are left alone.  Returns the number of pixels added.
    Modifies ``skel`` in place.
    """
    h, w = skel.shape
    s = skel.tolist()
    g = gray.tolist()
    added = 0

    def sum3(mat, i, j):
        return (
            mat[i - 1][j - 1] + mat[i - 1][j] + mat[i - 1][j + 1]
            + mat[i][j - 1] + mat[i][j] + mat[i][j + 1]
            + mat[i + 1][j - 1] + mat[i + 1][j] + mat[i + 1][j + 1]
        )

    for i in range(3, h - 3):
        for j in range(3, w - 3):
            if s[i][j] != 1:
                continue
            if sum3(s, i, j) != 2:
                continue
            best = 256
            bi = bj = -1
            for dj in (-1, 0, 1):        # column-major, matching the
                for di in (-1, 0, 1):    # documented tie-break order
                    if di == 0 and dj == 0:
                        continue
                    v = g[i + di][j + dj]
                    if v < best:
                        best = v
                        bi, bj = i + di, j + dj
            if s[bi][bj] != 0:
                continue
            if sum3(s, bi, bj) < 3:
                continue
            s[bi][bj] = 1
            added += 1
            if s[bi][bj - 1] == 1 and s[bi][bj - 2] == 0:
                s[bi][bj - 1] = 0
            elif s[bi][bj + 1] == 1 and s[bi][bj + 2] == 0:
                s[bi][bj + 1] = 0

    skel[...] = np.asarray(s, dtype=skel.dtype)
    return added


def _trace(s: list, h: int, w: int, i: int, j: int, newval: int) -> int:
    """Walk a ridge from an endpoint, marking visited pixels 2.

    At each step the number of unvisited skeleton neighbors is added to the
    length; the walk follows the last such neighbor and stops at dead ends
    or junctions (>= 2 unvisited neighbors).  The pixel the walk stopped on
    is restored; every other visited pixel becomes ``newval``.
    """
    if s[i][j] == 0:
        return 0
    length = 0
    v = -1
    kb = -1
    visited = [(i, j)]
    s[i][j] = 2
    while v != 0 and v != 2:
        if s[i][j] != 2:
            s[i][j] = 2
            visited.append((i, j))
        kb = -1
        v = 0
        for k in range(8):
            di, dj = _RING[k]
            ni, nj = i + di, j + dj
            if 0 <= ni < h and 0 <= nj < w and s[ni][nj] == 1:
                v += 1
                kb = k
        length += v
        if kb < 0:
            break
        i += _RING[kb][0]
        j += _RING[kb][1]
    for vi, vj in visited:
        s[vi][vj] = newval
    if kb >= 0:
        s[i - _RING[kb][0]][j - _RING[kb][1]] = 1
    return length


def remove_short_ridges(skel: np.ndarray, term_mask: np.ndarray, min_len: int) -> int:
    """Erase every ridge attached to a marked endpoint whose traced length
    falls below ``min_len``.  Endpoints are processed in raster order on
    the continuously updated skeleton.  Returns the number erased.
    Modifies ``skel`` in place."""
    h, w = skel.shape
    s = skel.tolist()
    erased = 0
    for i, j in np.argwhere(np.asarray(term_mask) != 0):
        i, j = int(i), int(j)
        length = _trace(s, h, w, i, j, 1)
        if length < min_len:
            _trace(s, h, w, i, j, 0)
            erased += 1
    skel[...] = np.asarray(s, dtype=skel.dtype)
    return erased


def trimmed_mean_filter(img: np.ndarray, ksize: int, trim: int) -> np.ndarray:
    """k x k trimmed-mean filter: per window, sort the values, drop ``trim``
    from each end of the ranking, average the rest.  Reflect padding."""
    if ksize % 2 != 1:
        raise ValueError("kernel size must be odd")
    if 2 * trim >= ksize * ksize:
        raise ValueError("trim removes every sample")
    half = ksize // 2
    padded = np.pad(np.asarray(img, dtype=np.float64), half, mode="reflect")
    win = np.lib.stride_tricks.sliding_window_view(padded, (ksize, ksize))
    flat = win.reshape(win.shape[0], win.shape[1], ksize * ksize)
    ordered = np.sort(flat, axis=-1)
    kept = ordered[:, :, trim : ksize * ksize - trim]
    mean = kept.mean(axis=-1)
    rounded = np.sign(mean) * np.floor(np.abs(mean) + 0.5)
    return np.clip(rounded, 0, 255).astype(np.uint8)
