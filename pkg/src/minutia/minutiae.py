"""Minutiae extraction and the track-count table template.

From a thin skeleton, terminations (crossing number 1) and bifurcations
(crossing number 3) are detected, spurious detections are filtered by
structural rules, and the retained minutiae are binned by distance from
the core point into annular tracks, giving the stored template: one
(termination count, bifurcation count) row per track.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from minutia import _kernels
from minutia.thinning import morph_clean

TRACK_WIDTH = 10
MIN_RIDGE_LENGTH = 22
BIF_WINDOW_HALF = 10

TERMINATION = "termination"
BIFURCATION = "bifurcation"


class Minutia(NamedTuple):
    x: int      # pixel column
    y: int      # pixel row
    kind: str   # TERMINATION or BIFURCATION


def binarize_adaptive(img: np.ndarray, block: int = 32) -> np.ndarray:
    """Binarize with per-block mean thresholds; ridges are dark, so a pixel
    is ridge (1) when strictly below its block mean.  Trailing partial
    blocks use their own mean."""
    arr = np.asarray(img, dtype=np.float64)
    h, w = arr.shape
    out = np.zeros((h, w), dtype=np.uint8)
    for r in range(0, h, block):
        for c in range(0, w, block):
            tile = arr[r : r + block, c : c + block]
            out[r : r + block, c : c + block] = tile < tile.mean()
    return out


def crossing_number(skel: np.ndarray, x: int, y: int) -> int:
    """Crossing number at pixel (column x, row y); outside neighbors read 0."""
    h, w = skel.shape
    ring = []
    for di, dj in ((-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1)):
        i, j = y + di, x + dj
        ring.append(int(skel[i, j]) if 0 <= i < h and 0 <= j < w else 0)
    ring.append(ring[0])
    return sum(abs(ring[k + 1] - ring[k]) for k in range(8)) // 2


def _hbreak(skel: np.ndarray) -> np.ndarray:
    """Remove centers of exact H patterns (both orientations)."""
    s = np.asarray(skel, dtype=np.uint8)
    p = np.pad(s, 1)
    n = {
        (di, dj): p[1 + di : 1 + di + s.shape[0], 1 + dj : 1 + dj + s.shape[1]]
        for di in (-1, 0, 1)
        for dj in (-1, 0, 1)
    }
    horiz = (
        (n[(-1, -1)] == 1) & (n[(-1, 0)] == 1) & (n[(-1, 1)] == 1)
        & (n[(0, -1)] == 0) & (n[(0, 1)] == 0)
        & (n[(1, -1)] == 1) & (n[(1, 0)] == 1) & (n[(1, 1)] == 1)
    )
    vert = (
        (n[(-1, -1)] == 1) & (n[(0, -1)] == 1) & (n[(1, -1)] == 1)
        & (n[(-1, 0)] == 0) & (n[(1, 0)] == 0)
        & (n[(-1, 1)] == 1) & (n[(0, 1)] == 1) & (n[(1, 1)] == 1)
    )
    out = s.copy()
    out[(s == 1) & (horiz | vert)] = 0
    return out


def _spur(skel: np.ndarray) -> np.ndarray:
    """One spur pass: drop pixels with exactly one 8-neighbor (line tips)."""
    s = np.asarray(skel, dtype=np.uint8)
    p = np.pad(s, 1)
    neigh = (
        p[:-2, :-2] + p[:-2, 1:-1] + p[:-2, 2:]
        + p[1:-1, :-2] + p[1:-1, 2:]
        + p[2:, :-2] + p[2:, 1:-1] + p[2:, 2:]
    )
    out = s.copy()
    out[(s == 1) & (neigh == 1)] = 0
    return out


def _cn_map_with_border_filter(skel: np.ndarray) -> np.ndarray:
    """Crossing-number map with the termination border test applied.

    A termination survives only if some other skeleton pixel lies strictly
    between it and the nearer image border, both along its row and along
    its column.
    """
    cn = _kernels.crossing_number_map(skel)
    s = np.asarray(skel, dtype=np.int64)
    h, w = s.shape
    row_cum = s.cumsum(axis=1)
    col_cum = s.cumsum(axis=0)
    row_tot = row_cum[:, -1][:, None]
    col_tot = col_cum[-1, :][None, :]
    left = row_cum - s          # strictly left of the pixel
    right = row_tot - row_cum   # strictly right
    above = col_cum - s
    below = col_tot - col_cum

    cols = np.arange(w)[None, :]
    rows = np.arange(h)[:, None]
    horiz_ok = np.where(cols < w / 2, left > 0, right > 0)
    vert_ok = np.where(rows < h / 2, above > 0, below > 0)

    out = cn.copy()
    out[(cn == 1) & ~(horiz_ok & vert_ok)] = 0
    return out


def extract_minutiae(skel: np.ndarray) -> list[Minutia]:
    """Detect and filter minutiae on a thin skeleton.

    Pipeline: clean, H-break, spur (one pass each); crossing-number map
    with the border test; erase ridges of traced length < 22 attached to a
    surviving termination; re-detect; remove every bifurcation from any
    21x21 window that contains two or more of them.
    """
    s = morph_clean(np.asarray(skel, dtype=np.uint8))
    s = _hbreak(s)
    s = _spur(s)

    cn = _cn_map_with_border_filter(s)
    work = np.ascontiguousarray(s)
    _kernels.remove_short_ridges(work, (cn == 1).astype(np.uint8), MIN_RIDGE_LENGTH)

    cn = _cn_map_with_border_filter(work)

    # bifurcation clusters: examined centers stay away from the border by
    # one window half-width, but any bifurcation inside a hit window goes
    h, w = cn.shape
    sw = BIF_WINDOW_HALF
    bif = cn == 3
    for i in range(sw, h - sw):
        for j in range(sw, w - sw):
            if not bif[i, j]:
                continue
            win = np.s_[i - sw : i + sw + 1, j - sw : j + sw + 1]
            if bif[win].sum() > 1:
                hit = bif[win]
                cn_win = cn[win]
                cn_win[hit] = 0
                bif[win] = False

    found = []
    for i, j in np.argwhere((cn == 1) | (cn == 3)):
        kind = TERMINATION if cn[i, j] == 1 else BIFURCATION
        found.append(Minutia(x=int(j), y=int(i), kind=kind))
    return found


def build_table(minutiae: list[Minutia], core, track_width: int = TRACK_WIDTH) -> np.ndarray:
    """Bin minutiae into annular tracks around the core.

    Track k spans distances [1 + k*width, 1 + (k+1)*width); a minutia
    closer than 1 px to the core goes to track 0 rather than being
    dropped.  Rows = ceil(max distance / width).  Returns an (n, 2) int
    array: column 0 terminations, column 1 bifurcations.
    """
    if track_width < 1:
        raise ValueError("track width must be >= 1")
    if not minutiae:
        return np.zeros((0, 2), dtype=np.int64)
    cx, cy = float(core[0]), float(core[1])
    dists = [((m.x - cx) ** 2 + (m.y - cy) ** 2) ** 0.5 for m in minutiae]
    n_tracks = int(np.ceil(max(dists) / track_width))
    n_tracks = max(n_tracks, 1)
    table = np.zeros((n_tracks, 2), dtype=np.int64)
    for m, d in zip(minutiae, dists):
        k = 0 if d < 1 else int((d - 1) // track_width)
        table[k, 0 if m.kind == TERMINATION else 1] += 1
    return table


def write_mtab(table: np.ndarray) -> str:
    """Serialize a minutiae table: one 'term<TAB>bif' line per track."""
    return "".join(f"{int(t)}\t{int(b)}\n" for t, b in np.asarray(table))


def read_mtab(text: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'term<TAB>bif'")
        t, b = int(parts[0]), int(parts[1])
        if t < 0 or b < 0:
            raise ValueError(f"line {lineno}: negative count")
        rows.append((t, b))
    return np.asarray(rows, dtype=np.int64).reshape(-1, 2)


def save_mtab(path, table: np.ndarray) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(write_mtab(table))


def load_mtab(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        return read_mtab(fh.read())
