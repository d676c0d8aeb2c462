"""Ridge thinning.

Two thinners are provided:

* a gray-scale thinner that works directly on intensities: 8x8 blocks are
  typed by dominant ridge direction, the print area is segmented, and ridge
  centerlines are recovered as gray-level local minima scanned along runs
  of same-type blocks, followed by a bifurcation-repair pass;
* a baseline two-subiteration parallel binary thinner for comparison.

Skeletons are uint8 arrays with 1 = ridge pixel.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy import ndimage

from minutia import _kernels

BLOCK = 8
BACKGROUND_THRESHOLD = 245


class SegmentResult(NamedTuple):
    bbox_blocks: tuple[int, int, int, int]   # r0, r1, c0, c1 inclusive, block coords
    block_map: np.ndarray                    # cropped block-type map
    pixel_box: tuple[int, int, int, int]     # r0, r1, c0, c1, end-exclusive pixel coords


class EmptyForeground(ValueError):
    """No fingerprint area found."""


def classify_blocks(img: np.ndarray, background_threshold: int = BACKGROUND_THRESHOLD) -> np.ndarray:
    """Type each 8x8 block: 0 background, 1 near-horizontal ridge, 2 near-vertical.

    A block is foreground when it contains any pixel at or below the
    threshold.  min1 is the smallest column sum and min2 the smallest row
    sum of the block; min1 > min2 means the dark ridge runs horizontally
    (an entire row is dark, so row sums dip lower), hence type 1.
    A correction pass then retypes blocks that disagree with both their
    horizontal or vertical neighbors and blanks isolated blocks.
    """
    h = (img.shape[0] // BLOCK) * BLOCK
    w = (img.shape[1] // BLOCK) * BLOCK
    arr = np.asarray(img[:h, :w], dtype=np.int64)
    nbr, nbc = h // BLOCK, w // BLOCK

    blocks = arr.reshape(nbr, BLOCK, nbc, BLOCK)
    has_fg = (blocks <= background_threshold).any(axis=(1, 3))
    col_sums = blocks.sum(axis=1)             # (nbr, nbc, BLOCK)
    row_sums = blocks.sum(axis=3)             # (nbr, BLOCK, nbc)
    min1 = col_sums.min(axis=2)
    min2 = row_sums.min(axis=1)

    types = np.where(min1 > min2, 1, 2).astype(np.uint8)
    types[~has_fg] = 0

    # sequential neighbor correction over interior blocks; updates are
    # visible to later blocks in the scan
    t = types.tolist()
    for i in range(1, nbr - 1):
        for j in range(1, nbc - 1):
            cur = t[i][j]
            left, right = t[i][j - 1], t[i][j + 1]
            top, bottom = t[i - 1][j], t[i + 1][j]
            if cur == 2:
                if (
                    (left == 1 and right == 1)
                    or (top == 1 and bottom == 1)
                    or (left == 0 and right == 1)
                    or (left == 1 and right == 0)
                ):
                    t[i][j] = 1
                elif left == 0 and right == 0 and top == 0 and bottom == 0:
                    t[i][j] = 0
            elif cur == 1:
                if (
                    (top == 2 and bottom == 2)
                    or (left == 2 and right == 2)
                    or (top == 0 and bottom == 2)
                    or (left == 2 and right == 0)
                ):
                    t[i][j] = 2
                elif left == 0 and right == 0 and top == 0 and bottom == 0:
                    t[i][j] = 0
    return np.asarray(t, dtype=np.uint8)


def segment(block_map: np.ndarray) -> SegmentResult:
    """Crop the block map to the fingerprint area.

    The binarized map is closed then opened (3x3), its perimeter extracted,
    and the bounding box of perimeter blocks gives the crop.  When the
    morphology wipes out a tiny foreground entirely, the raw map is used
    for the bounding box instead so a valid foreground never errors.
    """
    fg = np.asarray(block_map) != 0
    if not fg.any():
        raise EmptyForeground("block map holds no foreground blocks")

    se = np.ones((3, 3), dtype=bool)
    morphed = ndimage.binary_opening(ndimage.binary_closing(fg, se), se)
    if not morphed.any():
        morphed = fg

    eroded = ndimage.binary_erosion(morphed, np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool))
    perim = morphed & ~eroded
    if not perim.any():
        perim = morphed

    rows = np.where(perim.any(axis=1))[0]
    cols = np.where(perim.any(axis=0))[0]
    r0, r1 = int(rows[0]), int(rows[-1])
    c0, c1 = int(cols[0]), int(cols[-1])
    cropped = np.asarray(block_map)[r0 : r1 + 1, c0 : c1 + 1].copy()
    pixel_box = (r0 * BLOCK, (r1 + 1) * BLOCK, c0 * BLOCK, (c1 + 1) * BLOCK)
    return SegmentResult((r0, r1, c0, c1), cropped, pixel_box)


def morph_clean(skel: np.ndarray) -> np.ndarray:
    """Remove isolated 1-pixels (no 8-neighbors)."""
    s = np.asarray(skel, dtype=np.uint8)
    p = np.pad(s, 1)
    neigh = (
        p[:-2, :-2] + p[:-2, 1:-1] + p[:-2, 2:]
        + p[1:-1, :-2] + p[1:-1, 2:]
        + p[2:, :-2] + p[2:, 1:-1] + p[2:, 2:]
    )
    out = s.copy()
    out[(s == 1) & (neigh == 0)] = 0
    return out


def _runs(mask_1d: np.ndarray):
    """Maximal runs of True: yields (start, end) with end exclusive."""
    idx = np.flatnonzero(mask_1d)
    if idx.size == 0:
        return
    breaks = np.where(np.diff(idx) > 1)[0]
    starts = np.concatenate(([idx[0]], idx[breaks + 1]))
    ends = np.concatenate((idx[breaks] + 1, [idx[-1] + 1]))
    for s, e in zip(starts, ends):
        yield int(s), int(e)


def thin_gray(img: np.ndarray, block_map: np.ndarray) -> np.ndarray:
    """Gray-scale thinning over a typed block map aligned with ``img``.

    Vertical runs of type-1 blocks are scanned top to bottom per pixel
    column, marking every strict gray-level local minimum; horizontal runs
    of type-2 blocks are scanned symmetrically.  Marks falling in
    background blocks are dropped, then isolated pixels cleaned.
    """
    gray = np.ascontiguousarray(img, dtype=np.uint8)
    bmap = np.asarray(block_map)
    nbr, nbc = bmap.shape
    skel = np.zeros_like(gray)

    for bc in range(nbc):
        for s, e in _runs(bmap[:, bc] == 1):
            _kernels.mark_col_minima(gray, skel, s * BLOCK, e * BLOCK, bc * BLOCK, (bc + 1) * BLOCK)
    for br in range(nbr):
        for s, e in _runs(bmap[br, :] == 2):
            _kernels.mark_row_minima(gray, skel, br * BLOCK, (br + 1) * BLOCK, s * BLOCK, e * BLOCK)

    # a minimum found on a run boundary may land one pixel into a
    # neighboring block; keep only marks whose own block is foreground
    fg_pixels = np.zeros_like(gray, dtype=bool)
    fg_blocks = np.repeat(np.repeat(bmap != 0, BLOCK, axis=0), BLOCK, axis=1)
    fg_pixels[: nbr * BLOCK, : nbc * BLOCK] = fg_blocks
    skel[~fg_pixels] = 0

    return morph_clean(skel)


def repair_bifurcations(skel: np.ndarray, img: np.ndarray) -> np.ndarray:
    """Reconnect bifurcations left dangling by the gray-scale scan."""
    if skel.shape != img.shape:
        raise ValueError("skeleton and image dimensions differ")
    out = np.ascontiguousarray(skel, dtype=np.uint8).copy()
    _kernels.repair_dangling(out, np.ascontiguousarray(img, dtype=np.uint8))
    return out


def thin_binary_baseline(binary: np.ndarray) -> np.ndarray:
    """Parallel binary thinning of {0,1} ridge images to a fixpoint."""
    arr = np.asarray(binary)
    if not np.all(np.isin(np.unique(arr), (0, 1))):
        raise ValueError("binary image values must be 0 or 1")
    return _kernels.thin_baseline(np.ascontiguousarray(arr, dtype=np.uint8))


def thin_gray_pipeline(img: np.ndarray, background_threshold: int = BACKGROUND_THRESHOLD) -> np.ndarray:
    """classify -> segment -> scan -> repair, returning a full-size skeleton."""
    bmap = classify_blocks(img, background_threshold)
    seg = segment(bmap)
    r0, r1, c0, c1 = seg.pixel_box
    sub = np.ascontiguousarray(img[r0:r1, c0:c1])
    skel_sub = thin_gray(sub, seg.block_map)
    skel_sub = repair_bifurcations(skel_sub, sub)
    full = np.zeros(img.shape, dtype=np.uint8)
    full[r0:r1, c0:c1] = skel_sub
    return full
