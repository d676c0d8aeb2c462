"""Core (reference) point detection.

The detector convolves the normalized squared-gradient field with an
order-m complex filter (a polynomial times a Gaussian) and takes the
masked magnitude maximum; the mask keeps blocks with enough intensity
variation, consolidated by morphological closing and a wide erosion.

A Poincare-index classifier over the orientation field is exposed as an
independent validation tool; the pipeline itself uses the complex filter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import ndimage, signal

from minutia.enhance import OrientationField


class CorePoint(NamedTuple):
    x: int   # pixel column
    y: int   # pixel row


@dataclass(frozen=True)
class CoreParams:
    filter_order: int = 1
    gaussian_sigma: float = math.sqrt(55.0)
    window_halfwidth: int = 16
    var_block: int = 8
    var_threshold: float = 20.0
    close_size: int = 10
    erode_size: int = 44
    mirror_pad: int = 20

    def __post_init__(self):
        for name in ("filter_order", "gaussian_sigma", "window_halfwidth",
                     "var_block", "var_threshold", "close_size", "erode_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


class NoForeground(ValueError):
    """Variance mask is empty; nothing to search."""


def _squared_gradient_field(img: np.ndarray) -> np.ndarray:
    f = np.asarray(img, dtype=np.float64)
    gy, gx = np.gradient(f)
    g = gx + 1j * gy
    num = g * g
    den = np.abs(num)
    z = np.ones_like(num)
    nz = den != 0
    z[nz] = num[nz] / den[nz]
    return z


def _complex_filter(order: int, sigma: float, halfwidth: int) -> np.ndarray:
    offs = np.arange(-halfwidth, halfwidth + 1, dtype=np.float64)
    xx = offs[None, :]   # column offset
    yy = offs[:, None]   # row offset; the row axis points down, so the
    # core-matched polynomial x + iy (y up) becomes col - i*row here
    gauss = np.exp(-(xx**2 + yy**2) / (2.0 * sigma**2))
    return gauss * (xx - 1j * yy) ** order


def _variance_mask(img: np.ndarray, params: CoreParams) -> np.ndarray:
    b = params.var_block
    h = (img.shape[0] // b) * b
    w = (img.shape[1] // b) * b
    arr = np.asarray(img[:h, :w], dtype=np.float64)
    tiles = arr.reshape(h // b, b, w // b, b)
    mean = tiles.mean(axis=(1, 3))
    std = np.sqrt((tiles**2).mean(axis=(1, 3)) - mean**2)
    ok = std > params.var_threshold
    mask = np.zeros(img.shape, dtype=bool)
    mask[:h, :w] = np.repeat(np.repeat(ok, b, axis=0), b, axis=1)
    mask = ndimage.binary_closing(mask, np.ones((params.close_size,) * 2, dtype=bool))
    mask = ndimage.binary_erosion(mask, np.ones((params.erode_size,) * 2, dtype=bool))
    return mask


def complex_core(img: np.ndarray, params: CoreParams = CoreParams()) -> CorePoint:
    """Locate the core point of a fingerprint image.

    Raises NoForeground when the variance mask is empty (uniform or
    near-uniform input); callers may retry with a lower threshold.
    Ties in the filter response resolve to the smallest row, then column.
    """
    if img.size == 0:
        raise ValueError("empty image")
    z = _squared_gradient_field(img)
    pad = params.mirror_pad
    padded = np.pad(z, pad, mode="symmetric")
    filt = _complex_filter(params.filter_order, params.gaussian_sigma, params.window_halfwidth)
    resp = signal.fftconvolve(padded, filt, mode="same")
    resp = np.abs(resp[pad : pad + img.shape[0], pad : pad + img.shape[1]])

    mask = _variance_mask(img, params)
    if not mask.any():
        raise NoForeground("no foreground: variance mask is empty")
    resp[~mask] = -1.0
    flat = int(np.argmax(resp))      # row-major: first max = smallest row, then column
    y, x = divmod(flat, img.shape[1])
    return CorePoint(x=x, y=y)


_RING_OFFS = (   # increasing atan2(drow, dcol): E, SE, S, SW, W, NW, N, NE
    (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1),
)


def poincare_sum(field: OrientationField, i: int, j: int) -> float:
    """Total signed rotation (degrees) of the orientation field around the
    8-neighborhood of block (i, j).

    The first neighbor's direction is taken pointing upward; each next
    direction is the flip of its orientation that stays within 90 degrees
    of the previous one, and the closing term re-aligns the first element
    to the last.
    """
    theta = field.theta
    nbr, nbc = theta.shape
    if not (1 <= i < nbr - 1 and 1 <= j < nbc - 1):
        raise ValueError("block lacks a full 8-neighborhood")

    angles = [float(theta[i + di, j + dj]) for di, dj in _RING_OFFS]

    def wrap(d):
        return (d + math.pi) % (2 * math.pi) - math.pi

    # directions as angles in radians; "upward" means positive sine
    d0 = angles[0] if math.sin(angles[0]) >= 0 else angles[0] + math.pi
    dirs = [d0]
    for a in angles[1:]:
        cand = a if abs(wrap(a - dirs[-1])) <= math.pi / 2 else a + math.pi
        dirs.append(cand)

    total = sum(wrap(dirs[k + 1] - dirs[k]) for k in range(7))
    # closing term: re-align the first element's orientation to the last
    total += (angles[0] - dirs[7] + math.pi / 2) % math.pi - math.pi / 2
    return math.degrees(total)


def poincare_index(field: OrientationField, i: int, j: int, tolerance: float = 10.0) -> str:
    """Classify block (i, j): 'whorl' (360), 'loop' (180), 'delta' (-180),
    or 'none' (0), within the given tolerance in degrees."""
    total = poincare_sum(field, i, j)
    if abs(abs(total) - 360.0) <= tolerance:
        return "whorl"
    if abs(total - 180.0) <= tolerance:
        return "loop"
    if abs(total + 180.0) <= tolerance:
        return "delta"
    return "none"
