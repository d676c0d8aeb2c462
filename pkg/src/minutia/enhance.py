"""Contextual fingerprint enhancement by short-time Fourier analysis.

Overlapping blocks are filtered in the FFT domain with an angular filter
centered on the locally dominant ridge orientation and a radial filter
centered on the locally dominant ridge frequency, then recomposed by
windowed overlap-add.  Block spectral energy drives a region mask that
separates recoverable print area from background.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

FREQ_MIN = 1.0 / 25.0   # plausible ridge-frequency band, cycles/pixel
FREQ_MAX = 1.0 / 3.0

SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = SOBEL_X.T


@dataclass(frozen=True)
class EnhanceParams:
    block_size: int = 32
    overlap: int = 16
    energy_threshold_percentile: float = 0.40
    angular_bandwidth_base: float = np.pi / 8
    radial_bandwidth: float = 0.06

    def __post_init__(self):
        if not 0 < self.overlap < self.block_size:
            raise ValueError("overlap must lie strictly between 0 and block_size")
        if not 0 < self.energy_threshold_percentile < 1:
            raise ValueError("percentile must lie in (0, 1)")


@dataclass(frozen=True)
class OrientationField:
    """Per-block ridge angles in [0, pi), measured from the horizontal axis."""

    theta: np.ndarray
    block_size: int

    def __post_init__(self):
        if self.theta.size and (self.theta.min() < 0 or self.theta.max() >= np.pi):
            raise ValueError("orientation angles must lie in [0, pi)")


def _sobel_gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    f = np.asarray(img, dtype=np.float64)
    gx = ndimage.convolve(f, SOBEL_X, mode="reflect")
    gy = ndimage.convolve(f, SOBEL_Y, mode="reflect")
    return gx, gy


def _doubled_vectors(gx: np.ndarray, gy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # squared-gradient (doubled-angle) components; summing these averages
    # orientations without the 180-degree ambiguity
    return gx * gx - gy * gy, 2.0 * gx * gy


def _theta_from_doubled(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    grad_angle = 0.5 * np.arctan2(b, a)
    return np.mod(grad_angle + np.pi / 2, np.pi)


def orientation_field(img: np.ndarray, block_size: int) -> OrientationField:
    """Dominant ridge orientation per non-overlapping block.

    Sobel gradients are averaged blockwise as doubled-angle vectors; the
    ridge angle is orthogonal to the mean gradient direction.
    """
    h = (img.shape[0] // block_size) * block_size
    w = (img.shape[1] // block_size) * block_size
    if h == 0 or w == 0:
        raise ValueError("image smaller than one block")
    gx, gy = _sobel_gradients(np.asarray(img[:h, :w], dtype=np.float64))
    a, b = _doubled_vectors(gx, gy)
    nbr, nbc = h // block_size, w // block_size
    a_sum = a.reshape(nbr, block_size, nbc, block_size).sum(axis=(1, 3))
    b_sum = b.reshape(nbr, block_size, nbc, block_size).sum(axis=(1, 3))
    return OrientationField(_theta_from_doubled(a_sum, b_sum), block_size)


def _raised_cosine(dist: np.ndarray, halfwidth: float) -> np.ndarray:
    out = np.zeros_like(dist)
    inside = np.abs(dist) <= halfwidth
    out[inside] = np.cos(np.pi / 2 * dist[inside] / halfwidth) ** 2
    return out


def _block_positions(extent: int, block: int, step: int) -> list[int]:
    pos = list(range(0, extent - block + 1, step))
    if pos[-1] != extent - block:
        pos.append(extent - block)
    return pos


def stft_enhance(img: np.ndarray, params: EnhanceParams = EnhanceParams()):
    """Enhance a fingerprint image; returns (enhanced, mask, field).

    Per overlapping block: estimate orientation (smoothed doubled-angle
    gradient average) and ridge frequency (peak of the radially binned
    spectrum inside the plausible band); multiply the block spectrum by
    the angular and radial raised-cosine filters; inverse transform and
    overlap-add under a raised-cosine window.  Blocks whose log spectral
    energy falls below the chosen percentile are masked out and forced to
    white in the output.
    """
    gray = np.asarray(img, dtype=np.float64)
    h, w = gray.shape
    blk = params.block_size
    step = params.overlap

    field_stub = OrientationField(np.zeros((0, 0)), step)
    if h < blk or w < blk:
        raise ValueError("image smaller than one analysis block")
    if gray.max() == gray.min():
        # featureless input: empty mask, untouched image
        return (
            gray.astype(np.uint8).copy(),
            np.zeros((h, w), dtype=np.uint8),
            field_stub,
        )

    rpos = _block_positions(h, blk, step)
    cpos = _block_positions(w, blk, step)
    nbr, nbc = len(rpos), len(cpos)

    # per-block doubled-angle gradient sums and spectral statistics
    gx, gy = _sobel_gradients(gray)
    da, db = _doubled_vectors(gx, gy)

    fu = np.fft.fftfreq(blk)
    rad = np.sqrt(fu[None, :] ** 2 + fu[:, None] ** 2)
    phi = np.arctan2(fu[:, None], fu[None, :])   # spectral angle per bin
    band = (rad >= FREQ_MIN) & (rad <= FREQ_MAX)

    win1 = 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(blk) / blk))
    win2d = np.outer(win1, win1)

    nbins = blk // 2 + 1
    bin_idx = np.minimum(np.round(rad * blk).astype(int), nbins - 1)

    a_grid = np.zeros((nbr, nbc))
    b_grid = np.zeros((nbr, nbc))
    freq_grid = np.zeros((nbr, nbc))
    energy_grid = np.zeros((nbr, nbc))
    spectra = np.empty((nbr, nbc, blk, blk), dtype=np.complex128)

    for bi, r in enumerate(rpos):
        for bj, c in enumerate(cpos):
            tile = gray[r : r + blk, c : c + blk]
            a_grid[bi, bj] = da[r : r + blk, c : c + blk].sum()
            b_grid[bi, bj] = db[r : r + blk, c : c + blk].sum()
            spec = np.fft.fft2(tile - tile.mean())
            spectra[bi, bj] = spec
            power = np.abs(spec) ** 2
            banded = np.where(band, power, 0.0)
            energy_grid[bi, bj] = banded.sum()
            radial = np.bincount(bin_idx.ravel(), weights=banded.ravel(), minlength=nbins)
            peak = int(np.argmax(radial))
            freq_grid[bi, bj] = peak / blk

    # orientation smoothing and coherence on the block grid
    a_s = ndimage.uniform_filter(a_grid, size=3, mode="nearest")
    b_s = ndimage.uniform_filter(b_grid, size=3, mode="nearest")
    theta = _theta_from_doubled(a_s, b_s)

    mag = np.hypot(a_s, b_s)
    with np.errstate(invalid="ignore", divide="ignore"):
        ua = np.where(mag > 0, a_s / mag, 0.0)
        ub = np.where(mag > 0, b_s / mag, 0.0)
    coh = np.hypot(
        ndimage.uniform_filter(ua, size=3, mode="nearest"),
        ndimage.uniform_filter(ub, size=3, mode="nearest"),
    )
    coh = np.clip(coh, 0.0, 1.0)

    log_energy = np.log1p(energy_grid)
    thr = np.percentile(log_energy, 100.0 * params.energy_threshold_percentile)
    block_ok = log_energy >= thr

    acc = np.zeros((h, w))
    wacc = np.zeros((h, w))
    macc = np.zeros((h, w))

    for bi, r in enumerate(rpos):
        for bj, c in enumerate(cpos):
            bw = params.angular_bandwidth_base * (1.0 + (1.0 - coh[bi, bj]))
            bw = float(np.clip(bw, np.pi / 16, np.pi / 2))
            phi0 = theta[bi, bj] + np.pi / 2
            dphi = np.mod(phi - phi0 + np.pi / 2, np.pi) - np.pi / 2
            fa = _raised_cosine(dphi, bw)
            fr = _raised_cosine(rad - freq_grid[bi, bj], params.radial_bandwidth)
            filtered = np.real(np.fft.ifft2(spectra[bi, bj] * fa * fr))
            sl = np.s_[r : r + blk, c : c + blk]
            acc[sl] += win2d * filtered
            wacc[sl] += win2d
            macc[sl] += win2d * (1.0 if block_ok[bi, bj] else 0.0)

    covered = wacc > 1e-3
    enhanced = np.zeros((h, w))
    enhanced[covered] = acc[covered] / wacc[covered]
    mask = np.zeros((h, w), dtype=np.uint8)
    mask[covered] = (macc[covered] / wacc[covered]) > 0.5

    out = np.full((h, w), 255, dtype=np.uint8)
    inside = mask == 1
    if inside.any():
        vals = enhanced[inside]
        lo, hi = vals.min(), vals.max()
        if hi > lo:
            scaled = (enhanced - lo) / (hi - lo) * 255.0
            rounded = np.floor(scaled + 0.5)
            out[inside] = np.clip(rounded, 0, 255).astype(np.uint8)[inside]
        else:
            out[inside] = 128

    return out, mask, OrientationField(theta, step)
