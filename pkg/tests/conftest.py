import numpy as np
import pytest


def loop_image(h=300, w=300, rc=150, cc=150, period=10.0, amp=90.0):
    """Synthetic loop-patterned print: concentric ridge arcs over the core
    at (row rc, col cc), flowing into vertical flanks below it.  Constant
    ridge spacing, single orientation singularity at the core."""
    r = np.arange(h)[:, None] - rc
    c = np.arange(w)[None, :] - cc
    above = np.hypot(r, c)
    below = np.abs(c).astype(np.float64) * np.ones((h, 1))
    phase = np.where(r <= 0, above, below)
    return np.clip(127.5 + amp * np.cos(2 * np.pi * phase / period), 0, 255).astype(np.uint8)


def ring_image(h=300, w=300, rc=150, cc=150, period=11.0, amp=90.0):
    """Concentric-ring texture; handy as a generic fingerprint-like host."""
    r = np.arange(h)[:, None] - rc
    c = np.arange(w)[None, :] - cc
    rho = np.hypot(r, c)
    return np.clip(127.5 + amp * np.cos(2 * np.pi * rho / period), 0, 255).astype(np.uint8)


def grating(h, w, angle, period=10.0, amp=100.0, phase=0.0):
    """Straight parallel ridges along ``angle`` radians from horizontal."""
    r = np.arange(h)[:, None]
    c = np.arange(w)[None, :]
    coord = c * np.sin(angle) - r * np.cos(angle)
    return np.clip(
        127.5 + amp * np.sin(2 * np.pi * coord / period + phase), 0, 255
    ).astype(np.uint8)


def fingerprint_host(h=256, w=256, rc=128, cc=128, radius=90, period=11.0,
                     amp=60.0, blur=1.5, noise=4.0, seed=0):
    """Capture-like host for watermarking: a blurred loop texture inside a
    disk, white background outside, mild sensor noise everywhere."""
    from scipy import ndimage

    from minutia.rng import SplitMix64

    img = ndimage.gaussian_filter(
        loop_image(h, w, rc, cc, period=period, amp=amp).astype(np.float64), blur
    )
    r = np.arange(h)[:, None] - rc
    c = np.arange(w)[None, :] - cc
    rho = np.hypot(r, c)
    fade = np.clip((radius - rho) / 12.0, 0, 1)
    base = 255 * (1 - fade) + img * fade
    base = base + SplitMix64(seed).normal_array(h * w, noise).reshape(h, w)
    return np.clip(np.floor(base + 0.5), 0, 255).astype(np.uint8)


@pytest.fixture
def loop_print():
    return loop_image()
