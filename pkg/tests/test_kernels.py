"""The compiled extension and the NumPy/pure-Python backend must agree
bit for bit on every kernel."""

import numpy as np
import pytest

from minutia._kernels import py_kernels

try:
    from minutia._kernels import _speedups
except ImportError:
    _speedups = None

needs_ext = pytest.mark.skipif(_speedups is None, reason="compiled extension not built")


def random_skeleton(rng, h=64, w=64, density=0.12):
    return (rng.random((h, w)) < density).astype(np.uint8)


def random_gray(rng, h=64, w=64):
    return rng.integers(0, 256, size=(h, w), dtype=np.uint8)


@needs_ext
@pytest.mark.parametrize("seed", range(5))
def test_crossing_number_map_parity(seed):
    rng = np.random.default_rng(seed)
    s = random_skeleton(rng)
    assert np.array_equal(py_kernels.crossing_number_map(s), _speedups.crossing_number_map(s))


@needs_ext
@pytest.mark.parametrize("seed", range(5))
def test_thin_baseline_parity(seed):
    rng = np.random.default_rng(100 + seed)
    from scipy import ndimage

    blob = (ndimage.gaussian_filter(rng.random((80, 80)), 3) > 0.5).astype(np.uint8)
    assert np.array_equal(py_kernels.thin_baseline(blob), _speedups.thin_baseline(blob))


@needs_ext
@pytest.mark.parametrize("seed", range(5))
def test_mark_minima_parity(seed):
    rng = np.random.default_rng(200 + seed)
    gray = random_gray(rng)
    a = np.zeros_like(gray)
    b = np.zeros_like(gray)
    py_kernels.mark_col_minima(gray, a, 8, 56, 16, 24)
    _speedups.mark_col_minima(gray, b, 8, 56, 16, 24)
    assert np.array_equal(a, b)
    a[:] = 0
    b[:] = 0
    py_kernels.mark_row_minima(gray, a, 16, 24, 8, 62)
    _speedups.mark_row_minima(gray, b, 16, 24, 8, 62)
    assert np.array_equal(a, b)


@needs_ext
@pytest.mark.parametrize("seed", range(8))
def test_repair_dangling_parity(seed):
    rng = np.random.default_rng(300 + seed)
    skel_a = random_skeleton(rng, density=0.2)
    gray = random_gray(rng)
    skel_b = skel_a.copy()
    na = py_kernels.repair_dangling(skel_a, gray)
    nb = _speedups.repair_dangling(skel_b, gray)
    assert na == nb
    assert np.array_equal(skel_a, skel_b)


@needs_ext
@pytest.mark.parametrize("seed", range(8))
def test_remove_short_ridges_parity(seed):
    rng = np.random.default_rng(400 + seed)
    skel_a = random_skeleton(rng, density=0.15)
    cn_a = py_kernels.crossing_number_map(skel_a)
    term = ((cn_a == 1) & (skel_a == 1)).astype(np.uint8)
    skel_b = skel_a.copy()
    ea = py_kernels.remove_short_ridges(skel_a, term, 22)
    eb = _speedups.remove_short_ridges(skel_b, term, 22)
    assert ea == eb
    assert np.array_equal(skel_a, skel_b)


@needs_ext
@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("ksize,trim", [(3, 2), (5, 4), (3, 0)])
def test_trimmed_mean_parity(seed, ksize, trim):
    rng = np.random.default_rng(500 + seed)
    img = random_gray(rng, 32, 32)
    assert np.array_equal(
        py_kernels.trimmed_mean_filter(img, ksize, trim),
        _speedups.trimmed_mean_filter(img, ksize, trim),
    )


def test_backend_reports_name():
    from minutia import _kernels

    assert _kernels.KERNEL_BACKEND in ("compiled", "python")
