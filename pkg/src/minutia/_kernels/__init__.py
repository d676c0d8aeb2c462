"""Pixel-kernel backend selection.

The compiled Cython extension is preferred; the NumPy/pure-Python module
is a drop-in replacement chosen when the extension is missing or when
``MINUTIA_PURE_PYTHON`` is set in the environment.  Both backends are
bit-for-bit equivalent (see tests/test_kernels.py).
"""

import os

if os.environ.get("MINUTIA_PURE_PYTHON"):
    from minutia._kernels import py_kernels as _impl

    KERNEL_BACKEND = "python"
else:
    try:
        from minutia._kernels import _speedups as _impl

        KERNEL_BACKEND = "compiled"
    except ImportError:
        from minutia._kernels import py_kernels as _impl

        KERNEL_BACKEND = "python"

crossing_number_map = _impl.crossing_number_map
thin_baseline = _impl.thin_baseline
mark_col_minima = _impl.mark_col_minima
mark_row_minima = _impl.mark_row_minima
repair_dangling = _impl.repair_dangling
remove_short_ridges = _impl.remove_short_ridges
trimmed_mean_filter = _impl.trimmed_mean_filter

__all__ = [
    "KERNEL_BACKEND",
    "crossing_number_map",
    "thin_baseline",
    "mark_col_minima",
    "mark_row_minima",
    "repair_dangling",
    "remove_short_ridges",
    "trimmed_mean_filter",
]
