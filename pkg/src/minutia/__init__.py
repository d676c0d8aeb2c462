"""Fingerprint recognition and data-hiding toolkit.

Gray-scale ridge thinning, core-point detection, crossing-number minutiae
extraction, track-based minutiae-table matching, FAR/FRR/EER evaluation,
and a two-key amplitude-modulation watermark that hides a fingerprint's
own minutiae table inside its image.
"""

from minutia._kernels import KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
