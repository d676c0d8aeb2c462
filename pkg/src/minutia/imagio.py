"""Gray-scale image container, binary PGM I/O, and shared block utilities.

Images are plain 2-D NumPy arrays: ``uint8`` for gray images, ``uint8``
with values {0, 1} for binary images, ``float64`` for intermediates.
Arrays are treated as immutable once constructed; every operation here
returns a fresh array.
"""

from __future__ import annotations

import numpy as np

MAX_SIDE = 1 << 16


class PgmError(ValueError):
    """Malformed or unsupported PGM input."""


def as_gray(data, width: int | None = None, height: int | None = None) -> np.ndarray:
    """Validate and return a uint8 gray image array.

    Accepts a 2-D array-like, or a flat sequence plus width/height.
    """
    if width is not None and height is not None:
        arr = np.asarray(data).reshape(height, width)
    else:
        arr = np.asarray(data)
    if arr.ndim != 2:
        raise ValueError("gray image must be 2-D")
    if arr.shape[0] <= 0 or arr.shape[1] <= 0:
        raise ValueError("image dimensions must be positive")
    if np.issubdtype(arr.dtype, np.floating):
        raise ValueError("gray image must hold integers")
    if arr.min() < 0 or arr.max() > 255:
        raise ValueError("gray values must lie in [0, 255]")
    return arr.astype(np.uint8)


def as_binary(data) -> np.ndarray:
    arr = np.asarray(data)
    if arr.ndim != 2:
        raise ValueError("binary image must be 2-D")
    vals = np.unique(arr)
    if not np.all(np.isin(vals, (0, 1))):
        raise ValueError("binary image values must be 0 or 1")
    return arr.astype(np.uint8)


def quantize(arr: np.ndarray) -> np.ndarray:
    """Real-valued image -> uint8: round half away from zero, clamp to [0, 255].

    This is the single quantization rule used everywhere a float image is
    converted back to 8-bit, so results do not drift with rounding modes.
    """
    a = np.asarray(arr, dtype=np.float64)
    rounded = np.sign(a) * np.floor(np.abs(a) + 0.5)
    return np.clip(rounded, 0, 255).astype(np.uint8)


def read_pgm(data: bytes) -> np.ndarray:
    """Decode a binary (P5) portable graymap with maxval <= 255.

    Comment lines (``#`` to end of line) may appear between header tokens.
    """
    if not isinstance(data, (bytes, bytearray, memoryview)):
        raise PgmError("expected a byte sequence")
    buf = bytes(data)

    pos = 0

    def skip_ws_and_comments(p: int) -> int:
        while p < len(buf):
            c = buf[p : p + 1]
            if c in (b" ", b"\t", b"\r", b"\n"):
                p += 1
            elif c == b"#":
                while p < len(buf) and buf[p : p + 1] not in (b"\n", b"\r"):
                    p += 1
            else:
                break
        return p

    def read_token(p: int) -> tuple[bytes, int]:
        p = skip_ws_and_comments(p)
        start = p
        while p < len(buf) and buf[p : p + 1] not in (b" ", b"\t", b"\r", b"\n", b"#"):
            p += 1
        if p == start:
            raise PgmError("truncated header")
        return buf[start:p], p

    magic, pos = read_token(pos)
    if magic != b"P5":
        raise PgmError(f"bad magic {magic!r}, expected b'P5'")

    fields = []
    for name in ("width", "height", "maxval"):
        tok, pos = read_token(pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise PgmError(f"non-numeric {name} token {tok!r}") from None
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise PgmError("non-positive image dimensions")
    if width >= MAX_SIDE or height >= MAX_SIDE:
        raise PgmError("image side exceeds supported maximum")
    if not 0 < maxval <= 255:
        raise PgmError(f"unsupported maxval {maxval}")

    # exactly one whitespace byte separates the header from the raster
    if pos >= len(buf) or buf[pos : pos + 1] not in (b" ", b"\t", b"\r", b"\n"):
        raise PgmError("missing whitespace before raster")
    pos += 1

    n = width * height
    raster = buf[pos : pos + n]
    if len(raster) < n:
        raise PgmError("truncated pixel data")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(img: np.ndarray) -> bytes:
    """Encode a gray image as binary PGM; output is byte-stable."""
    arr = as_gray(img)
    h, w = arr.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    return header + arr.tobytes()


def load_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return read_pgm(fh.read())


def save_pgm(path, img: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(write_pgm(img))


def block_grid(img: np.ndarray, block_size: int) -> tuple[int, int]:
    """Number of (rows, cols) of full blocks after truncating the image
    down to multiples of ``block_size``."""
    h, w = img.shape
    return h // block_size, w // block_size


def block_view(img: np.ndarray, block_row: int, block_col: int, block_size: int) -> np.ndarray:
    """Return one block of the image truncated to whole blocks."""
    nbr, nbc = block_grid(img, block_size)
    if not (0 <= block_row < nbr and 0 <= block_col < nbc):
        raise IndexError(
            f"block ({block_row}, {block_col}) outside {nbr}x{nbc} grid"
        )
    r = block_row * block_size
    c = block_col * block_size
    return img[r : r + block_size, c : c + block_size]
