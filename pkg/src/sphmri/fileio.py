"""Flat-file formats for images, masks and tables.

Complex images travel in a tiny self-describing binary format: an 8-byte
magic string followed by row-major interleaved (real, imag) float64 pairs in
little-endian order.  Real-valued tables use plain CSV.  PNG output is for
eyeballs only; magnitudes are rescaled to the 8-bit range on save, so PNGs
never round-trip.
"""

from __future__ import annotations

import math
import os

import numpy as np
from PIL import Image

COMPLEX_IMAGE_MAGIC = b"CIMG0001"


class FileFormatError(Exception):
    """Raised when a file does not parse as the expected format."""


def save_complex_image(path: str | os.PathLike, image: np.ndarray) -> None:
    """Write a square complex image in the interleaved binary format."""
    image = np.asarray(image, dtype=complex)
    if image.ndim != 2 or image.shape[0] != image.shape[1]:
        raise ValueError("only square 2-D images are supported")
    interleaved = np.empty(image.size * 2, dtype="<f8")
    interleaved[0::2] = image.real.ravel(order="C")
    interleaved[1::2] = image.imag.ravel(order="C")
    with open(path, "wb") as fh:
        fh.write(COMPLEX_IMAGE_MAGIC)
        fh.write(interleaved.tobytes())


def load_complex_image(path: str | os.PathLike) -> np.ndarray:
    """Read a square complex image written by :func:`save_complex_image`.

    The side length is inferred from the payload size; a payload that is not
    twice a perfect square of float64 values is rejected.
    """
    with open(path, "rb") as fh:
        magic = fh.read(len(COMPLEX_IMAGE_MAGIC))
        if magic != COMPLEX_IMAGE_MAGIC:
            raise FileFormatError(f"{path}: bad magic {magic!r}")
        payload = fh.read()
    if len(payload) % 16 != 0:
        raise FileFormatError(f"{path}: payload is not whole (re, im) float64 pairs")
    count = len(payload) // 16
    side = math.isqrt(count)
    if side * side != count:
        raise FileFormatError(f"{path}: {count} pixels is not a square image")
    interleaved = np.frombuffer(payload, dtype="<f8")
    image = interleaved[0::2] + 1j * interleaved[1::2]
    return image.reshape(side, side)


def save_real_csv(path: str | os.PathLike, array: np.ndarray, header: str = "") -> None:
    """Write a real 2-D array as CSV with full float64 precision."""
    array = np.asarray(array, dtype=float)
    if array.ndim == 1:
        array = array[None, :]
    lines = []
    if header:
        lines.append(header)
    for row in array:
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_real_csv(path: str | os.PathLike, skip_header: bool = False) -> np.ndarray:
    """Read a numeric CSV written by :func:`save_real_csv`."""
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for k, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            if k == 0 and skip_header:
                continue
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError as exc:
                raise FileFormatError(f"{path}: non-numeric row {k}") from exc
    if not rows:
        raise FileFormatError(f"{path}: no data rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FileFormatError(f"{path}: ragged rows")
    return np.array(rows, dtype=float)


def save_magnitude_png(path: str | os.PathLike, image: np.ndarray) -> None:
    """Write ``|image|`` as an 8-bit grayscale PNG, peak-normalized."""
    mag = np.abs(np.asarray(image))
    peak = mag.max()
    if peak > 0:
        mag = mag / peak
    Image.fromarray((mag * 255.0).round().astype(np.uint8), mode="L").save(path)


def save_mask_png(path: str | os.PathLike, mask: np.ndarray) -> None:
    """Write a boolean mask as a 0/255 PNG, layout untouched."""
    arr = np.asarray(mask).astype(bool)
    Image.fromarray(np.where(arr, 255, 0).astype(np.uint8), mode="L").save(path)


def load_mask(path: str | os.PathLike) -> np.ndarray:
    """Read a sampling mask from a PNG (threshold 127) or a complex image.

    Complex-image masks treat any nonzero pixel as sampled.
    """
    path = os.fspath(path)
    if path.lower().endswith(".png"):
        arr = np.asarray(Image.open(path).convert("L"))
        return arr > 127
    return np.abs(load_complex_image(path)) != 0
