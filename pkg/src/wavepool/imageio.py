"""Binary PGM/PPM image files.

Reads P5 (grayscale) and P6 (color) with maxval 255 or 65535; multi-byte
samples are big-endian per the netpbm convention.  Pixel values map to
floats in [0,1].  Writers emit 8-bit by default; subband dumps use 16-bit
PGM so that quantization error stays far below one 8-bit gray level after
reconstruction.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeMismatch, UnsupportedFormat


def _read_header_tokens(blob: bytes, count: int):
    """Return ``count`` whitespace-separated tokens after the magic,
    skipping ``#`` comments, plus the offset just past the single
    whitespace byte that terminates the header."""
    tokens = []
    pos = 2  # past magic
    while len(tokens) < count:
        if pos >= len(blob):
            raise UnsupportedFormat("truncated header")
        ch = blob[pos:pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            end = blob.find(b"\n", pos)
            if end < 0:
                raise UnsupportedFormat("unterminated comment")
            pos = end + 1
        else:
            end = pos
            while end < len(blob) and not blob[end:end + 1].isspace():
                end += 1
            tokens.append(blob[pos:end])
            pos = end
    if pos >= len(blob) or not blob[pos:pos + 1].isspace():
        raise UnsupportedFormat("malformed header terminator")
    return tokens, pos + 1


def read_image(path) -> np.ndarray:
    """Read a binary PGM/PPM; returns (H, W) or (3, H, W) floats in [0,1]."""
    with open(path, "rb") as f:
        blob = f.read()
    magic = blob[:2]
    if magic not in (b"P5", b"P6"):
        raise UnsupportedFormat(
            f"{path}: unsupported image magic {magic!r} (binary P5/P6 only)"
        )
    tokens, offset = _read_header_tokens(blob, 3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise UnsupportedFormat(f"{path}: non-numeric header fields") from None
    if maxval not in (255, 65535):
        raise UnsupportedFormat(f"{path}: maxval {maxval} unsupported (255 or 65535)")
    channels = 1 if magic == b"P5" else 3
    count = width * height * channels
    dtype = np.dtype(np.uint8) if maxval == 255 else np.dtype(">u2")
    if len(blob) - offset < count * dtype.itemsize:
        raise UnsupportedFormat(f"{path}: truncated raster")
    raster = np.frombuffer(blob, dtype=dtype, count=count, offset=offset)
    data = raster.astype(np.float64) / maxval
    if channels == 1:
        return data.reshape(height, width)
    return data.reshape(height, width, 3).transpose(2, 0, 1)


def _quantize(image, maxval: int) -> np.ndarray:
    arr = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    levels = np.rint(arr * maxval)
    return levels.astype(np.uint8 if maxval == 255 else np.dtype(">u2"))


def write_pgm(path, image, maxval: int = 255) -> None:
    """Write a (H, W) array of [0,1] floats as binary PGM."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise ShapeMismatch(f"PGM wants a matrix, got shape {image.shape}")
    if maxval not in (255, 65535):
        raise UnsupportedFormat(f"maxval {maxval} unsupported (255 or 65535)")
    h, w = image.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
        f.write(_quantize(image, maxval).tobytes())


def write_ppm(path, image) -> None:
    """Write a (3, H, W) array of [0,1] floats as binary 8-bit PPM."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[0] != 3:
        raise ShapeMismatch(f"PPM wants (3, H, W), got shape {image.shape}")
    _c, h, w = image.shape
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(_quantize(image.transpose(1, 2, 0), 255).tobytes())
