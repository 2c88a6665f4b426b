"""Lossless BMP split codec.

A BMP file is handled as two opaque byte runs: the *structural part*
(file header, info header, optional palette) and the *data part* (pixel
bytes and anything after them). The split point is the pixel-data
offset stored little-endian at file bytes 10..13, so palettes of any
size are covered without decoding individual entries.

Only uncompressed files with an info header of at least 40 bytes and a
bit depth of 1, 4, 8, 24 or 32 are accepted. Top-down images (negative
height) are fine. Trailing bytes after the nominal pixel array, such as
an appended payload trailer, stay inside ``data`` and survive the round
trip: ``serialize_bmp(parse_bmp(raw)) == raw`` for every accepted file.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .errors import FormatError

MIN_STRUCTURAL = 54  # 14-byte file header + 40-byte info header

_SUPPORTED_DEPTHS = (1, 4, 8, 24, 32)


@dataclass(frozen=True)
class BmpImage:
    """A parsed BMP, split at the pixel-data offset."""

    structural: bytes
    data: bytes
    width: int
    height: int
    bits_per_pixel: int
    pixel_data_offset: int
    has_palette: bool


def row_stride(width: int, bits_per_pixel: int) -> int:
    """Bytes per pixel row, padded up to a four-byte boundary."""
    return 4 * ((width * bits_per_pixel + 31) // 32)


def parse_bmp(raw: bytes) -> BmpImage:
    """Split ``raw`` into structural and data parts.

    Raises FormatError for anything that is not an uncompressed BMP
    with sane header fields: bad magic, truncated header or pixel
    array, or a pixel-data offset outside the file.
    """
    if len(raw) < MIN_STRUCTURAL:
        raise FormatError(f"file too short for a BMP header ({len(raw)} bytes)")
    if raw[0:2] != b"BM":
        raise FormatError("bad magic, expected 'BM'")
    offset = struct.unpack_from("<I", raw, 10)[0]
    if offset < MIN_STRUCTURAL:
        raise FormatError(f"pixel data offset {offset} overlaps the headers")
    if offset > len(raw):
        raise FormatError(f"pixel data offset {offset} beyond end of file")
    info_size = struct.unpack_from("<I", raw, 14)[0]
    if info_size < 40:
        raise FormatError(f"unsupported info header size {info_size}")
    width, height = struct.unpack_from("<ii", raw, 18)
    bits_per_pixel = struct.unpack_from("<H", raw, 28)[0]
    compression = struct.unpack_from("<I", raw, 30)[0]
    if width < 0:
        raise FormatError(f"negative width {width}")
    if bits_per_pixel not in _SUPPORTED_DEPTHS:
        raise FormatError(f"unsupported bit depth {bits_per_pixel}")
    if compression != 0:
        raise FormatError(f"compressed pixel data (compression={compression})")

    structural = raw[:offset]
    data = raw[offset:]
    if len(data) < row_stride(width, bits_per_pixel) * abs(height):
        raise FormatError("pixel array shorter than width/height imply")
    return BmpImage(
        structural=structural,
        data=data,
        width=width,
        height=height,
        bits_per_pixel=bits_per_pixel,
        pixel_data_offset=offset,
        has_palette=bits_per_pixel <= 8 or offset > 14 + info_size,
    )


def serialize_bmp(img: BmpImage) -> bytes:
    """Reassemble the exact original byte sequence."""
    return img.structural + img.data


def lsb_capacity_bits(img: BmpImage) -> int:
    """Number of embeddable bits: one LSB slot per data-part byte."""
    return len(img.data)
