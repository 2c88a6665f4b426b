"""LSB slot primitives.

A byte region offers one slot per byte: its least significant bit.
Writes move a byte by at most one (odd bytes only ever go down, even
bytes only ever go up, so values never leave 0..255). Several payload
streams can share one region through interleaved slot addressing:
stream ``c`` of ``n`` puts its ``i``-th bit (1-based) at slot

    z = n * i + c

also 1-based, so distinct streams can never collide.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import CapacityExceeded


@dataclass(frozen=True)
class SlotParams:
    """Interleave parameters: ``n`` streams, this one is stream ``c``."""

    n: int
    c: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"stream count must be >= 1, got {self.n}")
        if not 1 <= self.c <= self.n:
            raise ValueError(f"stream index {self.c} outside 1..{self.n}")


def set_lsb_pm1(b: int, bit: int) -> int:
    """Force the LSB of byte ``b`` to ``bit``, moving it by at most 1."""
    if (b & 1) == bit:
        return b
    return b + 1 if bit else b - 1


def bytes_to_bits(data: bytes) -> list[int]:
    """Explode bytes into bits, least significant bit of each byte first."""
    bits = []
    for b in data:
        for _ in range(8):
            bits.append(b & 1)
            b >>= 1
    return bits


def bits_to_bytes(bits: Sequence[int]) -> bytes:
    """Inverse of :func:`bytes_to_bits`; requires a multiple of 8 bits."""
    if len(bits) % 8:
        raise ValueError(f"bit count {len(bits)} is not a multiple of 8")
    out = bytearray(len(bits) // 8)
    for i, bit in enumerate(bits):
        if bit:
            out[i >> 3] |= 1 << (i & 7)
    return bytes(out)


def slot_address(params: SlotParams, bit_index: int) -> int:
    """1-based byte index holding bit ``bit_index`` (1-based) of this stream."""
    if bit_index < 1:
        raise ValueError(f"bit index must be >= 1, got {bit_index}")
    return params.n * bit_index + params.c


def embed_bits(region: bytes, bits: Sequence[int], params: SlotParams) -> bytes:
    """Return a copy of ``region`` with ``bits`` written to this stream's slots.

    Only addressed bytes change, each by at most 1. Raises
    CapacityExceeded if the last slot would fall outside the region.
    """
    top = params.n * len(bits) + params.c
    if top > len(region):
        raise CapacityExceeded(
            f"need slot {top} but region holds only {len(region)} bytes"
        )
    out = bytearray(region)
    pos = params.n + params.c - 1  # slot_address(params, 1), zero-based
    for bit in bits:
        out[pos] = set_lsb_pm1(out[pos], bit)
        pos += params.n
    return bytes(out)


def extract_bits(region: bytes, count: int, params: SlotParams) -> list[int]:
    """Read ``count`` bits back from this stream's slots."""
    top = params.n * count + params.c
    if top > len(region):
        raise CapacityExceeded(
            f"need slot {top} but region holds only {len(region)} bytes"
        )
    pos = params.n + params.c - 1
    bits = []
    for _ in range(count):
        bits.append(region[pos] & 1)
        pos += params.n
    return bits
