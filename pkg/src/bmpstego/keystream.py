"""Per-sink secrets: key container, verification tag, repeating-key XOR
keystream, and the key delimiters wrapped around every payload.

The delimiters sit *inside* the enciphered region and the cleartext
directory stores only a 64-bit FNV-1a tag of the key, so the key bytes
never appear verbatim in a stego file. Repeating-key XOR is
obfuscation, not real cryptography; see the README for the threat
model.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DelimiterMismatch

FNV64_OFFSET_BASIS = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class StegoKey:
    """Secret byte string guarding one sink; 1 to 255 bytes."""

    data: bytes

    def __post_init__(self) -> None:
        if not isinstance(self.data, (bytes, bytearray)):
            raise TypeError("key material must be bytes")
        if not 1 <= len(self.data) <= 255:
            raise ValueError("key must be 1 to 255 bytes long")
        object.__setattr__(self, "data", bytes(self.data))

    def __repr__(self) -> str:  # keep key bytes out of logs and tracebacks
        return f"StegoKey(<{len(self.data)} bytes>)"

    @classmethod
    def from_text(cls, text: str) -> "StegoKey":
        return cls(text.encode("utf-8"))


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = FNV64_OFFSET_BASIS
    for b in data:
        h ^= b
        h = (h * FNV64_PRIME) & _MASK64
    return h


def key_tag(key: StegoKey) -> int:
    """Tag stored in the cleartext directory to verify a key cheaply."""
    return fnv1a64(key.data)


def xor_keystream(data: bytes, key: StegoKey) -> bytes:
    """XOR ``data`` with the key repeated; applying twice restores it."""
    k = key.data
    n = len(k)
    return bytes(b ^ k[i % n] for i, b in enumerate(data))


def wrap_with_delimiters(payload: bytes, key: StegoKey) -> bytes:
    """Place the key bytes immediately before and after the payload."""
    return key.data + payload + key.data


def unwrap_delimiters(wrapped: bytes, key: StegoKey) -> bytes:
    """Strip and verify the delimiters added by :func:`wrap_with_delimiters`."""
    k = key.data
    n = len(k)
    if len(wrapped) < 2 * n or wrapped[:n] != k or wrapped[-n:] != k:
        raise DelimiterMismatch("payload delimiters do not match the key")
    return wrapped[n : len(wrapped) - n]


def protect(payload: bytes, key: StegoKey) -> bytes:
    """Delimit then encipher: the form every payload takes in a stego file."""
    return xor_keystream(wrap_with_delimiters(payload, key), key)


def unprotect(blob: bytes, key: StegoKey) -> bytes:
    """Inverse of :func:`protect`; raises DelimiterMismatch on a wrong key."""
    return unwrap_delimiters(xor_keystream(blob, key), key)
