"""Dictionary deduplication of a payload against the container's data part.

A payload is rewritten as a stream of COPY and LITERAL tokens. COPY
references a run of at least ``MIN_RUN`` bytes that already occurs in
the dictionary; LITERAL carries bytes verbatim. The scan is greedy
longest-match, left to right, and ties between equal-length matches go
to the smallest dictionary offset, so the output is deterministic and
independent of the search strategy.

Wire format, little-endian, one tagged record per token:

    COPY     0x01  u32 source_offset  u32 length
    LITERAL  0x02  u32 length         <length> raw bytes
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Union

from .errors import FormatError

MIN_RUN = 16  # a COPY costs 9 wire bytes; shorter runs are not worth referencing

_COPY_TAG = 0x01
_LITERAL_TAG = 0x02
_COPY_BODY = struct.Struct("<II")
_LITERAL_HEAD = struct.Struct("<I")
_U32_MAX = 0xFFFFFFFF


@dataclass(frozen=True)
class CopyToken:
    """A run already present in the dictionary."""

    source_offset: int
    length: int

    def __post_init__(self) -> None:
        if self.source_offset < 0 or self.source_offset > _U32_MAX:
            raise ValueError(f"source offset {self.source_offset} outside u32")
        if not 1 <= self.length <= _U32_MAX:
            raise ValueError(f"copy length {self.length} outside 1..u32")


@dataclass(frozen=True)
class LiteralToken:
    """Bytes carried verbatim."""

    data: bytes

    def __post_init__(self) -> None:
        if len(self.data) < 1:
            raise ValueError("literal token must carry at least one byte")
        if len(self.data) > _U32_MAX:
            raise ValueError("literal token longer than u32")

    @property
    def length(self) -> int:
        return len(self.data)


Token = Union[CopyToken, LiteralToken]


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[Token, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        prev_literal = False
        for tok in self.tokens:
            if isinstance(tok, LiteralToken):
                if prev_literal:
                    raise ValueError("adjacent literal tokens must be coalesced")
                prev_literal = True
            elif isinstance(tok, CopyToken):
                prev_literal = False
            else:
                raise TypeError(f"not a token: {tok!r}")

    @property
    def total_length(self) -> int:
        return sum(tok.length for tok in self.tokens)


def tokenize(sink_data: bytes, dictionary: bytes) -> TokenStream:
    """Greedily rewrite ``sink_data`` against ``dictionary``.

    ``detokenize(tokenize(s, d), d) == s`` for every pair. The match
    search uses an in-memory index of the dictionary's MIN_RUN-grams,
    sized for container data parts, not multi-gigabyte corpora.
    """
    sink_data = bytes(sink_data)
    dictionary = bytes(dictionary)
    index: dict[int, list[int]] = {}
    for p in range(len(dictionary) - MIN_RUN + 1):
        index.setdefault(hash(dictionary[p : p + MIN_RUN]), []).append(p)

    tokens: list[Token] = []
    literal = bytearray()
    n = len(sink_data)
    dict_len = len(dictionary)
    i = 0
    while i < n:
        best_len = 0
        best_off = -1
        remaining = n - i
        if remaining >= MIN_RUN:
            gram = sink_data[i : i + MIN_RUN]
            for p in index.get(hash(gram), ()):
                if dict_len - p <= best_len:
                    break  # positions ascend, later ones are shorter still
                if best_len and dictionary[p + best_len] != sink_data[i + best_len]:
                    continue  # cannot exceed the current best
                if dictionary[p : p + MIN_RUN] != gram:
                    continue  # hash collision
                length = MIN_RUN
                limit = min(remaining, dict_len - p)
                while length < limit and dictionary[p + length] == sink_data[i + length]:
                    length += 1
                if length > best_len:
                    best_len = length
                    best_off = p
                    if best_len == remaining:
                        break
        if best_len >= MIN_RUN:
            if literal:
                tokens.append(LiteralToken(bytes(literal)))
                literal.clear()
            tokens.append(CopyToken(best_off, best_len))
            i += best_len
        else:
            literal.append(sink_data[i])
            i += 1
    if literal:
        tokens.append(LiteralToken(bytes(literal)))
    return TokenStream(tuple(tokens))


def detokenize(stream: TokenStream, dictionary: bytes) -> bytes:
    """Expand a token stream back into payload bytes."""
    out = bytearray()
    for tok in stream.tokens:
        if isinstance(tok, CopyToken):
            if tok.source_offset + tok.length > len(dictionary):
                raise FormatError(
                    f"copy [{tok.source_offset}, +{tok.length}) outside dictionary "
                    f"of {len(dictionary)} bytes"
                )
            out += dictionary[tok.source_offset : tok.source_offset + tok.length]
        else:
            out += tok.data
    return bytes(out)


def serialize_tokens(stream: TokenStream) -> bytes:
    out = bytearray()
    for tok in stream.tokens:
        if isinstance(tok, CopyToken):
            out.append(_COPY_TAG)
            out += _COPY_BODY.pack(tok.source_offset, tok.length)
        else:
            out.append(_LITERAL_TAG)
            out += _LITERAL_HEAD.pack(len(tok.data))
            out += tok.data
    return bytes(out)


def parse_tokens(raw: bytes) -> TokenStream:
    """Exact inverse of :func:`serialize_tokens`; rejects trailing garbage."""
    tokens: list[Token] = []
    pos = 0
    end = len(raw)
    while pos < end:
        tag = raw[pos]
        pos += 1
        try:
            if tag == _COPY_TAG:
                if pos + _COPY_BODY.size > end:
                    raise FormatError("truncated copy token")
                offset, length = _COPY_BODY.unpack_from(raw, pos)
                pos += _COPY_BODY.size
                tokens.append(CopyToken(offset, length))
            elif tag == _LITERAL_TAG:
                if pos + _LITERAL_HEAD.size > end:
                    raise FormatError("truncated literal token")
                (length,) = _LITERAL_HEAD.unpack_from(raw, pos)
                pos += _LITERAL_HEAD.size
                if pos + length > end:
                    raise FormatError("literal token runs past end of stream")
                tokens.append(LiteralToken(raw[pos : pos + length]))
                pos += length
            else:
                raise FormatError(f"unknown token tag 0x{tag:02x}")
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    try:
        return TokenStream(tuple(tokens))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
