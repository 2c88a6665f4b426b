"""On-disk trailer appended to a container BMP.

A stego file is the container bytes followed by payload blobs, a
directory describing every hidden sink, and a fixed footer:

    [container BMP][blob 0][blob 1]...[directory][footer]

The container prefix still parses as an ordinary BMP. Everything below
is little-endian.

Footer, always the last 24 bytes of the file:

    offset  size  field
    0       4     magic "SGV1"
    4       1     version, 0x01
    5       1     reserved, 0x00
    6       2     sink_count
    8       8     directory_offset (absolute file offset)
    16      8     original_container_length

Directory: ``sink_count`` records, each prefixed with a u32 body
length. A body is

    u8 method, u8 sub_method, u64 key_tag, u64 sink_total_length,
    structural locator block, data locator block

and a locator block is a mode byte followed by mode-specific fields:

    mode 1  appended blob   u64 offset, u64 length
    mode 2  LSB slots       u64 region base, u32 n, u32 c, u64 bit count
    mode 3  (structural) reused source: u32 source, 0 = container,
            k = k-th embedded sink
    mode 3  (data) tokenized blob: u64 offset, u64 length

Slot bases and slot addresses count from the start of the container's
data part. Blob offsets are absolute file offsets.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

from .bits import SlotParams
from .errors import FormatError

FOOTER_MAGIC = b"SGV1"
FOOTER_VERSION = 1
FOOTER_SIZE = 24

_FOOTER = struct.Struct("<4sBBHQQ")
_ENTRY_LEN = struct.Struct("<I")
_ENTRY_HEAD = struct.Struct("<BBQQ")
_BLOB = struct.Struct("<QQ")
_SLOT = struct.Struct("<QIIQ")
_REUSE = struct.Struct("<I")

_U16_MAX = 0xFFFF
_U32_MAX = 0xFFFFFFFF
_U64_MAX = 0xFFFFFFFFFFFFFFFF


class StructuralMode(Enum):
    APPENDED = 1
    LSB = 2
    REUSED = 3


class DataMode(Enum):
    APPENDED = 1
    LSB = 2
    TOKENIZED = 3


@dataclass(frozen=True)
class BlobLocator:
    """An appended byte range, absolute file offsets."""

    offset: int
    length: int


@dataclass(frozen=True)
class SlotLocator:
    """LSB slots inside the container data part, starting at ``base``."""

    base: int
    params: SlotParams
    bit_count: int


@dataclass(frozen=True)
class ReuseLocator:
    """Structural part borrowed from ``source``: 0 is the container
    itself, k is the k-th embedded sink."""

    source: int


Locator = Union[BlobLocator, SlotLocator, ReuseLocator]


@dataclass(frozen=True)
class StegoFooter:
    sink_count: int
    directory_offset: int
    original_container_length: int


@dataclass(frozen=True)
class SinkEntry:
    method: int
    sub_method: int
    key_tag: int
    sink_total_length: int
    structural_mode: StructuralMode
    structural_locator: Locator
    data_mode: DataMode
    data_locator: Locator


def write_footer(footer: StegoFooter) -> bytes:
    if not 1 <= footer.sink_count <= _U16_MAX:
        raise FormatError(f"sink count {footer.sink_count} outside 1..{_U16_MAX}")
    if not 0 <= footer.original_container_length <= footer.directory_offset <= _U64_MAX:
        raise FormatError("footer offsets inconsistent")
    return _FOOTER.pack(
        FOOTER_MAGIC,
        FOOTER_VERSION,
        0,
        footer.sink_count,
        footer.directory_offset,
        footer.original_container_length,
    )


def read_footer(tail: bytes) -> StegoFooter:
    """Parse the final 24 bytes of ``tail`` as a footer."""
    if len(tail) < FOOTER_SIZE:
        raise FormatError(f"footer needs {FOOTER_SIZE} bytes, got {len(tail)}")
    magic, version, reserved, count, dir_offset, original = _FOOTER.unpack(
        tail[-FOOTER_SIZE:]
    )
    if magic != FOOTER_MAGIC:
        raise FormatError(f"bad footer magic {magic!r}")
    if version != FOOTER_VERSION:
        raise FormatError(f"unsupported footer version {version}")
    if reserved != 0:
        raise FormatError("reserved footer byte is not zero")
    if count < 1:
        raise FormatError("footer declares no sinks")
    if original > dir_offset:
        raise FormatError("footer offsets inconsistent")
    return StegoFooter(
        sink_count=count,
        directory_offset=dir_offset,
        original_container_length=original,
    )


def _check_u64(value: int, what: str) -> None:
    if not 0 <= value <= _U64_MAX:
        raise FormatError(f"{what} {value} outside u64")


def _validate_entry(entry: SinkEntry, index: int) -> None:
    if entry.method not in (1, 2, 3, 4):
        raise FormatError(f"entry {index}: unknown method {entry.method}")
    if entry.method == 4:
        if entry.sub_method not in (2, 3):
            raise FormatError(
                f"entry {index}: method 4 sub-method must be 2 or 3, "
                f"got {entry.sub_method}"
            )
    elif entry.sub_method != 0:
        raise FormatError(
            f"entry {index}: method {entry.method} takes no sub-method"
        )
    _check_u64(entry.key_tag, f"entry {index}: key tag")
    _check_u64(entry.sink_total_length, f"entry {index}: sink length")

    expected = {
        1: (StructuralMode.APPENDED, DataMode.APPENDED),
        2: (StructuralMode.LSB, DataMode.APPENDED),
        3: (StructuralMode.REUSED, DataMode.LSB),
        4: (
            StructuralMode.LSB if entry.sub_method == 2 else StructuralMode.REUSED,
            DataMode.TOKENIZED,
        ),
    }[entry.method]
    if (entry.structural_mode, entry.data_mode) != expected:
        raise FormatError(
            f"entry {index}: method {entry.method} cannot combine "
            f"{entry.structural_mode.name}/{entry.data_mode.name}"
        )

    locator_types = {
        StructuralMode.APPENDED: BlobLocator,
        StructuralMode.LSB: SlotLocator,
        StructuralMode.REUSED: ReuseLocator,
    }
    if not isinstance(entry.structural_locator, locator_types[entry.structural_mode]):
        raise FormatError(f"entry {index}: structural locator type mismatch")
    data_types = {
        DataMode.APPENDED: BlobLocator,
        DataMode.LSB: SlotLocator,
        DataMode.TOKENIZED: BlobLocator,
    }
    if not isinstance(entry.data_locator, data_types[entry.data_mode]):
        raise FormatError(f"entry {index}: data locator type mismatch")
    if entry.method == 1 and entry.structural_locator != entry.data_locator:
        raise FormatError(
            f"entry {index}: method 1 stores one blob, locators must agree"
        )
    if isinstance(entry.structural_locator, ReuseLocator):
        if entry.structural_locator.source > index:
            raise FormatError(
                f"entry {index}: reuse source {entry.structural_locator.source} "
                "points past this entry"
            )


def _pack_locator(loc: Locator, mode_value: int) -> bytes:
    out = bytearray([mode_value])
    if isinstance(loc, BlobLocator):
        _check_u64(loc.offset, "blob offset")
        _check_u64(loc.length, "blob length")
        out += _BLOB.pack(loc.offset, loc.length)
    elif isinstance(loc, SlotLocator):
        _check_u64(loc.base, "slot base")
        _check_u64(loc.bit_count, "bit count")
        if loc.params.n > _U32_MAX or loc.params.c > _U32_MAX:
            raise FormatError("slot params outside u32")
        out += _SLOT.pack(loc.base, loc.params.n, loc.params.c, loc.bit_count)
    elif isinstance(loc, ReuseLocator):
        if not 0 <= loc.source <= _U32_MAX:
            raise FormatError(f"reuse source {loc.source} outside u32")
        out += _REUSE.pack(loc.source)
    else:
        raise FormatError(f"unknown locator {loc!r}")
    return bytes(out)


def write_directory(entries: Sequence[SinkEntry]) -> bytes:
    out = bytearray()
    for index, entry in enumerate(entries):
        _validate_entry(entry, index)
        body = _ENTRY_HEAD.pack(
            entry.method, entry.sub_method, entry.key_tag, entry.sink_total_length
        )
        body += _pack_locator(entry.structural_locator, entry.structural_mode.value)
        body += _pack_locator(entry.data_locator, entry.data_mode.value)
        out += _ENTRY_LEN.pack(len(body))
        out += body
    return bytes(out)


def _unpack_locator(body: bytes, pos: int, structural: bool):
    if pos >= len(body):
        raise FormatError("truncated locator block")
    mode_value = body[pos]
    pos += 1
    mode_enum = StructuralMode if structural else DataMode
    try:
        mode = mode_enum(mode_value)
    except ValueError:
        raise FormatError(f"unknown locator mode {mode_value}") from None
    if mode in (StructuralMode.APPENDED, DataMode.APPENDED, DataMode.TOKENIZED):
        if pos + _BLOB.size > len(body):
            raise FormatError("truncated blob locator")
        offset, length = _BLOB.unpack_from(body, pos)
        return mode, BlobLocator(offset, length), pos + _BLOB.size
    if mode in (StructuralMode.LSB, DataMode.LSB):
        if pos + _SLOT.size > len(body):
            raise FormatError("truncated slot locator")
        base, n, c, bit_count = _SLOT.unpack_from(body, pos)
        try:
            params = SlotParams(n, c)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
        return mode, SlotLocator(base, params, bit_count), pos + _SLOT.size
    # StructuralMode.REUSED
    if pos + _REUSE.size > len(body):
        raise FormatError("truncated reuse locator")
    (source,) = _REUSE.unpack_from(body, pos)
    return mode, ReuseLocator(source), pos + _REUSE.size


def read_directory(raw: bytes, count: int) -> list[SinkEntry]:
    """Parse exactly ``count`` entries; anything left over is an error."""
    entries: list[SinkEntry] = []
    pos = 0
    for index in range(count):
        if pos + _ENTRY_LEN.size > len(raw):
            raise FormatError(f"directory truncated at entry {index}")
        (body_len,) = _ENTRY_LEN.unpack_from(raw, pos)
        pos += _ENTRY_LEN.size
        if pos + body_len > len(raw):
            raise FormatError(f"entry {index} body runs past directory end")
        body = raw[pos : pos + body_len]
        pos += body_len

        if len(body) < _ENTRY_HEAD.size:
            raise FormatError(f"entry {index} body too short")
        method, sub_method, tag, total_length = _ENTRY_HEAD.unpack_from(body, 0)
        cursor = _ENTRY_HEAD.size
        s_mode, s_loc, cursor = _unpack_locator(body, cursor, structural=True)
        d_mode, d_loc, cursor = _unpack_locator(body, cursor, structural=False)
        if cursor != len(body):
            raise FormatError(f"entry {index} has {len(body) - cursor} stray bytes")
        entry = SinkEntry(
            method=method,
            sub_method=sub_method,
            key_tag=tag,
            sink_total_length=total_length,
            structural_mode=s_mode,
            structural_locator=s_loc,
            data_mode=d_mode,
            data_locator=d_loc,
        )
        _validate_entry(entry, index)
        entries.append(entry)
    if pos != len(raw):
        raise FormatError(f"{len(raw) - pos} stray bytes after the directory")
    return entries


def probe_stego(raw: bytes) -> Optional[tuple[StegoFooter, list[SinkEntry]]]:
    """Return the trailer of ``raw`` if there is a consistent one.

    Plain BMPs and malformed candidates return None; this never raises.
    """
    if len(raw) < FOOTER_SIZE:
        return None
    try:
        footer = read_footer(raw[-FOOTER_SIZE:])
    except FormatError:
        return None
    directory_end = len(raw) - FOOTER_SIZE
    if footer.directory_offset >= directory_end:
        return None
    if footer.original_container_length < 54:
        return None
    try:
        entries = read_directory(
            raw[footer.directory_offset : directory_end], footer.sink_count
        )
    except FormatError:
        return None
    for entry in entries:
        for loc in (entry.structural_locator, entry.data_locator):
            if isinstance(loc, BlobLocator):
                if loc.offset < footer.original_container_length:
                    return None
                if loc.offset + loc.length > footer.directory_offset:
                    return None
    return footer, entries
