"""Shared fixtures: a BMP builder independent of the codec under test,
and the randomized embed/extract corpus used by several test modules."""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass, field

import pytest

from bmpstego import (
    StegoKey,
    embed_append,
    embed_auto,
    embed_data_dedup,
    embed_lsb_adjust,
    embed_structural_reuse,
    parse_bmp,
)


def make_bmp(
    width: int,
    height: int,
    bpp: int = 24,
    data: bytes | None = None,
    trailing: bytes = b"",
    rng: random.Random | None = None,
    palette: bytes | None = None,
) -> bytes:
    """Build a BMP byte string with struct, not with the codec under test.

    The size field records the nominal image (headers + pixel array);
    ``trailing`` bytes ride behind the pixel array the way a previously
    appended payload would.
    """
    stride = 4 * ((width * bpp + 31) // 32)
    body_len = stride * abs(height)
    if data is None:
        r = rng or random.Random(0)
        data = bytes(r.randrange(256) for _ in range(body_len))
    if len(data) != body_len:
        raise ValueError(f"data must be {body_len} bytes, got {len(data)}")
    if bpp <= 8 and palette is None:
        palette = bytes(i % 256 for i in range(4 * (1 << bpp)))
    palette = palette or b""
    offset = 14 + 40 + len(palette)
    header = struct.pack("<2sIHHI", b"BM", offset + body_len, 0, 0, offset)
    info = struct.pack(
        "<IiiHHIIiiII", 40, width, height, 1, bpp, 0, body_len, 2835, 2835, 0, 0
    )
    return header + info + palette + data + trailing


def similar_data(base: bytes, rng: random.Random, keep_run: int, drop_run: int) -> bytes:
    """Copy ``base`` but overwrite ``drop_run`` fresh bytes after every
    ``keep_run`` kept bytes, so matches survive in runs of ``keep_run``."""
    out = bytearray(base)
    period = keep_run + drop_run
    for start in range(keep_run, len(out), period):
        for i in range(start, min(start + drop_run, len(out))):
            out[i] = rng.randrange(256)
    return bytes(out)


KEY_ALPHABET = (
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789!#$%&+-=_"
)


def random_key(rng: random.Random, max_len: int = 32) -> StegoKey:
    """Random 1..max_len byte key; printable so it can also travel
    through the command line unchanged."""
    length = rng.randint(1, max_len)
    return StegoKey("".join(rng.choice(KEY_ALPHABET) for _ in range(length)).encode())


def flip_one_key_byte(key: StegoKey) -> StegoKey:
    """A key differing from ``key`` in exactly one byte, still printable."""
    data = bytearray(key.data)
    i = len(data) // 2
    original = chr(data[i])
    replacement = KEY_ALPHABET[(KEY_ALPHABET.index(original) + 1) % len(KEY_ALPHABET)] \
        if original in KEY_ALPHABET else "x"
    data[i] = ord(replacement)
    return StegoKey(bytes(data))


@dataclass
class CorpusCase:
    name: str
    container: bytes
    sinks: list[bytes]
    keys: list[StegoKey]
    artifact: object
    method_one_prefix: bool = False  # payload appended only, prefix untouched
    extras: dict = field(default_factory=dict)


def _case_auto(rng: random.Random, bpp: int, side: int) -> CorpusCase:
    container = make_bmp(side, side, bpp=bpp, rng=rng)
    img = parse_bmp(container)
    count = rng.randint(1, 3)
    sinks, keys = [], []
    for i in range(count):
        if i == 0 and rng.random() < 0.5:
            # same structural as the container, similar data
            sinks.append(
                make_bmp(side, side, bpp=bpp, data=similar_data(img.data, rng, 48, 32))
            )
        else:
            small = rng.randint(1, max(2, side // 4))
            sinks.append(make_bmp(small, small, bpp=24, rng=rng))
        keys.append(random_key(rng))
    artifact = embed_auto(img, list(zip(sinks, keys)))
    return CorpusCase(
        name=f"auto-{bpp}bpp-{side}", container=container, sinks=sinks,
        keys=keys, artifact=artifact,
    )


def _case_method(rng: random.Random, method: int, bpp: int, side: int) -> CorpusCase:
    if method == 1:
        container = make_bmp(side, side, bpp=bpp, rng=rng)
        sink = make_bmp(rng.randint(1, 2 * side), rng.randint(1, side), rng=rng)
        key = random_key(rng)
        artifact = embed_append(parse_bmp(container), sink, key)
        return CorpusCase(
            name=f"m1-{bpp}bpp-{side}", container=container, sinks=[sink],
            keys=[key], artifact=artifact, method_one_prefix=True,
        )
    if method == 2:
        container = make_bmp(max(side, 32), max(side, 32), bpp=24, rng=rng)
        count = rng.randint(1, 3)
        sinks = [make_bmp(rng.randint(1, 6), rng.randint(1, 6), rng=rng) for _ in range(count)]
        keys = [random_key(rng) for _ in range(count)]
        artifact = embed_lsb_adjust(parse_bmp(container), list(zip(sinks, keys)))
        return CorpusCase(
            name=f"m2-{count}sinks-{side}", container=container, sinks=sinks,
            keys=keys, artifact=artifact,
        )
    if method == 3:
        sink = make_bmp(side, side, bpp=bpp, rng=rng)
        sink_img = parse_bmp(sink)
        pad = 8 * (len(sink_img.data) + 2 * 32) + 64
        container = make_bmp(
            side, side, bpp=bpp, rng=rng,
            trailing=bytes(rng.randrange(256) for _ in range(pad)),
        )
        key = random_key(rng)
        artifact = embed_structural_reuse(parse_bmp(container), sink, key)
        return CorpusCase(
            name=f"m3-{bpp}bpp-{side}", container=container, sinks=[sink],
            keys=[key], artifact=artifact,
        )
    # method 4, both sub-methods
    container = make_bmp(max(side, 24), max(side, 24), bpp=24, rng=rng)
    img = parse_bmp(container)
    sub = rng.choice([2, 3])
    if sub == 3:
        sink = make_bmp(
            max(side, 24), max(side, 24), bpp=24,
            data=similar_data(img.data, rng, 40, 24),
        )
    else:
        small = rng.randint(2, 8)
        sink = make_bmp(small, small, rng=rng)
    key = random_key(rng)
    artifact = embed_data_dedup(img, sink, key, sub)
    return CorpusCase(
        name=f"m4s{sub}-{side}", container=container, sinks=[sink],
        keys=[key], artifact=artifact,
    )


def build_corpus(seed: int = 1234, target: int = 200) -> list[CorpusCase]:
    rng = random.Random(seed)
    cases: list[CorpusCase] = []
    sides = [2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64]
    while len(cases) < target:
        side = rng.choice(sides)
        bpp = rng.choice([8, 24])
        kind = rng.randrange(5)
        if kind == 0:
            cases.append(_case_auto(rng, bpp, side))
        else:
            cases.append(_case_method(rng, kind, bpp, side))
    return cases


@pytest.fixture(scope="session")
def corpus() -> list[CorpusCase]:
    return build_corpus()


@pytest.fixture()
def rng() -> random.Random:
    return random.Random(99)
