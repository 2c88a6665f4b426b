"""The four embedding methods, the automatic selector, and extraction.

Method 1 (append)            the whole sink rides behind the container.
Method 2 (LSB adjust)        sink structural parts go into interleaved
                             LSB slots, data parts are appended.
Method 3 (structural reuse)  the structural part is borrowed from an
                             identical one already present, the data
                             part goes into LSB slots.
Method 4 (data dedup)        the data part is tokenized against the
                             container's data part and the token stream
                             appended; the structural part is handled
                             like method 2 (sub-method 2) or method 3
                             (sub-method 3).

Every stored payload is wrapped in key delimiters and XOR-enciphered
with its sink's key. A cleartext directory plus footer makes extraction
deterministic; extracting sink ``i`` needs nothing but the stego file
and key ``i``.

Two layout rules keep multi-sink files consistent:

* LSB slot regions are allocated left to right and never reused, so a
  later embed invocation cannot disturb earlier payload bits.
* Token streams reference the data part as it stands after all LSB
  writes of their own invocation. Once a file contains a tokenized
  sink its data bytes are pinned: later invocations report zero free
  slots and fall back to appending, which leaves the dictionary intact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .bits import (
    SlotParams,
    bits_to_bytes,
    bytes_to_bits,
    embed_bits,
    extract_bits,
)
from .bmp import BmpImage, lsb_capacity_bits, parse_bmp, serialize_bmp
from .container import (
    FOOTER_SIZE,
    BlobLocator,
    DataMode,
    ReuseLocator,
    SinkEntry,
    SlotLocator,
    StegoFooter,
    StructuralMode,
    probe_stego,
    read_footer,
    write_directory,
    write_footer,
)
from .errors import (
    CapacityExceeded,
    FormatError,
    IndexOutOfRange,
    KeyMismatch,
    StructuralMismatch,
)
from .keystream import StegoKey, key_tag, protect, unprotect
from .tokens import detokenize, parse_tokens, serialize_tokens, tokenize

_LITERAL_WIRE_OVERHEAD = 5  # literal token tag + u32 length


@dataclass(frozen=True)
class EmbedPlan:
    """Selector output: how one sink will be stored."""

    method: int
    sub_method: int
    structural_mode: StructuralMode
    data_mode: DataMode
    slot_params: Optional[SlotParams] = None
    reuse_source: Optional[int] = None
    estimated_appended_bytes: int = 0


@dataclass(frozen=True)
class SinkSavings:
    index: int
    method: int
    sub_method: int
    original_bytes: int
    appended_bytes: int
    lsb_bits_used: int

    @property
    def saved_bytes(self) -> int:
        return self.original_bytes - self.appended_bytes


@dataclass(frozen=True)
class SavingsReport:
    """File-growth accounting: growth equals appended payload bytes plus
    the directory and footer overhead."""

    sinks: tuple[SinkSavings, ...]
    total_original_bytes: int
    total_appended_bytes: int
    overhead_bytes: int
    saved_bytes: int
    saved_fraction: float


@dataclass(frozen=True)
class StegoArtifact:
    bytes: bytes
    entries: tuple[SinkEntry, ...]
    report: SavingsReport


def _entry_appended_bytes(entry: SinkEntry) -> int:
    if entry.method == 1:
        return entry.structural_locator.length
    if isinstance(entry.data_locator, BlobLocator):
        return entry.data_locator.length
    return 0


def _entry_lsb_bits(entry: SinkEntry) -> int:
    bits = 0
    for loc in (entry.structural_locator, entry.data_locator):
        if isinstance(loc, SlotLocator):
            bits += loc.bit_count
    return bits


def _build_report(
    entries: Sequence[SinkEntry], overhead_bytes: int
) -> SavingsReport:
    sinks = tuple(
        SinkSavings(
            index=i,
            method=e.method,
            sub_method=e.sub_method,
            original_bytes=e.sink_total_length,
            appended_bytes=_entry_appended_bytes(e),
            lsb_bits_used=_entry_lsb_bits(e),
        )
        for i, e in enumerate(entries)
    )
    total_original = sum(s.original_bytes for s in sinks)
    total_appended = sum(s.appended_bytes for s in sinks)
    saved = total_original - total_appended
    return SavingsReport(
        sinks=sinks,
        total_original_bytes=total_original,
        total_appended_bytes=total_appended,
        overhead_bytes=overhead_bytes,
        saved_bytes=saved,
        saved_fraction=saved / total_original if total_original else 0.0,
    )


def savings_report(artifact: StegoArtifact) -> SavingsReport:
    """Recompute the report from the artifact's directory alone."""
    footer = read_footer(artifact.bytes[-FOOTER_SIZE:])
    overhead = len(artifact.bytes) - footer.directory_offset
    return _build_report(artifact.entries, overhead)


def _slot_high_water(entries: Sequence[SinkEntry]) -> int:
    """First data-part byte index past every allocated slot region.

    A region interleaving n streams spans n * max_bits + n bytes; using
    n rather than c below reproduces that bound exactly for the widest
    stream of each group.
    """
    mark = 0
    for entry in entries:
        for loc in (entry.structural_locator, entry.data_locator):
            if isinstance(loc, SlotLocator):
                mark = max(mark, loc.base + loc.params.n * loc.bit_count + loc.params.n)
    return mark


@dataclass
class _Staged:
    method: int
    sub_method: int
    key: StegoKey
    sink_length: int
    structural_mode: StructuralMode
    structural_locator: Union[SlotLocator, ReuseLocator, None]
    data_mode: DataMode
    blob: Optional[bytes]  # None while a tokenized blob is pending
    data_slots: Optional[SlotLocator] = None  # method 3: data lives in slots
    pending_data: Optional[bytes] = None  # sink data awaiting tokenization
    whole_sink_blob: bool = False  # method 1: one blob covers the sink


class _StegoWriter:
    """Accumulates sinks onto a container (or an existing stego file)
    and assembles the new stego file in one pass."""

    def __init__(self, base: bytes):
        probed = probe_stego(base)
        if probed is None:
            self.image = parse_bmp(base)
            self.original_length = len(base)
            self.entries: list[SinkEntry] = []
            self.blobs = bytearray()
        else:
            footer, entries = probed
            self.original_length = footer.original_container_length
            self.image = parse_bmp(base[: self.original_length])
            self.entries = list(entries)
            self.blobs = bytearray(base[self.original_length : footer.directory_offset])
        self.data = bytearray(self.image.data)
        self.high_water = _slot_high_water(self.entries)
        # Existing token streams reference the data part byte-for-byte,
        # so no further LSB writes may touch it.
        self.lsb_frozen = any(
            e.data_mode is DataMode.TOKENIZED for e in self.entries
        )
        self.staged: list[_Staged] = []

    # -- capacity ---------------------------------------------------------

    def total_slots(self) -> int:
        return len(self.data)

    def free_slots(self) -> int:
        if self.lsb_frozen:
            return 0
        return len(self.data) - self.high_water

    def reusable_structurals(self) -> list[tuple[int, bytes]]:
        """Structural parts recoverable without any other sink's key,
        as (reuse source, bytes) pairs."""
        return [(0, self.image.structural)]

    def _find_reuse_source(self, structural: bytes) -> Optional[int]:
        for source, candidate in self.reusable_structurals():
            if candidate == structural:
                return source
        return None

    def _claim_slots(self, params: SlotParams, bit_counts: Sequence[int]) -> int:
        """Reserve one interleaved region for ``params.n`` streams and
        return its base. Raises CapacityExceeded before anything is
        written."""
        need = params.n * max(bit_counts) + params.n
        free = self.free_slots()
        if need > free:
            raise CapacityExceeded(
                f"need {need} LSB slots but only {free} are free"
            )
        base = self.high_water
        self.high_water = base + need
        return base

    def _write_slots(self, base: int, params: SlotParams, bits: Sequence[int]) -> None:
        region = embed_bits(bytes(self.data[base:]), bits, params)
        self.data[base:] = region

    # -- staging ----------------------------------------------------------

    def add_append(self, sink: bytes, key: StegoKey) -> None:
        parse_bmp(sink)  # reject non-BMP payloads up front
        blob = protect(sink, key)
        self.staged.append(
            _Staged(
                method=1,
                sub_method=0,
                key=key,
                sink_length=len(sink),
                structural_mode=StructuralMode.APPENDED,
                structural_locator=None,
                data_mode=DataMode.APPENDED,
                blob=blob,
                whole_sink_blob=True,
            )
        )

    def add_lsb_group(self, sinks: Sequence[tuple[bytes, StegoKey]]) -> None:
        if not sinks:
            raise ValueError("need at least one sink")
        images = [parse_bmp(raw) for raw, _ in sinks]
        payloads = [
            protect(img.structural, key) for img, (_, key) in zip(images, sinks)
        ]
        bit_counts = [8 * len(p) for p in payloads]
        n = len(sinks)
        base = self._claim_slots(SlotParams(n, 1), bit_counts)
        for i, (payload, img, (raw, key)) in enumerate(zip(payloads, images, sinks)):
            params = SlotParams(n, i + 1)
            self._write_slots(base, params, bytes_to_bits(payload))
            self.staged.append(
                _Staged(
                    method=2,
                    sub_method=0,
                    key=key,
                    sink_length=len(raw),
                    structural_mode=StructuralMode.LSB,
                    structural_locator=SlotLocator(base, params, bit_counts[i]),
                    data_mode=DataMode.APPENDED,
                    blob=protect(img.data, key),
                )
            )

    def add_structural_reuse(self, sink: bytes, key: StegoKey) -> None:
        img = parse_bmp(sink)
        source = self._find_reuse_source(img.structural)
        if source is None:
            raise StructuralMismatch(
                "no identical structural part to reuse for this sink"
            )
        payload = protect(img.data, key)
        params = SlotParams(1, 1)
        bit_count = 8 * len(payload)
        base = self._claim_slots(params, [bit_count])
        self._write_slots(base, params, bytes_to_bits(payload))
        self.staged.append(
            _Staged(
                method=3,
                sub_method=0,
                key=key,
                sink_length=len(sink),
                structural_mode=StructuralMode.REUSED,
                structural_locator=ReuseLocator(source),
                data_mode=DataMode.LSB,
                blob=None,
                data_slots=SlotLocator(base, params, bit_count),
            )
        )

    def add_data_dedup(self, sink: bytes, key: StegoKey, sub_method: int) -> None:
        if sub_method not in (2, 3):
            raise ValueError(f"sub-method must be 2 or 3, got {sub_method}")
        img = parse_bmp(sink)
        if sub_method == 3:
            source = self._find_reuse_source(img.structural)
            if source is None:
                raise StructuralMismatch(
                    "no identical structural part to reuse; sub-method 2 "
                    "stores the structural part in LSB slots instead"
                )
            structural_mode = StructuralMode.REUSED
            structural_locator: Union[SlotLocator, ReuseLocator] = ReuseLocator(source)
        else:
            payload = protect(img.structural, key)
            params = SlotParams(1, 1)
            bit_count = 8 * len(payload)
            base = self._claim_slots(params, [bit_count])
            self._write_slots(base, params, bytes_to_bits(payload))
            structural_mode = StructuralMode.LSB
            structural_locator = SlotLocator(base, params, bit_count)
        self.staged.append(
            _Staged(
                method=4,
                sub_method=sub_method,
                key=key,
                sink_length=len(sink),
                structural_mode=structural_mode,
                structural_locator=structural_locator,
                data_mode=DataMode.TOKENIZED,
                blob=None,
                pending_data=img.data,
            )
        )

    def add_planned(self, sink: bytes, key: StegoKey, plan: EmbedPlan) -> None:
        if plan.method == 1:
            self.add_append(sink, key)
        elif plan.method == 2:
            self.add_lsb_group([(sink, key)])
        elif plan.method == 3:
            self.add_structural_reuse(sink, key)
        elif plan.method == 4:
            self.add_data_dedup(sink, key, plan.sub_method)
        else:
            raise ValueError(f"unknown method {plan.method}")

    # -- assembly ---------------------------------------------------------

    def finish(self) -> StegoArtifact:
        if not self.staged and not self.entries:
            raise ValueError("nothing to embed")
        # All LSB writes are done; token streams may now reference the
        # final data part.
        dictionary = bytes(self.data)
        cursor = self.original_length + len(self.blobs)
        new_blobs = bytearray()
        new_entries: list[SinkEntry] = []
        for staged in self.staged:
            if staged.data_mode is DataMode.TOKENIZED:
                stream = tokenize(staged.pending_data, dictionary)
                staged.blob = protect(serialize_tokens(stream), staged.key)
            if staged.blob is not None:
                locator = BlobLocator(cursor, len(staged.blob))
                new_blobs += staged.blob
                cursor += len(staged.blob)
            else:
                locator = None

            if staged.whole_sink_blob:
                structural_locator: object = locator
                data_locator: object = locator
            else:
                structural_locator = staged.structural_locator
                data_locator = locator if locator is not None else staged.data_slots
            new_entries.append(
                SinkEntry(
                    method=staged.method,
                    sub_method=staged.sub_method,
                    key_tag=key_tag(staged.key),
                    sink_total_length=staged.sink_length,
                    structural_mode=staged.structural_mode,
                    structural_locator=structural_locator,
                    data_mode=staged.data_mode,
                    data_locator=data_locator,
                )
            )

        all_entries = self.entries + new_entries
        directory = write_directory(all_entries)
        directory_offset = self.original_length + len(self.blobs) + len(new_blobs)
        footer = StegoFooter(
            sink_count=len(all_entries),
            directory_offset=directory_offset,
            original_container_length=self.original_length,
        )
        out = (
            self.image.structural
            + self.data
            + self.blobs
            + new_blobs
            + directory
            + write_footer(footer)
        )
        report = _build_report(all_entries, len(directory) + FOOTER_SIZE)
        return StegoArtifact(
            bytes=bytes(out), entries=tuple(all_entries), report=report
        )


# -- public embedding operations -----------------------------------------


def embed_append(
    container: BmpImage, sink: bytes, key: StegoKey
) -> StegoArtifact:
    """Method 1: append the whole sink behind the container bytes."""
    writer = _StegoWriter(serialize_bmp(container))
    writer.add_append(sink, key)
    return writer.finish()


def embed_lsb_adjust(
    container: BmpImage, sinks: Sequence[tuple[bytes, StegoKey]]
) -> StegoArtifact:
    """Method 2: interleave the sinks' structural parts into LSB slots
    and append their data parts."""
    writer = _StegoWriter(serialize_bmp(container))
    writer.add_lsb_group(sinks)
    return writer.finish()


def embed_structural_reuse(
    container: BmpImage,
    sink: bytes,
    key: StegoKey,
    prior: Optional[StegoArtifact] = None,
) -> StegoArtifact:
    """Method 3: borrow an identical structural part and put the data
    part into LSB slots. With ``prior`` the sink is added to an existing
    artifact built over the same container."""
    writer = _StegoWriter(_base_bytes(container, prior))
    writer.add_structural_reuse(sink, key)
    return writer.finish()


def embed_data_dedup(
    container: BmpImage, sink: bytes, key: StegoKey, sub_method: int
) -> StegoArtifact:
    """Method 4: tokenize the sink's data part against the container's
    and append the token stream; the structural part goes to LSB slots
    (sub-method 2) or is reused (sub-method 3)."""
    writer = _StegoWriter(serialize_bmp(container))
    writer.add_data_dedup(sink, key, sub_method)
    return writer.finish()


def embed_auto(
    container: BmpImage, sinks: Sequence[tuple[bytes, StegoKey]]
) -> StegoArtifact:
    """Run the selector for each sink in turn and embed accordingly."""
    writer = _StegoWriter(serialize_bmp(container))
    for sink, key in sinks:
        plan = select_method(
            writer.image,
            sink,
            key,
            prior_structurals=writer.reusable_structurals(),
            free_lsb_slots=writer.free_slots(),
        )
        writer.add_planned(sink, key, plan)
    return writer.finish()


def _base_bytes(container: BmpImage, prior: Optional[StegoArtifact]) -> bytes:
    if prior is None:
        return serialize_bmp(container)
    probed = probe_stego(prior.bytes)
    if probed is None:
        raise FormatError("prior artifact has no valid trailer")
    footer, _ = probed
    prefix = parse_bmp(prior.bytes[: footer.original_container_length])
    if prefix.structural != container.structural:
        raise ValueError("prior artifact was not built over this container")
    return prior.bytes


def select_method(
    container: BmpImage,
    sink: bytes,
    key: StegoKey,
    prior_structurals: Sequence[tuple[int, bytes]] = (),
    free_lsb_slots: Optional[int] = None,
) -> EmbedPlan:
    """Pick a storage plan for one sink.

    Preference order: reuse an identical structural part (method 4,
    sub-method 3), else store the structural part in LSB slots if it
    fits (method 4, sub-method 2), else fall back to a plain append
    (method 1). The data part is tokenized except in the fallback.
    """
    img = parse_bmp(sink)
    free = lsb_capacity_bits(container) if free_lsb_slots is None else free_lsb_slots
    key_overhead = 2 * len(key.data)
    # worst case: the whole data part as one literal token, wrapped
    tokenized_bound = len(img.data) + _LITERAL_WIRE_OVERHEAD + key_overhead

    reuse_source = None
    for source, structural in [(0, container.structural), *prior_structurals]:
        if structural == img.structural:
            reuse_source = source
            break
    if reuse_source is not None:
        return EmbedPlan(
            method=4,
            sub_method=3,
            structural_mode=StructuralMode.REUSED,
            data_mode=DataMode.TOKENIZED,
            reuse_source=reuse_source,
            estimated_appended_bytes=tokenized_bound,
        )
    structural_bits = 8 * (len(img.structural) + key_overhead)
    if structural_bits + 1 <= free:
        return EmbedPlan(
            method=4,
            sub_method=2,
            structural_mode=StructuralMode.LSB,
            data_mode=DataMode.TOKENIZED,
            slot_params=SlotParams(1, 1),
            estimated_appended_bytes=tokenized_bound,
        )
    return EmbedPlan(
        method=1,
        sub_method=0,
        structural_mode=StructuralMode.APPENDED,
        data_mode=DataMode.APPENDED,
        estimated_appended_bytes=len(sink) + key_overhead,
    )


# -- extraction ------------------------------------------------------------


def _read_blob(stego: bytes, locator: BlobLocator) -> bytes:
    end = locator.offset + locator.length
    if locator.offset < 0 or end > len(stego):
        raise FormatError(f"blob [{locator.offset}, {end}) outside the file")
    return stego[locator.offset : end]


def _read_slots(data_part: bytes, locator: SlotLocator, key: StegoKey) -> bytes:
    if locator.bit_count % 8:
        raise FormatError(f"slot bit count {locator.bit_count} not a whole byte")
    try:
        bits = extract_bits(
            data_part[locator.base :], locator.bit_count, locator.params
        )
    except CapacityExceeded as exc:
        raise FormatError(f"slot region outside the data part: {exc}") from exc
    return unprotect(bits_to_bytes(bits), key)


def _resolve_structural(
    entry: SinkEntry,
    entries: Sequence[SinkEntry],
    container: BmpImage,
    key: StegoKey,
) -> bytes:
    locator = entry.structural_locator
    if isinstance(locator, SlotLocator):
        return _read_slots(container.data, locator, key)
    if isinstance(locator, ReuseLocator):
        source = locator.source
        while source != 0:
            source_entry = entries[source - 1]
            if not isinstance(source_entry.structural_locator, ReuseLocator):
                raise FormatError(
                    f"reused structural part of sink {source - 1} is enciphered "
                    "with another key and cannot be recovered"
                )
            source = source_entry.structural_locator.source
        return container.structural
    raise FormatError("unexpected structural locator")


def extract(stego: bytes, key: StegoKey, index: int) -> bytes:
    """Recover sink ``index`` bit-exactly, or fail without output.

    The key tag is checked before anything is deciphered; a wrong key
    raises KeyMismatch either there or at the payload delimiters.
    """
    probed = probe_stego(stego)
    if probed is None:
        raise FormatError("not a stego file")
    footer, entries = probed
    if not 0 <= index < footer.sink_count:
        raise IndexOutOfRange(
            f"sink {index} not in directory of {footer.sink_count}"
        )
    entry = entries[index]
    if key_tag(key) != entry.key_tag:
        raise KeyMismatch(f"key does not match sink {index}")

    container = parse_bmp(stego[: footer.original_container_length])
    if entry.method == 1:
        sink = unprotect(_read_blob(stego, entry.structural_locator), key)
    else:
        structural = _resolve_structural(entry, entries, container, key)
        if entry.data_mode is DataMode.APPENDED:
            data = unprotect(_read_blob(stego, entry.data_locator), key)
        elif entry.data_mode is DataMode.LSB:
            data = _read_slots(container.data, entry.data_locator, key)
        else:  # TOKENIZED
            raw = unprotect(_read_blob(stego, entry.data_locator), key)
            data = detokenize(parse_tokens(raw), container.data)
        sink = structural + data
    if len(sink) != entry.sink_total_length:
        raise FormatError(
            f"reassembled sink is {len(sink)} bytes, directory says "
            f"{entry.sink_total_length}"
        )
    return sink
