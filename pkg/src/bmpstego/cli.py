"""Command line frontend.

Exit codes are a stable contract for scripting:

    0  success
    1  I/O failure
    2  key mismatch
    3  capacity exceeded
    4  format error, bad index, structural mismatch, or bad usage

Keys come from repeated --key flags or, if none are given, from the
STEGO_KEY environment variable. Key material is never echoed.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .bmp import parse_bmp
from .container import probe_stego
from .errors import (
    CapacityExceeded,
    FormatError,
    IndexOutOfRange,
    KeyMismatch,
    StructuralMismatch,
)
from .keystream import StegoKey, key_tag
from .methods import (
    StegoArtifact,
    _StegoWriter,
    extract,
    select_method,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_KEY = 2
EXIT_CAPACITY = 3
EXIT_FORMAT = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would exit(2) on bad usage; 2 is reserved for key mismatch
    def error(self, message: str) -> None:
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="bmpstego",
        description="Hide BMP images inside a container BMP and get them back.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    embed = sub.add_parser("embed", help="hide one or more sinks in a container")
    embed.add_argument("--container", required=True, help="container BMP (or an existing stego file to extend)")
    embed.add_argument("--sink", action="append", default=[], help="sink BMP to hide; repeat per sink")
    embed.add_argument("--key", action="append", default=[], help="key for the matching --sink; repeat per sink")
    embed.add_argument("--method", choices=["auto", "1", "2", "3", "4"], default="auto",
                       help="storage method; auto picks per sink (default)")
    embed.add_argument("--out", required=True, help="stego file to write")

    ext = sub.add_parser("extract", help="recover hidden sinks")
    ext.add_argument("--stego", required=True)
    ext.add_argument("--key", default=None)
    ext.add_argument("--index", type=int, default=0, help="sink index (default 0)")
    ext.add_argument("--all", action="store_true",
                     help="extract every sink this key opens")
    ext.add_argument("--out", required=True,
                     help="output path; with --all an _<index> suffix is added")

    lst = sub.add_parser("list", help="show the directory of a stego file")
    lst.add_argument("--stego", required=True)

    cap = sub.add_parser("capacity", help="show total and free LSB slots")
    cap.add_argument("--container", required=True)

    insp = sub.add_parser("inspect", help="byte-level diff of container vs stego")
    insp.add_argument("--container", required=True)
    insp.add_argument("--stego", required=True)
    return parser


def _read_file(path: str) -> bytes:
    with open(path, "rb") as handle:
        return handle.read()


def _write_file(path: str, data: bytes) -> None:
    with open(path, "wb") as handle:
        handle.write(data)


def _keys_for(count: int, flags: Sequence[str]) -> list[StegoKey]:
    if flags:
        if len(flags) != count:
            raise _UsageError(
                f"got {len(flags)} --key flags for {count} sinks; counts must match"
            )
        return [StegoKey.from_text(value) for value in flags]
    env = os.environ.get("STEGO_KEY")
    if env is None:
        raise _UsageError("no --key flags and STEGO_KEY is not set")
    return [StegoKey.from_text(env)] * count


def _print_report(artifact: StegoArtifact) -> None:
    report = artifact.report
    for sink in report.sinks:
        print(f"sink={sink.index}")
        print(f"method={sink.method} sub={sink.sub_method}")
        entry = artifact.entries[sink.index]
        print(f"structural={entry.structural_mode.name.lower()}")
        print(f"data={entry.data_mode.name.lower()}")
        print(f"original_bytes={sink.original_bytes}")
        print(f"appended_bytes={sink.appended_bytes}")
        print(f"lsb_bits_used={sink.lsb_bits_used}")
    print(f"sink_count={len(report.sinks)}")
    print(f"total_original_bytes={report.total_original_bytes}")
    print(f"total_appended_bytes={report.total_appended_bytes}")
    print(f"overhead_bytes={report.overhead_bytes}")
    print(f"saved_bytes={report.saved_bytes}")
    print(f"saved_pct={100.0 * report.saved_fraction:.2f}")


def _cmd_embed(args: argparse.Namespace) -> int:
    if not args.sink:
        raise _UsageError("embed needs at least one --sink")
    container_bytes = _read_file(args.container)
    sinks = [_read_file(path) for path in args.sink]
    keys = _keys_for(len(sinks), args.key)

    writer = _StegoWriter(container_bytes)
    if args.method == "auto":
        for sink, key in zip(sinks, keys):
            plan = select_method(
                writer.image,
                sink,
                key,
                prior_structurals=writer.reusable_structurals(),
                free_lsb_slots=writer.free_slots(),
            )
            writer.add_planned(sink, key, plan)
    elif args.method == "1":
        for sink, key in zip(sinks, keys):
            writer.add_append(sink, key)
    elif args.method == "2":
        writer.add_lsb_group(list(zip(sinks, keys)))
    elif args.method == "3":
        for sink, key in zip(sinks, keys):
            writer.add_structural_reuse(sink, key)
    else:  # method 4, pick the sub-method per sink
        for sink, key in zip(sinks, keys):
            img = parse_bmp(sink)
            if writer._find_reuse_source(img.structural) is not None:
                writer.add_data_dedup(sink, key, 3)
            else:
                writer.add_data_dedup(sink, key, 2)
    artifact = writer.finish()
    _write_file(args.out, artifact.bytes)
    _print_report(artifact)
    print(f"output_bytes={len(artifact.bytes)}")
    return EXIT_OK


def _output_path(template: str, index: int, multiple: bool) -> str:
    if not multiple:
        return template
    path = Path(template)
    return str(path.with_name(f"{path.stem}_{index}{path.suffix}"))


def _cmd_extract(args: argparse.Namespace) -> int:
    if args.key is not None:
        key = StegoKey.from_text(args.key)
    else:
        env = os.environ.get("STEGO_KEY")
        if env is None:
            raise _UsageError("no --key flag and STEGO_KEY is not set")
        key = StegoKey.from_text(env)
    stego = _read_file(args.stego)

    if args.all:
        probed = probe_stego(stego)
        if probed is None:
            raise FormatError("not a stego file")
        _, entries = probed
        tag = key_tag(key)
        indices = [i for i, e in enumerate(entries) if e.key_tag == tag]
        if not indices:
            raise KeyMismatch("no sink in this file matches the key")
    else:
        indices = [args.index]

    outputs = []
    for index in indices:
        sink = extract(stego, key, index)
        path = _output_path(args.out, index, multiple=args.all)
        outputs.append((index, path, sink))
    for index, path, sink in outputs:
        _write_file(path, sink)
        print(f"sink={index} wrote={path} bytes={len(sink)}")
    return EXIT_OK


def _cmd_list(args: argparse.Namespace) -> int:
    stego = _read_file(args.stego)
    probed = probe_stego(stego)
    if probed is None:
        raise FormatError("not a stego file")
    footer, entries = probed
    print(f"sink_count={footer.sink_count}")
    for i, entry in enumerate(entries):
        appended = 0
        lsb_bits = 0
        for loc in (entry.structural_locator, entry.data_locator):
            if hasattr(loc, "bit_count"):
                lsb_bits += loc.bit_count
        if entry.method == 1:
            appended = entry.structural_locator.length
        elif hasattr(entry.data_locator, "length"):
            appended = entry.data_locator.length
        print(
            f"entry={i} method={entry.method} sub={entry.sub_method} "
            f"structural={entry.structural_mode.name.lower()} "
            f"data={entry.data_mode.name.lower()} "
            f"sink_bytes={entry.sink_total_length} "
            f"appended_bytes={appended} lsb_bits={lsb_bits}"
        )
    return EXIT_OK


def _cmd_capacity(args: argparse.Namespace) -> int:
    raw = _read_file(args.container)
    writer = _StegoWriter(raw)
    print(f"lsb_slots={writer.total_slots()}")
    print(f"free_slots={writer.free_slots()}")
    return EXIT_OK


def _cmd_inspect(args: argparse.Namespace) -> int:
    container = _read_file(args.container)
    stego = _read_file(args.stego)
    if len(stego) < len(container):
        raise FormatError("stego file is shorter than the container")
    prefix = stego[: len(container)]
    changed = 0
    max_delta = 0
    for a, b in zip(container, prefix):
        if a != b:
            changed += 1
            delta = abs(a - b)
            if delta > max_delta:
                max_delta = delta
    appended = len(stego) - len(container)
    print(f"changed_bytes={changed}")
    print(f"max_delta={max_delta}")
    print(f"appended_bytes={appended}")
    print(f"growth_pct={100.0 * appended / len(container):.2f}")
    return EXIT_OK


_COMMANDS = {
    "embed": _cmd_embed,
    "extract": _cmd_extract,
    "list": _cmd_list,
    "capacity": _cmd_capacity,
    "inspect": _cmd_inspect,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except KeyMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_KEY
    except CapacityExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except StructuralMismatch as exc:
        print(f"error: {exc} (--method auto falls back by itself)", file=sys.stderr)
        return EXIT_FORMAT
    except (FormatError, IndexOutOfRange, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
