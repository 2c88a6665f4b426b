"""Hide BMP images inside a container BMP, each guarded by its own key.

Four storage methods trade simplicity against file growth; an automatic
selector picks per sink. Extraction is bit-exact and needs only the
stego file and the matching key. See the README for the trailer format
and the command line interface.
"""

from .bmp import BmpImage, lsb_capacity_bits, parse_bmp, row_stride, serialize_bmp
from .bits import (
    SlotParams,
    bits_to_bytes,
    bytes_to_bits,
    embed_bits,
    extract_bits,
    set_lsb_pm1,
    slot_address,
)
from .container import (
    BlobLocator,
    DataMode,
    ReuseLocator,
    SinkEntry,
    SlotLocator,
    StegoFooter,
    StructuralMode,
    probe_stego,
    read_directory,
    read_footer,
    write_directory,
    write_footer,
)
from .errors import (
    CapacityExceeded,
    DelimiterMismatch,
    FormatError,
    IndexOutOfRange,
    KeyMismatch,
    StegoError,
    StructuralMismatch,
)
from .keystream import (
    StegoKey,
    fnv1a64,
    key_tag,
    protect,
    unprotect,
    unwrap_delimiters,
    wrap_with_delimiters,
    xor_keystream,
)
from .methods import (
    EmbedPlan,
    SavingsReport,
    SinkSavings,
    StegoArtifact,
    embed_append,
    embed_auto,
    embed_data_dedup,
    embed_lsb_adjust,
    embed_structural_reuse,
    extract,
    savings_report,
    select_method,
)
from .tokens import (
    MIN_RUN,
    CopyToken,
    LiteralToken,
    TokenStream,
    detokenize,
    parse_tokens,
    serialize_tokens,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "BmpImage",
    "BlobLocator",
    "CapacityExceeded",
    "CopyToken",
    "DataMode",
    "DelimiterMismatch",
    "EmbedPlan",
    "FormatError",
    "IndexOutOfRange",
    "KeyMismatch",
    "LiteralToken",
    "MIN_RUN",
    "ReuseLocator",
    "SavingsReport",
    "SinkEntry",
    "SinkSavings",
    "SlotLocator",
    "SlotParams",
    "StegoArtifact",
    "StegoError",
    "StegoFooter",
    "StegoKey",
    "StructuralMismatch",
    "StructuralMode",
    "TokenStream",
    "bits_to_bytes",
    "bytes_to_bits",
    "detokenize",
    "embed_append",
    "embed_auto",
    "embed_bits",
    "embed_data_dedup",
    "embed_lsb_adjust",
    "embed_structural_reuse",
    "extract",
    "extract_bits",
    "fnv1a64",
    "key_tag",
    "lsb_capacity_bits",
    "parse_bmp",
    "parse_tokens",
    "probe_stego",
    "protect",
    "read_directory",
    "read_footer",
    "row_stride",
    "savings_report",
    "select_method",
    "serialize_bmp",
    "serialize_tokens",
    "set_lsb_pm1",
    "slot_address",
    "tokenize",
    "unprotect",
    "unwrap_delimiters",
    "wrap_with_delimiters",
    "write_directory",
    "write_footer",
    "xor_keystream",
]
