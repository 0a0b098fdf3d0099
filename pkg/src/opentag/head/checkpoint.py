"""Self-describing binary checkpoint for the tagging head.

Layout (little-endian):

  magic    8 bytes b"OTTRCKP1"
  version  u32
  dims     5 x u32: text_dim, visual_dim, model_dim, heads, seq_len
  fusion   u32 length + UTF-8 bytes
  label_text_mode  u32 length + UTF-8 bytes
  taxonomy_hash    u32 length + UTF-8 bytes
  matrices in HeadParams field order, each rows*cols f64 (shapes follow from dims)

Fusion op and label text mode ride along so inference needs no side channel.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import FormatError
from ..numerics import Matrix
from .params import FUSION_OPS, HeadDims, HeadParams

MAGIC = b"OTTRCKP1"
VERSION = 1

LABEL_TEXT_MODES = ("name", "name+definition")


def _shapes(dims: HeadDims) -> dict[str, tuple[int, int]]:
    d = dims.model_dim
    return {
        "p_label": (dims.text_dim, d),
        "p_visual": (dims.visual_dim, d),
        "p_text": (dims.text_dim, d),
        "p_cat": (2 * d, d),
        "w_q": (d, d),
        "w_k": (d, d),
        "w_v": (d, d),
        "w_o": (d, d),
        "score_scale": (1, 1),
        "score_bias": (1, 1),
    }


def _pack_str(value: str) -> bytes:
    raw = value.encode("utf-8")
    return struct.pack("<I", len(raw)) + raw


def save_checkpoint(
    path: str | Path,
    params: HeadParams,
    fusion: str,
    label_text_mode: str,
    taxonomy_hash: str,
) -> None:
    if fusion not in FUSION_OPS:
        raise FormatError(f"unknown fusion op {fusion!r}")
    if label_text_mode not in LABEL_TEXT_MODES:
        raise FormatError(f"unknown label text mode {label_text_mode!r}")
    dims = params.dims
    parts = [
        MAGIC,
        struct.pack("<I", VERSION),
        struct.pack("<5I", dims.text_dim, dims.visual_dim, dims.model_dim, dims.heads, dims.seq_len),
        _pack_str(fusion),
        _pack_str(label_text_mode),
        _pack_str(taxonomy_hash),
    ]
    shapes = _shapes(dims)
    for name in HeadParams.MATRIX_FIELDS:
        matrix = getattr(params, name)
        if matrix is None:
            matrix = Matrix.zeros(*shapes[name])
        if matrix.shape != shapes[name]:
            raise FormatError(f"{name} has shape {matrix.shape}, expected {shapes[name]}")
        parts.append(matrix.a.astype("<f8").tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_checkpoint(path: str | Path) -> tuple[HeadParams, str, str, str]:
    """Returns (params, fusion, label_text_mode, taxonomy_hash)."""
    blob = Path(path).read_bytes()
    offset = 0

    def need(n: int, what: str) -> int:
        nonlocal offset
        if offset + n > len(blob):
            raise FormatError(f"truncated checkpoint: {what} missing", byte_offset=offset)
        offset += n
        return offset - n

    at = need(8, "magic")
    if blob[at : at + 8] != MAGIC:
        raise FormatError(f"bad magic {blob[at:at+8]!r}, expected {MAGIC!r}", byte_offset=0)
    (version,) = struct.unpack_from("<I", blob, need(4, "version"))
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}", byte_offset=8)
    dims = HeadDims(*struct.unpack_from("<5I", blob, need(20, "dims")))

    def read_str(what: str) -> str:
        (n,) = struct.unpack_from("<I", blob, need(4, f"{what} length"))
        return blob[need(n, what) : offset].decode("utf-8")

    fusion = read_str("fusion")
    label_text_mode = read_str("label_text_mode")
    taxonomy_hash = read_str("taxonomy_hash")
    if fusion not in FUSION_OPS:
        raise FormatError(f"unknown fusion op {fusion!r} in checkpoint")
    if label_text_mode not in LABEL_TEXT_MODES:
        raise FormatError(f"unknown label text mode {label_text_mode!r} in checkpoint")

    fields: dict[str, Matrix] = {}
    for name, (rows, cols) in _shapes(dims).items():
        n_bytes = rows * cols * 8
        at = need(n_bytes, name)
        fields[name] = Matrix(np.frombuffer(blob, dtype="<f8", count=rows * cols, offset=at).reshape(rows, cols))
    if offset != len(blob):
        raise FormatError(f"{len(blob) - offset} trailing bytes after parameters", byte_offset=offset)
    params = HeadParams(dims=dims, **fields)
    return params, fusion, label_text_mode, taxonomy_hash
