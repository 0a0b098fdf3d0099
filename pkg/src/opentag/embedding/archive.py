"""Binary embedding archive: the transport for frozen encoder outputs.

Layout (little-endian):

  magic   8 bytes  b"OTTREMB1"
  version u32      currently 1
  dim     u32      vector width shared by every entry
  count   u64      number of entries
  entries count times:
    key_len u32
    key     key_len bytes, UTF-8
    values  dim * f32

Visual token sequences are stored as consecutive per-token keys plus a
companion "#count" key whose values[0] holds the token count.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import FormatError

MAGIC = b"OTTREMB1"
VERSION = 1

_HEADER = struct.Struct("<8sIIQ")
_KEYLEN = struct.Struct("<I")


def write_archive(path: str | Path, dim: int, entries: dict[str, np.ndarray]) -> None:
    """Write entries in mapping order. Values are cast to f32."""
    if dim <= 0:
        raise FormatError(f"archive dim must be positive, got {dim}")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, dim, len(entries)))
        for key, values in entries.items():
            vec = np.asarray(values, dtype=np.float32).reshape(-1)
            if vec.size != dim:
                raise FormatError(f"entry {key!r} has {vec.size} values, archive dim is {dim}")
            raw = key.encode("utf-8")
            fh.write(_KEYLEN.pack(len(raw)))
            fh.write(raw)
            fh.write(vec.tobytes())


def read_archive(path: str | Path) -> tuple[int, int, dict[str, np.ndarray]]:
    """Returns (version, dim, key -> f32 vector) preserving file order."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise FormatError("archive shorter than its header", byte_offset=len(blob))
    magic, version, dim, count = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", byte_offset=0)
    if version != VERSION:
        raise FormatError(f"unsupported archive version {version}", byte_offset=8)
    if dim <= 0:
        raise FormatError(f"archive dim must be positive, got {dim}", byte_offset=12)

    entries: dict[str, np.ndarray] = {}
    offset = _HEADER.size
    vec_bytes = 4 * dim
    for _ in range(count):
        if offset + _KEYLEN.size > len(blob):
            raise FormatError("truncated archive: key length missing", byte_offset=offset)
        (key_len,) = _KEYLEN.unpack_from(blob, offset)
        offset += _KEYLEN.size
        if offset + key_len + vec_bytes > len(blob):
            raise FormatError("truncated archive: entry payload missing", byte_offset=offset)
        key = blob[offset : offset + key_len].decode("utf-8")
        offset += key_len
        vec = np.frombuffer(blob, dtype="<f4", count=dim, offset=offset).copy()
        offset += vec_bytes
        if key in entries:
            raise FormatError(f"duplicate archive key {key!r}", byte_offset=offset)
        entries[key] = vec
    if offset != len(blob):
        raise FormatError(f"{len(blob) - offset} trailing bytes after last entry", byte_offset=offset)
    return version, dim, entries
