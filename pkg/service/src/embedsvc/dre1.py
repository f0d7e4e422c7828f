"""Writer for the DRE1 embedding-store wire format consumed by the
evaluation harness.

Layout (little-endian): magic "DRE1", u32 version = 1, u32 dim,
u64 record count, u8 normalized flag, then per record a u16 id byte
length, the UTF-8 id bytes, and dim float32 components.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Sequence

import numpy as np

MAGIC = b"DRE1"
VERSION = 1


def write_dre1(
    path: str | Path,
    dim: int,
    normalized: bool,
    records: Sequence[tuple[str, Sequence[float]]],
) -> None:
    if dim <= 0:
        raise ValueError("dim must be positive")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, dim))
        fh.write(struct.pack("<Q", len(records)))
        fh.write(struct.pack("<B", 1 if normalized else 0))
        seen: set[str] = set()
        for rec_id, values in records:
            if rec_id in seen:
                raise ValueError(f"duplicate record id {rec_id!r}")
            seen.add(rec_id)
            id_bytes = rec_id.encode("utf-8")
            if len(id_bytes) > 0xFFFF:
                raise ValueError(f"record id too long: {rec_id[:32]!r}...")
            vec = np.asarray(values, dtype="<f4")
            if vec.shape != (dim,):
                raise ValueError(f"record {rec_id!r} has {vec.shape[0]} components, expected {dim}")
            fh.write(struct.pack("<H", len(id_bytes)))
            fh.write(id_bytes)
            fh.write(vec.tobytes())
