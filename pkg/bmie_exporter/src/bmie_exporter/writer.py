"""Writer for the BMIE vector exchange format.

Layout, all little-endian: magic ``BMIE``, u32 version (1), u32 vector
dimension, u64 vector count, then count * dimension float32 values in
row-major order.  The alignment sidecar shares the output prefix with a
``.jsonl`` suffix and holds one JSON object per vector row.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

MAGIC = b"BMIE"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")

ROW_KEYS = ("sent", "tok", "form", "upos", "deprel", "head", "vec")


def write_store(prefix: Union[str, Path], vectors: np.ndarray,
                rows: List[dict]) -> Tuple[Path, Path]:
    """Write <prefix>.bmie and <prefix>.jsonl; returns both paths."""
    vectors = np.ascontiguousarray(vectors, dtype=np.float32)
    if vectors.ndim != 2:
        raise ValueError(f"vectors must be 2-d, got shape {vectors.shape}")
    if not np.all(np.isfinite(vectors)):
        raise ValueError("vectors contain NaN or Inf")
    if len(rows) != vectors.shape[0]:
        raise ValueError(f"{len(rows)} alignment rows for {vectors.shape[0]} vectors")
    for row in rows:
        if set(row) != set(ROW_KEYS):
            raise ValueError(f"alignment row keys must be {ROW_KEYS}, got {sorted(row)}")

    prefix = Path(prefix)
    binary = prefix.with_suffix(".bmie")
    sidecar = prefix.with_suffix(".jsonl")
    header = _HEADER.pack(MAGIC, VERSION, vectors.shape[1], vectors.shape[0])
    binary.write_bytes(header + vectors.tobytes())
    with sidecar.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    return binary, sidecar
