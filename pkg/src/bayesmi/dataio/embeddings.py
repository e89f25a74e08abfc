"""Binary vector store with a JSONL alignment sidecar.

Layout of the binary file, all little-endian:

    bytes 0..3    magic ``BMIE``
    bytes 4..7    format version (u32, currently 1)
    bytes 8..11   vector dimension d (u32)
    bytes 12..19  vector count n (u64)
    bytes 20..    n * d float32 values, row-major

The sidecar sits next to the binary under the same prefix with a
``.jsonl`` suffix and holds one object per vector describing which token
it belongs to.  Reading is
strict: every structural failure reports the byte offset at which the
file stopped making sense.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from ..seeding import derive_rng
from .conllu import TokenRecord

MAGIC = b"BMIE"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")


class EmbeddingFormatError(ValueError):
    """Structurally invalid vector file; messages carry byte offsets."""


@dataclass(frozen=True)
class TokenAlignment:
    """One sidecar row: which token a vector row encodes."""

    sent: int
    tok: int
    form: str
    upos: str
    deprel: str
    head: int
    vec: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "sent": self.sent,
                "tok": self.tok,
                "form": self.form,
                "upos": self.upos,
                "deprel": self.deprel,
                "head": self.head,
                "vec": self.vec,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "TokenAlignment":
        raw = json.loads(text)
        return cls(
            sent=int(raw["sent"]),
            tok=int(raw["tok"]),
            form=str(raw["form"]),
            upos=str(raw["upos"]),
            deprel=str(raw["deprel"]),
            head=int(raw["head"]),
            vec=int(raw["vec"]),
        )


@dataclass(frozen=True)
class EmbeddingStore:
    """Vectors plus the token rows they are aligned to."""

    vectors: np.ndarray
    alignment: Tuple[TokenAlignment, ...] = ()

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float32)
        if vectors.ndim != 2:
            raise ValueError(f"vectors must be 2-d, got shape {vectors.shape}")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("vectors contain NaN or Inf")
        vectors = np.ascontiguousarray(vectors)
        vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "alignment", tuple(self.alignment))
        for row in self.alignment:
            if not 0 <= row.vec < vectors.shape[0]:
                raise ValueError(f"alignment row points at vector {row.vec}, store has {vectors.shape[0]}")

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def n_vectors(self) -> int:
        return int(self.vectors.shape[0])

    def vector_for(self, sent: int, tok: int) -> Optional[np.ndarray]:
        for row in self.alignment:
            if row.sent == sent and row.tok == tok:
                return self.vectors[row.vec]
        return None

    def alignment_index(self) -> dict:
        """(sent, tok) -> vector row, for bulk lookups."""
        return {(row.sent, row.tok): row.vec for row in self.alignment}


def sidecar_path(path: Union[str, Path]) -> Path:
    """Alignment file next to the binary: same prefix, .jsonl suffix."""
    return Path(path).with_suffix(".jsonl")


def write_embeddings(store: EmbeddingStore, path: Union[str, Path]) -> None:
    """Write the binary file and, when alignment rows exist, the sidecar."""
    path = Path(path)
    vectors = store.vectors
    header = _HEADER.pack(MAGIC, VERSION, vectors.shape[1], vectors.shape[0])
    payload = np.ascontiguousarray(vectors, dtype="<f4").tobytes()
    path.write_bytes(header + payload)
    if store.alignment:
        with sidecar_path(path).open("w", encoding="utf-8") as fh:
            for row in store.alignment:
                fh.write(row.to_json() + "\n")


def read_embeddings(path: Union[str, Path]) -> EmbeddingStore:
    """Parse the binary file; pick up the sidecar when present."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise EmbeddingFormatError(
            f"truncated header: need {_HEADER.size} bytes, file ends at offset {len(blob)}"
        )
    magic, version, dim, count = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise EmbeddingFormatError(f"bad magic {magic!r} at offset 0, expected {MAGIC!r}")
    if version != VERSION:
        raise EmbeddingFormatError(f"unsupported version {version} at offset 4")
    expected = _HEADER.size + 4 * dim * count
    if len(blob) != expected:
        raise EmbeddingFormatError(
            f"payload for {count} x {dim} float32 should end at offset {expected}, file ends at offset {len(blob)}"
        )
    vectors = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).reshape(count, dim)
    if not np.all(np.isfinite(vectors)):
        bad = int(np.flatnonzero(~np.isfinite(vectors).ravel())[0])
        raise EmbeddingFormatError(f"non-finite value at offset {_HEADER.size + 4 * bad}")
    alignment: Tuple[TokenAlignment, ...] = ()
    sidecar = sidecar_path(path)
    if sidecar.exists():
        rows = []
        with sidecar.open("r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rows.append(TokenAlignment.from_json(line))
                except (KeyError, ValueError) as exc:
                    raise EmbeddingFormatError(f"sidecar line {line_no}: {exc}") from exc
        alignment = tuple(rows)
    return EmbeddingStore(vectors=vectors, alignment=alignment)


def type_vector(form: str, dim: int, seed: int) -> np.ndarray:
    """The random vector assigned to one word form.

    A pure function of (form, dim, seed): corpus order and which other
    forms appear never change a form's vector.
    """
    rng = derive_rng(seed, "type-embedding", form)
    return (rng.standard_normal(dim) / np.sqrt(dim)).astype(np.float32)


def random_type_embeddings(
    tokens: Sequence[Union[str, TokenRecord]], dim: int, seed: int
) -> EmbeddingStore:
    """One shared vector per distinct form, aligned to every token.

    Accepts parsed treebank records (full alignment metadata) or bare
    form strings (positional metadata only).
    """
    if dim <= 0:
        raise ValueError(f"dimension must be positive, got {dim}")
    form_rows: dict = {}
    vectors = []
    alignment = []
    for position, token in enumerate(tokens):
        if isinstance(token, TokenRecord):
            form = token.form
            meta = (token.sent_index, token.token_index, token.upos, token.deprel, token.head)
        else:
            form = str(token)
            meta = (0, position + 1, None, None, None)
        if form not in form_rows:
            form_rows[form] = len(vectors)
            vectors.append(type_vector(form, dim, seed))
        sent, tok, upos, deprel, head = meta
        alignment.append(
            TokenAlignment(
                sent=sent,
                tok=tok,
                form=form,
                upos=upos if upos is not None else "_",
                deprel=deprel if deprel is not None else "_",
                head=head if head is not None else 0,
                vec=form_rows[form],
            )
        )
    if not vectors:
        raise ValueError("no tokens to embed")
    return EmbeddingStore(vectors=np.stack(vectors), alignment=tuple(alignment))
