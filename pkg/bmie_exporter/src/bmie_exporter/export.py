"""Batched extraction of word vectors from a pretrained encoder.

Each sentence is tokenized into subword pieces with the checkpoint's own
tokenizer, run through the encoder in evaluation mode, and every
syntactic word's pieces at the selected hidden layer are pooled into a
single float32 vector.  Output order is corpus order, one vector per
word, so the sidecar rows align one to one with any reader that walks
the same treebank.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from .treebank import Word, read_treebank
from .writer import write_store

POOLING = ("mean", "first")


class AlignmentError(RuntimeError):
    """A word's subword span could not be recovered; names the sentence."""


@dataclass(frozen=True)
class ExportJob:
    model: str
    conllu: Union[str, Path]
    out: Union[str, Path]
    layer: int = -1
    pool: str = "mean"
    batch_size: int = 8
    device: str = "cpu"

    def __post_init__(self):
        if self.pool not in POOLING:
            raise ValueError(f"pool must be one of {POOLING}, got {self.pool!r}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be positive, got {self.batch_size}")


def _load(job: ExportJob):
    import torch
    from transformers import AutoModel, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(job.model, use_fast=True)
    model = AutoModel.from_pretrained(job.model)
    model.to(torch.device(job.device))
    model.eval()
    return tokenizer, model


def _pool(states, piece_rows: List[int], how: str):
    if how == "first":
        return states[piece_rows[0]]
    return states[piece_rows, :].mean(dim=0)


def _encode_batch(tokenizer, model, batch: List[Tuple[int, List[Word]]],
                  job: ExportJob) -> List[np.ndarray]:
    import torch

    encoding = tokenizer(
        [[w.form for w in words] for _, words in batch],
        is_split_into_words=True,
        padding=True,
        return_tensors="pt",
    ).to(model.device)

    max_positions = getattr(model.config, "max_position_embeddings", None)
    lengths = encoding["attention_mask"].sum(dim=1)
    for (sent, _), length in zip(batch, lengths.tolist()):
        if max_positions is not None and length > max_positions:
            raise AlignmentError(
                f"sentence {sent}: {length} subword pieces exceed the "
                f"model's {max_positions} positions"
            )

    with torch.no_grad():
        output = model(**encoding, output_hidden_states=True)
    stack = output.hidden_states
    if not -len(stack) <= job.layer < len(stack):
        raise ValueError(f"layer {job.layer} outside hidden-state stack of {len(stack)}")
    states = stack[job.layer]

    pooled = []
    for i, (sent, words) in enumerate(batch):
        word_ids = encoding.word_ids(batch_index=i)
        spans: List[List[int]] = [[] for _ in words]
        for piece_row, word_id in enumerate(word_ids):
            if word_id is not None:
                spans[word_id].append(piece_row)
        for word, span in zip(words, spans):
            if not span:
                raise AlignmentError(
                    f"sentence {sent}: no subword pieces for word {word.tok} ({word.form!r})"
                )
            pooled.append(_pool(states[i], span, job.pool).cpu().numpy().astype(np.float32))
    return pooled


def export(job: ExportJob) -> Tuple[Path, Path]:
    """Run the job; returns the binary and sidecar paths."""
    sentences = read_treebank(job.conllu)
    tokenizer, model = _load(job)

    vectors: List[np.ndarray] = []
    rows: List[dict] = []
    for start in range(0, len(sentences), job.batch_size):
        batch = sentences[start:start + job.batch_size]
        vectors.extend(_encode_batch(tokenizer, model, batch, job))
        for sent, words in batch:
            for word in words:
                rows.append({
                    "sent": sent,
                    "tok": word.tok,
                    "form": word.form,
                    "upos": word.upos if word.upos is not None else "_",
                    "deprel": word.deprel if word.deprel is not None else "_",
                    "head": word.head if word.head is not None else 0,
                    "vec": len(rows),
                })

    hidden = model.config.hidden_size
    stacked = np.vstack(vectors) if vectors else np.empty((0, hidden), dtype=np.float32)
    if stacked.shape[1] != hidden:
        raise AlignmentError(
            f"pooled width {stacked.shape[1]} does not match hidden size {hidden}"
        )
    return write_store(job.out, stacked, rows)
