"""Supervised token datasets extracted from aligned treebanks.

A dataset pairs one feature vector per token with one label index.  The
split is by sentence so that no sentence contributes to both sides, and
the label inventory is frozen from the training side: test tokens whose
label never appeared in training are dropped (and counted in the log)
rather than silently added to the inventory.
"""

from __future__ import annotations

import hashlib
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..seeding import derive_rng
from .conllu import TokenRecord
from .embeddings import EmbeddingStore

logger = logging.getLogger(__name__)

TASKS = ("pos", "deprel")


@dataclass(frozen=True)
class TokenDataset:
    """Feature/label arrays for one probing task, already split."""

    task: str
    labels: Tuple[str, ...]
    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate labels")
        object.__setattr__(self, "labels", tuple(self.labels))
        for name in ("train_x", "test_x"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 2:
                raise ValueError(f"{name} must be 2-d, got shape {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        for name in ("train_y", "test_y"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.int64)
            if arr.ndim != 1:
                raise ValueError(f"{name} must be 1-d, got shape {arr.shape}")
            if arr.size and (arr.min() < 0 or arr.max() >= len(self.labels)):
                raise ValueError(f"{name} holds indices outside the label inventory")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.train_x.shape[0] != self.train_y.shape[0]:
            raise ValueError("train_x and train_y disagree on length")
        if self.test_x.shape[0] != self.test_y.shape[0]:
            raise ValueError("test_x and test_y disagree on length")
        if self.test_x.size and self.test_x.shape[1] != self.train_x.shape[1]:
            raise ValueError("train and test feature dimensions differ")

    @property
    def input_dim(self) -> int:
        return int(self.train_x.shape[1])

    @property
    def n_train(self) -> int:
        return int(self.train_x.shape[0])

    @property
    def n_test(self) -> int:
        return int(self.test_x.shape[0])

    def digest(self) -> str:
        """Content hash used to pin a dataset in run manifests."""
        h = hashlib.sha256()
        h.update(self.task.encode())
        h.update("\x1f".join(self.labels).encode())
        for arr in (self.train_x, self.train_y, self.test_x, self.test_y):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()


def base_label(deprel: str) -> str:
    """Relation label with any subtype after the colon removed."""
    return deprel.split(":", 1)[0]


def _split_sentences(sent_ids: Sequence[int], test_fraction: float, seed: int) -> Tuple[set, set]:
    ids = sorted(set(sent_ids))
    if not ids:
        raise ValueError("no sentences to split")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test fraction must sit strictly inside (0, 1), got {test_fraction}")
    order = derive_rng(seed, "sentence-split").permutation(len(ids))
    n_test = int(round(test_fraction * len(ids)))
    if len(ids) >= 2:
        n_test = min(max(n_test, 1), len(ids) - 1)
    else:
        n_test = 0
        logger.warning("single-sentence corpus: test side is empty")
    test_ids = {ids[i] for i in order[:n_test]}
    train_ids = set(ids) - test_ids
    return train_ids, test_ids


def extract_task_dataset(
    records: Sequence[TokenRecord],
    store: EmbeddingStore,
    task: str,
    test_fraction: float = 0.2,
    seed: int = 0,
) -> TokenDataset:
    """Pair aligned vectors with task labels and split by sentence.

    The part-of-speech task uses the token's own vector; the relation
    task concatenates the dependent's vector with its head's vector,
    with the sentence-root head encoded as the zero vector.
    """
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}, expected one of {TASKS}")
    index = store.alignment_index()
    dim = store.dimension
    by_sentence: Dict[int, Dict[int, TokenRecord]] = defaultdict(dict)
    for rec in records:
        by_sentence[rec.sent_index][rec.token_index] = rec

    examples: List[Tuple[int, np.ndarray, str]] = []
    skipped_unaligned = 0
    skipped_flagged = 0
    for rec in records:
        key = (rec.sent_index, rec.token_index)
        if task == "pos":
            if rec.upos is None:
                skipped_flagged += 1
                continue
            if key not in index:
                skipped_unaligned += 1
                continue
            x = np.asarray(store.vectors[index[key]], dtype=np.float64)
            label = rec.upos
        else:
            if rec.deprel is None or rec.head is None:
                skipped_flagged += 1
                continue
            if key not in index:
                skipped_unaligned += 1
                continue
            if rec.head == 0:
                head_vec = np.zeros(dim)
            else:
                head_key = (rec.sent_index, rec.head)
                if head_key not in index:
                    skipped_unaligned += 1
                    continue
                head_vec = np.asarray(store.vectors[index[head_key]], dtype=np.float64)
            x = np.concatenate([np.asarray(store.vectors[index[key]], dtype=np.float64), head_vec])
            label = base_label(rec.deprel)
        examples.append((rec.sent_index, x, label))
    if skipped_flagged:
        logger.info("skipped %d tokens missing task annotation", skipped_flagged)
    if skipped_unaligned:
        logger.info("skipped %d tokens without an aligned vector", skipped_unaligned)
    if not examples:
        raise ValueError(f"no usable tokens for task {task!r}")

    train_ids, test_ids = _split_sentences([s for s, _, _ in examples], test_fraction, seed)
    train = [(x, lab) for s, x, lab in examples if s in train_ids]
    test = [(x, lab) for s, x, lab in examples if s in test_ids]
    if not train:
        raise ValueError("training side of the split is empty")
    labels = tuple(sorted({lab for _, lab in train}))
    label_index = {lab: i for i, lab in enumerate(labels)}
    dropped = sum(1 for _, lab in test if lab not in label_index)
    if dropped:
        logger.info("dropped %d test tokens with labels unseen in training", dropped)
    test = [(x, lab) for x, lab in test if lab in label_index]

    feat_dim = train[0][0].shape[0]
    return TokenDataset(
        task=task,
        labels=labels,
        train_x=np.array([x for x, _ in train]),
        train_y=np.array([label_index[lab] for _, lab in train], dtype=np.int64),
        test_x=np.array([x for x, _ in test]).reshape(len(test), feat_dim),
        test_y=np.array([label_index[lab] for _, lab in test], dtype=np.int64),
    )
