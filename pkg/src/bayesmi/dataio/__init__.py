"""Treebank parsing, vector stores, and dataset assembly."""

from .conllu import ConlluError, TokenRecord, parse_conllu, serialize_conllu
from .datasets import TASKS, TokenDataset, base_label, extract_task_dataset
from .embeddings import (
    MAGIC,
    VERSION,
    EmbeddingFormatError,
    EmbeddingStore,
    TokenAlignment,
    random_type_embeddings,
    read_embeddings,
    sidecar_path,
    type_vector,
    write_embeddings,
)
from .synthetic import (
    KINDS,
    SyntheticSpec,
    analytic_mi,
    channel_matrix,
    make_lossless_pair,
    synthesize,
)

__all__ = [
    "ConlluError",
    "TokenRecord",
    "parse_conllu",
    "serialize_conllu",
    "TASKS",
    "TokenDataset",
    "base_label",
    "extract_task_dataset",
    "MAGIC",
    "VERSION",
    "EmbeddingFormatError",
    "EmbeddingStore",
    "TokenAlignment",
    "random_type_embeddings",
    "read_embeddings",
    "sidecar_path",
    "type_vector",
    "write_embeddings",
    "KINDS",
    "SyntheticSpec",
    "analytic_mi",
    "channel_matrix",
    "make_lossless_pair",
    "synthesize",
]
