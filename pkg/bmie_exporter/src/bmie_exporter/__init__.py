"""Contextual embedding exporter for CoNLL-U treebanks.

Reads a treebank, runs a pretrained transformer encoder over each
sentence, pools the subword pieces of every syntactic word into one
vector, and writes the BMIE binary plus its JSONL alignment sidecar.
"""

from .export import AlignmentError, ExportJob, export
from .treebank import TreebankError, Word, read_treebank
from .writer import write_store

__all__ = [
    "AlignmentError",
    "ExportJob",
    "TreebankError",
    "Word",
    "export",
    "read_treebank",
    "write_store",
]
