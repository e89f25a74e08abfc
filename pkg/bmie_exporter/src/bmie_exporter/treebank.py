"""Minimal CoNLL-U reader: one word per syntactic token, in corpus order.

Multiword-token ranges (ids like ``3-4``) and empty nodes (ids like
``5.1``) describe words that appear again on their own lines, so they
are skipped.  Underscore fields stay ``None``.  Sentence indices count
sentences as they close, so they match any other reader that follows
the same convention on the same file.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

N_COLUMNS = 10


class TreebankError(ValueError):
    """Malformed treebank; the message carries the 1-based line number."""


@dataclass(frozen=True)
class Word:
    sent: int
    tok: int
    form: str
    upos: Optional[str]
    deprel: Optional[str]
    head: Optional[int]


def _field(value: str) -> Optional[str]:
    return None if value == "_" else value


def read_treebank(path: Union[str, Path]) -> List[Tuple[int, List[Word]]]:
    """Sentences as (sentence index, words); indices may skip empty sentences."""
    text = Path(path).read_text(encoding="utf-8")
    sentences: List[Tuple[int, List[Word]]] = []
    current: List[Word] = []
    sent_index = 0
    sentence_open = False

    def close(line_no):
        nonlocal current, sent_index, sentence_open
        if sentence_open:
            max_id = max((w.tok for w in current), default=0)
            for w in current:
                if w.head is not None and w.head > max_id:
                    raise TreebankError(
                        f"line {line_no}: head {w.head} outside sentence of {max_id} words"
                    )
            if current:
                sentences.append((sent_index, current))
            current = []
            sent_index += 1
            sentence_open = False

    line_no = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            close(line_no)
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != N_COLUMNS:
            raise TreebankError(f"line {line_no}: expected {N_COLUMNS} columns, found {len(cols)}")
        token_id = cols[0]
        if "-" in token_id or "." in token_id:
            sentence_open = True
            continue
        try:
            tok = int(token_id)
        except ValueError:
            raise TreebankError(f"line {line_no}: bad token id {token_id!r}") from None
        head_field = _field(cols[6])
        if head_field is not None:
            try:
                head: Optional[int] = int(head_field)
            except ValueError:
                raise TreebankError(f"line {line_no}: bad head index {cols[6]!r}") from None
            if head < 0:
                raise TreebankError(f"line {line_no}: negative head index")
        else:
            head = None
        current.append(
            Word(sent=sent_index, tok=tok, form=cols[1],
                 upos=_field(cols[3]), deprel=_field(cols[7]), head=head)
        )
        sentence_open = True
    close(line_no + 1)
    return sentences
