"""Reading and writing the tab-separated treebank format.

Only the columns this package consumes are modelled: token id, form,
universal POS, head index and relation label.  Everything else survives
a round trip as the placeholder column.  Multiword-token ranges and
empty nodes describe the same underlying words twice, so they are
skipped; a record missing its POS or relation stays in the stream but
is flagged so task extraction can leave it out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Union

N_COLUMNS = 10


class ConlluError(ValueError):
    """Malformed input; the message carries the 1-based line number."""


@dataclass(frozen=True)
class TokenRecord:
    sent_index: int
    token_index: int
    form: str
    upos: Optional[str]
    deprel: Optional[str]
    head: Optional[int]

    @property
    def has_task_fields(self) -> bool:
        return self.upos is not None and self.deprel is not None and self.head is not None


def _field(value: str) -> Optional[str]:
    return None if value == "_" else value


def parse_conllu(source: Union[str, Iterable[str]]) -> List[TokenRecord]:
    """One record per syntactic word, in document order."""
    lines = source.splitlines() if isinstance(source, str) else source
    records: List[TokenRecord] = []
    sent_index = 0
    sent_start = 0
    sentence_open = False
    sentence_ids = []

    def close_sentence(line_no):
        nonlocal sent_index, sent_start, sentence_open, sentence_ids
        if sentence_open:
            max_id = max(sentence_ids, default=0)
            for rec in records[sent_start:]:
                if rec.head is not None and rec.head > max_id:
                    raise ConlluError(f"line {line_no}: head {rec.head} outside sentence of {max_id} words")
            sent_index += 1
            sent_start = len(records)
            sentence_open = False
            sentence_ids = []

    line_no = 0
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            close_sentence(line_no)
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != N_COLUMNS:
            raise ConlluError(f"line {line_no}: expected {N_COLUMNS} columns, found {len(cols)}")
        token_id = cols[0]
        if "-" in token_id or "." in token_id:
            # multiword range or empty node; the underlying words follow
            sentence_open = True
            continue
        try:
            token_index = int(token_id)
        except ValueError:
            raise ConlluError(f"line {line_no}: bad token id {token_id!r}") from None
        head_field = _field(cols[6])
        if head_field is not None:
            try:
                head: Optional[int] = int(head_field)
            except ValueError:
                raise ConlluError(f"line {line_no}: bad head index {cols[6]!r}") from None
            if head < 0:
                raise ConlluError(f"line {line_no}: negative head index")
        else:
            head = None
        records.append(
            TokenRecord(
                sent_index=sent_index,
                token_index=token_index,
                form=cols[1],
                upos=_field(cols[3]),
                deprel=_field(cols[7]),
                head=head,
            )
        )
        sentence_open = True
        sentence_ids.append(token_index)
    close_sentence(line_no + 1)
    return records


def serialize_conllu(records: Iterable[TokenRecord]) -> str:
    """Canonical ten-column text; unknown columns become placeholders."""
    lines = []
    current_sent = None
    for rec in records:
        if current_sent is not None and rec.sent_index != current_sent:
            lines.append("")
        current_sent = rec.sent_index
        cols = ["_"] * N_COLUMNS
        cols[0] = str(rec.token_index)
        cols[1] = rec.form
        cols[3] = rec.upos if rec.upos is not None else "_"
        cols[6] = str(rec.head) if rec.head is not None else "_"
        cols[7] = rec.deprel if rec.deprel is not None else "_"
        lines.append("\t".join(cols))
    if not lines:
        return ""
    lines.append("")
    return "\n".join(lines) + "\n"
