"""Sentence-level block modeling and corpus ingestion.

Documents are decomposed into contiguous sentence blocks; the gap between two
adjacent blocks is a candidate topic boundary. Free-form text is split with a
rule-based sentence splitter (terminator punctuation plus an abbreviation
stoplist); corpus files in the WIKI-727K convention arrive one sentence per
line with ``========``-prefixed section separators, from which gold boundary
labels are derived.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

from .errors import EmptyDocumentError, InputError
from .tokenizers import Tokenizer, WhitespaceTokenizer

logger = logging.getLogger(__name__)

DEFAULT_SEPARATOR_PREFIX = "========"

# Words that end with '.' without terminating a sentence. Lowercased,
# trailing period included. Deliberately small: ingest paths that matter
# (the corpus format) are already one sentence per line.
ABBREVIATIONS = frozenset(
    {
        "dr.", "mr.", "mrs.", "ms.", "prof.", "rev.", "gen.", "sen.", "rep.",
        "st.", "jr.", "sr.", "co.", "inc.", "ltd.", "corp.",
        "vs.", "etc.", "e.g.", "i.e.", "cf.", "al.", "approx.",
        "fig.", "no.", "vol.", "pp.", "ed.",
        "u.s.", "u.k.", "u.n.",
        "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.",
        "sept.", "oct.", "nov.", "dec.",
    }
)

_TERMINATORS = ".!?"


@dataclass(frozen=True)
class Block:
    """One sentence-level text unit.

    ``index`` is the zero-based position within the document and
    ``char_span`` the half-open [start, end) offsets into the source text.
    """

    index: int
    text: str
    token_count: int
    char_span: tuple[int, int]

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise InputError(f"block {self.index}: text is empty after trimming")
        if self.token_count < 1:
            raise InputError(f"block {self.index}: token_count must be >= 1")
        start, end = self.char_span
        if not 0 <= start < end:
            raise InputError(f"block {self.index}: bad char_span {self.char_span}")


@dataclass
class Document:
    """An ordered block sequence with optional gold boundary labels.

    ``gold_labels[i]`` says whether a topic boundary follows block ``i``;
    the final block carries no label, so the list has length N-1.
    """

    id: str
    blocks: list[Block]
    gold_labels: list[bool] | None = None
    tokenizer_name: str = "whitespace"
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for pos, block in enumerate(self.blocks):
            if block.index != pos:
                raise InputError(f"document {self.id}: block indices not contiguous at {pos}")
        for prev, cur in zip(self.blocks, self.blocks[1:]):
            if cur.char_span[0] < prev.char_span[1]:
                raise InputError(f"document {self.id}: overlapping char spans at block {cur.index}")
        if self.gold_labels is not None and len(self.gold_labels) != max(len(self.blocks) - 1, 0):
            raise InputError(
                f"document {self.id}: {len(self.gold_labels)} labels for "
                f"{len(self.blocks)} blocks (expected N-1)"
            )

    @property
    def token_counts(self) -> list[int]:
        return [b.token_count for b in self.blocks]

    @property
    def total_tokens(self) -> int:
        return sum(b.token_count for b in self.blocks)


def _is_sentence_end(text: str, i: int) -> bool:
    """True when the terminator at position ``i`` actually ends a sentence."""
    ch = text[i]
    if ch not in _TERMINATORS:
        return False
    if i + 1 < len(text) and not text[i + 1].isspace():
        return False  # terminator must be followed by whitespace or EOL
    if ch == ".":
        # Walk back over the word containing this period ('.' kept so that
        # dotted abbreviations like "u.s." match as a whole).
        j = i
        while j > 0 and (text[j - 1].isalnum() or text[j - 1] == "."):
            j -= 1
        word = text[j : i + 1].lower()
        if word in ABBREVIATIONS:
            return False
    return True


def _sentence_spans(text: str) -> list[tuple[int, int]]:
    """Half-open spans of sentences; ends at terminators, hard newlines, EOF."""
    spans: list[tuple[int, int]] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n" or (_is_sentence_end(text, i)):
            end = i if ch == "\n" else i + 1
            spans.append((start, end))
            start = end
        i += 1
    if start < n:
        spans.append((start, n))
    # Trim whitespace off both ends of every span; drop spans with no content.
    trimmed: list[tuple[int, int]] = []
    for s, e in spans:
        while s < e and text[s].isspace():
            s += 1
        while e > s and text[e - 1].isspace():
            e -= 1
        if s < e:
            trimmed.append((s, e))
    return trimmed


def split_sentences(text: str, tokenizer: Tokenizer | None = None) -> list[Block]:
    """Split free-form text into sentence blocks.

    A sentence ends at '.', '!' or '?' followed by whitespace/EOL (unless the
    word is a known abbreviation) or at a hard newline. Raises
    EmptyDocumentError for whitespace-only input.
    """
    tokenizer = tokenizer or WhitespaceTokenizer()
    if not text.strip():
        raise EmptyDocumentError("cannot split an empty document")
    blocks = []
    for idx, (s, e) in enumerate(_sentence_spans(text)):
        sent = text[s:e]
        blocks.append(Block(index=idx, text=sent, token_count=tokenizer.count(sent), char_span=(s, e)))
    return blocks


def import_wiki727k(
    raw: str,
    tokenizer: Tokenizer | None = None,
    *,
    doc_id: str = "doc",
    separator_prefix: str = DEFAULT_SEPARATOR_PREFIX,
) -> Document:
    """Parse one WIKI-727K-format document.

    Lines starting with ``separator_prefix`` are section separators: they are
    consumed, never emitted as blocks. Every other non-blank line is one
    sentence. ``gold_labels[i]`` is True iff block i ends a section and a
    block i+1 exists. Lines that look like a dented separator (start with the
    prefix's first character but do not match it) are kept as content and
    logged.
    """
    tokenizer = tokenizer or WhitespaceTokenizer()
    blocks: list[Block] = []
    section_break_pending = False  # a separator was seen since the last sentence
    boundary_after: list[bool] = []
    offset = 0
    for line in raw.splitlines(keepends=True):
        stripped = line.strip()
        line_start = offset
        offset += len(line)
        if not stripped:
            continue
        if stripped.startswith(separator_prefix):
            if blocks:
                section_break_pending = True
            continue
        if separator_prefix and stripped.startswith(separator_prefix[0]):
            logger.warning(
                "document %s: line %r resembles a separator but does not match "
                "prefix %r; treating as content",
                doc_id, stripped[:40], separator_prefix,
            )
        if blocks:
            boundary_after.append(section_break_pending)
        section_break_pending = False
        s = line_start + (len(line) - len(line.lstrip()))
        e = s + len(stripped)
        blocks.append(
            Block(index=len(blocks), text=stripped, token_count=tokenizer.count(stripped), char_span=(s, e))
        )
    if not blocks:
        raise EmptyDocumentError(f"document {doc_id}: no content sentences")
    return Document(id=doc_id, blocks=blocks, gold_labels=boundary_after, tokenizer_name=tokenizer.name)


def document_from_texts(
    doc_id: str,
    texts: Iterable[str],
    tokenizer: Tokenizer | None = None,
    gold_labels: list[bool] | None = None,
) -> Document:
    """Build a Document from pre-split sentence strings (canonical JSONL path).

    Char spans are synthesized over the newline-joined text.
    """
    tokenizer = tokenizer or WhitespaceTokenizer()
    blocks: list[Block] = []
    offset = 0
    for idx, text in enumerate(texts):
        text = text.strip()
        if not text:
            raise InputError(f"document {doc_id}: block {idx} is empty")
        blocks.append(
            Block(index=idx, text=text, token_count=tokenizer.count(text), char_span=(offset, offset + len(text)))
        )
        offset += len(text) + 1  # newline join
    if not blocks:
        raise EmptyDocumentError(f"document {doc_id}: no blocks")
    return Document(id=doc_id, blocks=blocks, gold_labels=gold_labels, tokenizer_name=tokenizer.name)


def document_to_json(doc: Document) -> dict:
    """Canonical JSONL object: {id, blocks, gold_labels, tokenizer}."""
    return {
        "id": doc.id,
        "blocks": [b.text for b in doc.blocks],
        "gold_labels": doc.gold_labels,
        "tokenizer": doc.tokenizer_name,
    }


def document_from_json(obj: dict, tokenizer: Tokenizer | None = None) -> Document:
    if "id" not in obj:
        raise InputError("document object missing 'id'")
    if "blocks" in obj and obj["blocks"]:
        texts = obj["blocks"]
        if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
            raise InputError(f"document {obj['id']}: 'blocks' must be a list of strings")
        labels = obj.get("gold_labels")
        return document_from_texts(str(obj["id"]), texts, tokenizer, gold_labels=labels)
    if "text" in obj and str(obj.get("text", "")).strip():
        blocks = split_sentences(str(obj["text"]), tokenizer)
        tok = tokenizer or WhitespaceTokenizer()
        return Document(id=str(obj["id"]), blocks=blocks, tokenizer_name=tok.name)
    raise EmptyDocumentError(f"document {obj['id']}: neither 'blocks' nor 'text' present")


def read_documents_jsonl(fp: TextIO, tokenizer: Tokenizer | None = None) -> Iterator[Document]:
    for lineno, line in enumerate(fp, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"line {lineno}: invalid JSON ({exc})") from exc
        yield document_from_json(obj, tokenizer)


def write_documents_jsonl(docs: Iterable[Document], fp: TextIO) -> int:
    count = 0
    for doc in docs:
        fp.write(json.dumps(document_to_json(doc), ensure_ascii=False) + "\n")
        count += 1
    return count
