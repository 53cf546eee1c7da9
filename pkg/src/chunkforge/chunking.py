"""Heuristic segmentation: boundary probabilities -> final chunks.

Three stages, coarse to fine:

1. threshold_segment — insert a boundary after block i wherever
   probs[i] >= t1 and take the maximal runs in between.
2. split_long — recursively split any chunk above ``max_tokens`` at its
   highest-probability internal gap (leftmost on ties).
3. merge_short — repeatedly merge the smallest chunk below ``min_tokens``
   toward the bounding gap with the smaller probability (the side with
   stronger semantic continuity); edge chunks merge inward, ties merge left.

Merging can push a chunk back above ``max_tokens``, so one final splitting
pass runs after stage 3 and then the pipeline stops; that pass prefers split
points keeping both halves above ``min_tokens`` and falls back to the plain
highest-probability gap when no such point exists. A sub-minimum chunk
produced by this last pass is accepted as-is (no oscillation).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .blocks import Block, Document
from .errors import ConfigError, InputError
from .scoring import BoundaryProbs

logger = logging.getLogger(__name__)

DEFAULT_T1 = 0.5
DEFAULT_MAX_TOKENS = 700
DEFAULT_MIN_TOKENS = 85

Span = tuple[int, int]  # half-open block range


@dataclass(frozen=True)
class ChunkerConfig:
    t1: float = DEFAULT_T1
    max_tokens: int = DEFAULT_MAX_TOKENS
    min_tokens: int = DEFAULT_MIN_TOKENS

    def validate(self) -> "ChunkerConfig":
        if not 0.0 <= self.t1 <= 1.0:
            raise ConfigError(f"t1 must be in [0, 1], got {self.t1}")
        if self.max_tokens < 1:
            raise ConfigError(f"max_tokens must be positive, got {self.max_tokens}")
        if self.min_tokens < 0:
            raise ConfigError(f"min_tokens must be non-negative, got {self.min_tokens}")
        if self.min_tokens >= self.max_tokens:
            raise ConfigError(
                f"min_tokens ({self.min_tokens}) must be below max_tokens ({self.max_tokens})"
            )
        return self


@dataclass(frozen=True)
class Chunk:
    """A contiguous block range with its token total and joined text."""

    block_range: Span
    token_count: int
    text: str

    @classmethod
    def from_span(cls, blocks: Sequence[Block], span: Span) -> "Chunk":
        s, e = span
        members = blocks[s:e]
        return cls(
            block_range=span,
            token_count=sum(b.token_count for b in members),
            text=" ".join(b.text for b in members),
        )


def _check_probs(probs: BoundaryProbs, n_blocks: int) -> None:
    if len(probs) != n_blocks - 1:
        raise InputError(f"{len(probs)} probabilities for {n_blocks} blocks (expected N-1)")


def _threshold_spans(probs: BoundaryProbs, t1: float, n_blocks: int) -> list[Span]:
    spans: list[Span] = []
    start = 0
    for gap, p in enumerate(probs):
        if p >= t1:
            spans.append((start, gap + 1))
            start = gap + 1
    spans.append((start, n_blocks))
    return spans


def _split_span(
    span: Span,
    probs: BoundaryProbs,
    tokens: Sequence[int],
    max_tokens: int,
    min_tokens: int | None,
) -> list[Span]:
    """Recursive splitting of over-long spans.

    The split lands on the internal gap with the highest probability
    (leftmost on ties). When ``min_tokens`` is given, gaps leaving both
    halves at or above it are preferred; the unrestricted maximum is the
    fallback. Each split strictly shrinks the block count, so recursion
    terminates.
    """
    s, e = span
    total = sum(tokens[s:e])
    if total <= max_tokens:
        return [span]
    if e - s == 1:
        logger.warning(
            "block %d alone holds %d tokens (max %d); passing through oversize", s, total, max_tokens
        )
        return [span]

    def best_gap(candidates: list[int]) -> int | None:
        best = None
        for gap in candidates:
            if best is None or probs[gap] > probs[best]:
                best = gap
        return best

    all_gaps = list(range(s, e - 1))
    chosen = None
    if min_tokens is not None:
        prefix = 0
        admissible = []
        for gap in all_gaps:
            prefix += tokens[gap]
            if prefix >= min_tokens and total - prefix >= min_tokens:
                admissible.append(gap)
        chosen = best_gap(admissible)
    if chosen is None:
        chosen = best_gap(all_gaps)
    cut = chosen + 1
    left = _split_span((s, cut), probs, tokens, max_tokens, min_tokens)
    right = _split_span((cut, e), probs, tokens, max_tokens, min_tokens)
    return left + right


def _merge_spans(
    spans: list[Span],
    probs: BoundaryProbs,
    tokens: Sequence[int],
    min_tokens: int,
) -> list[Span]:
    """Smallest-first merging of sub-minimum spans until a fixpoint."""
    spans = list(spans)
    while len(spans) > 1:
        sizes = [sum(tokens[s:e]) for s, e in spans]
        small = [i for i, size in enumerate(sizes) if size < min_tokens]
        if not small:
            break
        victim = min(small, key=lambda i: (sizes[i], i))
        if victim == 0:
            into = 1
        elif victim == len(spans) - 1:
            into = victim - 1
        else:
            left_gap = spans[victim][0] - 1
            right_gap = spans[victim][1] - 1
            # Smaller boundary probability = stronger continuity; ties go left.
            into = victim - 1 if probs[left_gap] <= probs[right_gap] else victim + 1
        lo, hi = min(victim, into), max(victim, into)
        spans[lo:hi + 1] = [(spans[lo][0], spans[hi][1])]
    return spans


def threshold_segment(blocks: Sequence[Block], probs: BoundaryProbs, t1: float = DEFAULT_T1) -> list[Chunk]:
    """Stage 1: boundary after block i iff probs[i] >= t1 (inclusive)."""
    _check_probs(probs, len(blocks))
    return [Chunk.from_span(blocks, span) for span in _threshold_spans(probs, t1, len(blocks))]


def split_long(
    chunk: Chunk,
    blocks: Sequence[Block],
    probs: BoundaryProbs,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> list[Chunk]:
    """Stage 2: recursively split an over-long chunk at its max-probability gap."""
    _check_probs(probs, len(blocks))
    tokens = [b.token_count for b in blocks]
    spans = _split_span(chunk.block_range, probs, tokens, max_tokens, None)
    return [Chunk.from_span(blocks, span) for span in spans]


def merge_short(
    chunks: Sequence[Chunk],
    blocks: Sequence[Block],
    probs: BoundaryProbs,
    min_tokens: int = DEFAULT_MIN_TOKENS,
) -> list[Chunk]:
    """Stage 3: merge sub-minimum chunks toward the weaker boundary."""
    _check_probs(probs, len(blocks))
    tokens = [b.token_count for b in blocks]
    spans = _merge_spans([c.block_range for c in chunks], probs, tokens, min_tokens)
    return [Chunk.from_span(blocks, span) for span in spans]


def chunk_spans(
    probs: BoundaryProbs,
    tokens: Sequence[int],
    config: ChunkerConfig,
) -> list[Span]:
    """Full pipeline on raw token counts; returns block spans."""
    config.validate()
    _check_probs(probs, len(tokens))
    spans = _threshold_spans(probs, config.t1, len(tokens))
    spans = [
        piece
        for span in spans
        for piece in _split_span(span, probs, tokens, config.max_tokens, None)
    ]
    spans = _merge_spans(spans, probs, tokens, config.min_tokens)
    spans = [
        piece
        for span in spans
        for piece in _split_span(span, probs, tokens, config.max_tokens, config.min_tokens)
    ]
    return spans


def chunk_document(doc: Document, probs: BoundaryProbs, config: ChunkerConfig | None = None) -> list[Chunk]:
    """Threshold, split, merge; returns chunks tiling the document in order."""
    config = config or ChunkerConfig()
    spans = chunk_spans(probs, doc.token_counts, config)
    return [Chunk.from_span(doc.blocks, span) for span in spans]


def chunk_to_json(doc_id: str, index: int, chunk: Chunk, tokenizer_name: str) -> dict:
    """Chunk output line: {doc_id, chunk_index, block_start, block_end, token_count, text}."""
    return {
        "doc_id": doc_id,
        "chunk_index": index,
        "block_start": chunk.block_range[0],
        "block_end": chunk.block_range[1],
        "token_count": chunk.token_count,
        "text": chunk.text,
        "tokenizer": tokenizer_name,
    }
