"""Overlapping sliding windows over documents that exceed scorer capacity.

Documents whose total token count fits the scorer are scored in one pass.
Longer documents are decomposed into block-aligned windows packed greedily up
to the capacity, with consecutive windows sharing a trailing overlap of at
least ``overlap_ratio * capacity`` tokens (rounded up to whole blocks, never
less than one block). Gaps predicted by several windows are fused by
arithmetic mean; gaps seen by a single window pass through unchanged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .blocks import Document
from .errors import EmptyDocumentError, InputError
from .scoring import BoundaryProbs, Scorer

logger = logging.getLogger(__name__)

DEFAULT_CAPACITY_TOKENS = 13000
DEFAULT_OVERLAP_RATIO = 0.10


@dataclass(frozen=True)
class WindowPlan:
    """Block-aligned windows covering a document.

    ``windows`` are half-open [start, end) block ranges, ascending by start,
    whose union covers every block. ``flagged`` lists indices of windows whose
    token total exceeds ``capacity_tokens``; these arise from single blocks
    larger than the capacity (and from the minimal bridging around them needed
    to keep every adjacent-block gap covered by at least one window).
    """

    windows: tuple[tuple[int, int], ...]
    capacity_tokens: int
    overlap_ratio: float
    n_blocks: int
    flagged: tuple[int, ...] = field(default_factory=tuple)

    @property
    def is_single(self) -> bool:
        return len(self.windows) == 1


def _greedy_end(tokens: Sequence[int], start: int, capacity: int) -> int:
    """Maximal end such that tokens[start:end] fits capacity; at least start+1."""
    total = tokens[start]
    end = start + 1
    while end < len(tokens) and total + tokens[end] <= capacity:
        total += tokens[end]
        end += 1
    return end


def plan_windows(
    doc: Document,
    capacity_tokens: int = DEFAULT_CAPACITY_TOKENS,
    overlap_ratio: float = DEFAULT_OVERLAP_RATIO,
) -> WindowPlan:
    """Greedy left-to-right packing with a token-based trailing overlap.

    Each window takes the maximal block prefix fitting the capacity. The next
    window starts far enough back that the shared blocks carry at least
    ``overlap_ratio * capacity_tokens`` tokens (>= 1 block). When a block
    cannot fit even on its own, or the required overlap leaves no room to make
    progress, the planner emits a window that exceeds the capacity and flags
    it rather than truncating the block.
    """
    if not doc.blocks:
        raise EmptyDocumentError(f"document {doc.id}: cannot plan windows")
    if capacity_tokens < 1:
        raise InputError(f"capacity_tokens must be >= 1, got {capacity_tokens}")
    if not 0.0 <= overlap_ratio < 0.5:
        raise InputError(f"overlap_ratio must be in [0, 0.5), got {overlap_ratio}")

    tokens = doc.token_counts
    n = len(tokens)
    required_overlap = overlap_ratio * capacity_tokens

    windows: list[tuple[int, int]] = []
    start = 0
    while True:
        end = _greedy_end(tokens, start, capacity_tokens)
        if windows and end <= windows[-1][1]:
            # The overlap plus the next block exceed capacity: force one block
            # of progress so the gap into that block stays covered.
            end = windows[-1][1] + 1
        if windows and start == windows[-1][0]:
            windows[-1] = (start, end)  # subsumes the previous window
        else:
            windows.append((start, end))
        if end >= n:
            break

        prev_start, prev_end = windows[-1]
        # Walk back from the window end until the overlap carries enough tokens.
        next_start = prev_end - 1
        acc = tokens[next_start]
        while next_start > prev_start and acc < required_overlap:
            next_start -= 1
            acc += tokens[next_start]
        next_start = max(next_start, min(prev_start + 1, prev_end - 1))
        # Shed overlap blocks if they leave no room for any new block.
        while next_start < prev_end - 1 and _greedy_end(tokens, next_start, capacity_tokens) <= prev_end:
            next_start += 1
        start = next_start

    flagged = tuple(
        i for i, (s, e) in enumerate(windows) if sum(tokens[s:e]) > capacity_tokens
    )
    for i in flagged:
        s, e = windows[i]
        logger.warning(
            "document %s: window [%d, %d) holds %d tokens, over capacity %d",
            doc.id, s, e, sum(tokens[s:e]), capacity_tokens,
        )
    return WindowPlan(
        windows=tuple(windows),
        capacity_tokens=capacity_tokens,
        overlap_ratio=overlap_ratio,
        n_blocks=n,
        flagged=flagged,
    )


def fuse_probs(plan: WindowPlan, per_window: Sequence[BoundaryProbs]) -> BoundaryProbs:
    """Average per-window predictions into one probability per document gap.

    Window w covers document gap g iff it contains blocks g and g+1. Identical
    contributions short-circuit to their common value, so a context-free
    scorer fuses to exactly its single-pass output (the IEEE mean of three
    equal floats is not always that float).
    """
    if len(per_window) != len(plan.windows):
        raise InputError(
            f"{len(per_window)} probability vectors for {len(plan.windows)} windows"
        )
    for w, ((s, e), probs) in enumerate(zip(plan.windows, per_window)):
        if len(probs) != e - s - 1:
            raise InputError(
                f"window {w} spans [{s}, {e}) but carries {len(probs)} probabilities"
            )

    fused: BoundaryProbs = []
    for gap in range(plan.n_blocks - 1):
        votes = [
            per_window[w][gap - s]
            for w, (s, e) in enumerate(plan.windows)
            if s <= gap <= e - 2
        ]
        if not votes:
            raise InputError(f"gap {gap} covered by no window; plan is malformed")
        if min(votes) == max(votes):
            fused.append(votes[0])
        else:
            fused.append(sum(votes) / len(votes))
    return fused


def score_document(
    doc: Document,
    scorer: Scorer,
    capacity_tokens: int = DEFAULT_CAPACITY_TOKENS,
    overlap_ratio: float = DEFAULT_OVERLAP_RATIO,
) -> BoundaryProbs:
    """Plan windows, score each, and fuse into N-1 document-level probabilities."""
    plan = plan_windows(doc, capacity_tokens, overlap_ratio)
    per_window = [scorer.score(doc.blocks[s:e], doc_id=doc.id) for s, e in plan.windows]
    return fuse_probs(plan, per_window)
