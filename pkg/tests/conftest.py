"""Shared fixtures: deterministic document and probability generators."""

from __future__ import annotations

import random

import pytest

from chunkforge.blocks import Document, document_from_texts
from chunkforge.tokenizers import WhitespaceTokenizer

WORDS = (
    "orbit lattice granite meadow copper violet harbor signal timber "
    "ember cascade prairie marble anchor beacon cedar drift falcon"
).split()


def make_sentence(rng: random.Random, n_tokens: int) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(n_tokens))


def make_document(
    rng: random.Random,
    n_blocks: int,
    doc_id: str = "doc",
    min_tokens: int = 3,
    max_tokens: int = 12,
) -> Document:
    texts = [make_sentence(rng, rng.randint(min_tokens, max_tokens)) for _ in range(n_blocks)]
    return document_from_texts(doc_id, texts, WhitespaceTokenizer())


def make_sectioned_corpus(rng: random.Random, section_sizes: list[int], sentence_tokens: int = 10) -> str:
    """WIKI-727K-style text with the given sentence count per section."""
    lines = []
    for level, size in enumerate(section_sizes, start=1):
        lines.append(f"========,{min(level, 3)},Section {level}.")
        for _ in range(size):
            lines.append(make_sentence(rng, sentence_tokens))
    return "\n".join(lines) + "\n"


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
