"""Document-level composition: score through windows, then chunk.

Documents may be processed by a bounded worker pool; output order always
matches input order regardless of completion order, and results are
deterministic for a fixed config (mock seed included).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Iterator

from .blocks import Document
from .chunking import Chunk, chunk_document
from .config import RunConfig
from .scoring import BoundaryProbs, Scorer, build_scorer
from .windows import score_document


def process_document(doc: Document, scorer: Scorer, config: RunConfig) -> tuple[BoundaryProbs, list[Chunk]]:
    probs = score_document(doc, scorer, config.capacity, config.overlap)
    chunks = chunk_document(doc, probs, config.chunker_config())
    return probs, chunks


def process_documents(
    docs: Iterable[Document],
    config: RunConfig,
    scorer: Scorer | None = None,
) -> Iterator[tuple[Document, list[Chunk]]]:
    """Chunk documents concurrently, yielding in input order."""
    config.validate()
    scorer = scorer or build_scorer(config.scorer_config())
    docs = list(docs)
    if config.workers <= 1 or len(docs) <= 1:
        for doc in docs:
            yield doc, process_document(doc, scorer, config)[1]
        return
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        futures = [pool.submit(process_document, doc, scorer, config) for doc in docs]
        for doc, future in zip(docs, futures):
            yield doc, future.result()[1]
