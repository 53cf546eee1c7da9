"""HTTP service wrapping the chunking engine.

Long-running, multi-client surface over the same core the CLI uses: sentence
splitting, document chunking, and a fused-vector index held in process
memory (optionally persisted). Input validation errors map to 422/400;
scorer backend failures map to 502.
"""

from __future__ import annotations

import os
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .blocks import document_from_texts, split_sentences
from .chunking import chunk_to_json
from .config import RunConfig, load_config
from .errors import ChunkforgeError, ScorerError
from .evaluation import EvalReport, binarize, corpus_metrics
from .fusion import fuse
from .index import FusedIndex, IndexEntry
from .pipeline import process_document
from .scoring import build_scorer
from .tokenizers import get_tokenizer


class SplitRequest(BaseModel):
    text: str


class BlockOut(BaseModel):
    index: int
    text: str
    token_count: int
    char_start: int
    char_end: int


class SplitResponse(BaseModel):
    blocks: list[BlockOut]
    tokenizer: str


class DocumentIn(BaseModel):
    id: str
    blocks: list[str] | None = None
    text: str | None = None


class ChunkOverrides(BaseModel):
    t1: float | None = None
    max_tokens: int | None = None
    min_tokens: int | None = None
    capacity: int | None = None
    overlap: float | None = None
    seed: int | None = None


class ChunkRequest(BaseModel):
    documents: list[DocumentIn] = Field(min_length=1)
    overrides: ChunkOverrides | None = None


class ChunkOut(BaseModel):
    doc_id: str
    chunk_index: int
    block_start: int
    block_end: int
    token_count: int
    text: str
    tokenizer: str


class ChunkResponse(BaseModel):
    chunks: list[ChunkOut]


class UpsertRequest(BaseModel):
    chunk_id: str
    vectors: list[list[float]] = Field(min_length=1)
    payload: dict | None = None


class SearchRequest(BaseModel):
    query: list[float] = Field(min_length=1)
    top_k: int = 10


class SearchHit(BaseModel):
    chunk_id: str
    score: float


class SearchResponse(BaseModel):
    results: list[SearchHit]


class EvalDocument(BaseModel):
    id: str
    gold: list[bool]
    pred_probs: list[float] | None = None
    pred_labels: list[bool] | None = None


class EvaluateRequest(BaseModel):
    documents: list[EvalDocument] = Field(min_length=1)
    t1: float = 0.5


class EvaluateResponse(BaseModel):
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    macro_f1: float
    doc_count: int

    @classmethod
    def from_report(cls, report: EvalReport) -> "EvaluateResponse":
        return cls(
            tp=report.tp, fp=report.fp, fn=report.fn,
            precision=report.precision, recall=report.recall,
            f1=report.f1, macro_f1=report.macro_f1, doc_count=report.doc_count,
        )


def create_app(config: RunConfig | None = None, index_path: str | None = None) -> FastAPI:
    config = (config or RunConfig()).validate()
    tokenizer = get_tokenizer(config.tokenizer)
    scorer = build_scorer(config.scorer_config())

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if index_path and Path(index_path).exists():
            app.state.index = FusedIndex.load(index_path)
        yield

    app = FastAPI(title="chunkforge", version=__version__, lifespan=lifespan)
    app.state.index = FusedIndex()
    app.state.config = config

    def _bad_request(exc: ChunkforgeError) -> HTTPException:
        if isinstance(exc, ScorerError):
            return HTTPException(status_code=502, detail=str(exc))
        return HTTPException(status_code=422, detail=str(exc))

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "version": __version__,
            "scorer": config.scorer,
            "tokenizer": tokenizer.name,
            "index_entries": len(app.state.index),
        }

    @app.post("/split", response_model=SplitResponse)
    def split(request: SplitRequest):
        try:
            blocks = split_sentences(request.text, tokenizer)
        except ChunkforgeError as exc:
            raise _bad_request(exc) from exc
        return SplitResponse(
            blocks=[
                BlockOut(
                    index=b.index, text=b.text, token_count=b.token_count,
                    char_start=b.char_span[0], char_end=b.char_span[1],
                )
                for b in blocks
            ],
            tokenizer=tokenizer.name,
        )

    @app.post("/chunk", response_model=ChunkResponse)
    def chunk(request: ChunkRequest):
        overrides = request.overrides.model_dump(exclude_none=True) if request.overrides else {}
        try:
            run_config = load_config(None, overrides={**config.to_dict(), **overrides}).validate()
            run_scorer = scorer if "seed" not in overrides else build_scorer(run_config.scorer_config())
            out: list[ChunkOut] = []
            for doc_in in request.documents:
                if doc_in.blocks:
                    doc = document_from_texts(doc_in.id, doc_in.blocks, tokenizer)
                elif doc_in.text and doc_in.text.strip():
                    doc = document_from_texts(
                        doc_in.id, [b.text for b in split_sentences(doc_in.text, tokenizer)], tokenizer
                    )
                else:
                    raise HTTPException(status_code=422, detail=f"document {doc_in.id}: no blocks or text")
                _, chunks = process_document(doc, run_scorer, run_config)
                out.extend(
                    ChunkOut(**chunk_to_json(doc.id, i, c, tokenizer.name)) for i, c in enumerate(chunks)
                )
        except ChunkforgeError as exc:
            raise _bad_request(exc) from exc
        return ChunkResponse(chunks=out)

    @app.post("/index/upsert")
    def index_upsert(request: UpsertRequest):
        try:
            app.state.index.upsert(
                IndexEntry(chunk_id=request.chunk_id, fused=fuse(request.vectors), payload=request.payload)
            )
        except ChunkforgeError as exc:
            raise _bad_request(exc) from exc
        return {"entries": len(app.state.index)}

    @app.post("/index/search", response_model=SearchResponse)
    def index_search(request: SearchRequest):
        try:
            hits = app.state.index.search(request.query, request.top_k)
        except ChunkforgeError as exc:
            raise _bad_request(exc) from exc
        return SearchResponse(results=[SearchHit(chunk_id=c, score=s) for c, s in hits])

    @app.post("/index/save")
    def index_save():
        if not index_path:
            raise HTTPException(status_code=400, detail="service started without an index path")
        try:
            app.state.index.save(index_path)
        except ChunkforgeError as exc:
            raise _bad_request(exc) from exc
        return {"saved": index_path, "entries": len(app.state.index)}

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate(request: EvaluateRequest):
        pairs = []
        try:
            for doc in request.documents:
                if doc.pred_labels is not None:
                    pred = doc.pred_labels
                elif doc.pred_probs is not None:
                    pred = binarize(doc.pred_probs, request.t1)
                else:
                    raise HTTPException(
                        status_code=422, detail=f"document {doc.id}: no pred_probs or pred_labels"
                    )
                pairs.append((pred, doc.gold))
            report = corpus_metrics(pairs)
        except ChunkforgeError as exc:
            raise _bad_request(exc) from exc
        return EvaluateResponse.from_report(report)

    return app


def main() -> None:
    """Serve the API with uvicorn; flags fall back to environment variables."""
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(prog="chunkforge-api", description="Serve the chunking engine over HTTP.")
    parser.add_argument("--host", default=os.environ.get("CHUNKFORGE_HOST", "127.0.0.1"))
    parser.add_argument("--port", type=int, default=int(os.environ.get("CHUNKFORGE_PORT", "8400")))
    parser.add_argument("--config", default=os.environ.get("CHUNKFORGE_CONFIG"),
                        help="YAML/JSON run-config file")
    parser.add_argument("--index", default=os.environ.get("CHUNKFORGE_INDEX"),
                        help="index file to load at startup and write on /index/save")
    args = parser.parse_args()

    config = load_config(args.config) if args.config else RunConfig()
    app = create_app(config, index_path=args.index)
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
