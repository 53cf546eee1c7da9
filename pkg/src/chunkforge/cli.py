"""Command-line entry point.

Thin wrappers over the library: import corpora, chunk documents, evaluate
boundaries, build and query fused-vector indexes. Exit codes: 0 success,
2 usage/validation error, 3 scorer/transport failure.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import blocks as blocklib
from .chunking import chunk_to_json
from .config import load_config
from .errors import ChunkforgeError, InputError, ScorerProtocolError, ScorerTransportError
from .evaluation import binarize, corpus_metrics
from .fusion import fuse
from .index import FusedIndex, IndexEntry
from .pipeline import process_documents
from .scoring import build_scorer
from .tokenizers import get_tokenizer

EXIT_VALIDATION = 2
EXIT_SCORER = 3


def _cli_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ScorerTransportError, ScorerProtocolError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_SCORER)
        except ChunkforgeError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)

    return wrapper


_CONFIG_FLAGS = [
    click.option("--scorer", type=click.Choice(["mock", "file", "remote"]), default=None,
                 help="Boundary scorer implementation."),
    click.option("--endpoint", default=None, help="Remote scorer URL (or CHUNKFORGE_ENDPOINT)."),
    click.option("--probs", default=None, help="Stored-probability file for the file scorer."),
    click.option("--seed", type=int, default=None, help="Mock scorer seed."),
    click.option("--t1", type=float, default=None, help="Boundary probability threshold."),
    click.option("--max-tokens", "max_tokens", type=int, default=None, help="Chunk token upper limit."),
    click.option("--min-tokens", "min_tokens", type=int, default=None, help="Chunk token lower limit."),
    click.option("--capacity", type=int, default=None, help="Scorer window capacity in tokens."),
    click.option("--overlap", type=float, default=None, help="Window overlap ratio in [0, 0.5)."),
    click.option("--workers", type=int, default=None, help="Document worker pool size."),
    click.option("--tokenizer", default=None, help="Registered tokenizer name."),
    click.option("--config", "config_path", type=click.Path(), default=None,
                 help="YAML/JSON config file (flags override it)."),
]


def _with_config_flags(fn):
    for flag in reversed(_CONFIG_FLAGS):
        fn = flag(fn)
    return fn


def _resolve_config(config_path, **flags):
    return load_config(config_path, overrides=flags).validate()


@click.group()
def main():
    """Semantic chunking pipeline: import, chunk, evaluate, index, search."""


@main.command("import")
@click.argument("in_path", type=click.Path(exists=True))
@click.argument("out_path", type=click.Path())
@click.option("--separator-prefix", default="========", show_default=True,
              help="Section-separator line prefix.")
@click.option("--tokenizer", default="whitespace", show_default=True)
@_cli_errors
def cmd_import(in_path: str, out_path: str, separator_prefix: str, tokenizer: str):
    """Convert WIKI-727K-format text into canonical document JSONL.

    IN_PATH may be a single corpus file (one document) or a directory
    (one document per file, ids are relative paths).
    """
    tok = get_tokenizer(tokenizer)
    src = Path(in_path)
    if src.is_dir():
        files = sorted(p for p in src.rglob("*") if p.is_file())
        items = [(str(p.relative_to(src)).replace("\\", "/"), p) for p in files]
    else:
        items = [(src.stem, src)]
    if not items:
        raise InputError(f"{in_path}: no input files")
    docs = (
        blocklib.import_wiki727k(
            path.read_text(encoding="utf-8"), tok, doc_id=doc_id, separator_prefix=separator_prefix
        )
        for doc_id, path in items
    )
    with open(out_path, "w", encoding="utf-8") as fp:
        count = blocklib.write_documents_jsonl(docs, fp)
    click.echo(f"imported {count} documents -> {out_path}", err=True)


@main.command("chunk")
@click.argument("in_path", type=click.Path(exists=True))
@click.argument("out_path", type=click.Path())
@_with_config_flags
@_cli_errors
def cmd_chunk(in_path: str, out_path: str, config_path, **flags):
    """Chunk canonical JSONL documents into chunk JSONL."""
    config = _resolve_config(config_path, **flags)
    tok = get_tokenizer(config.tokenizer)
    with open(in_path, "r", encoding="utf-8") as fp:
        docs = list(blocklib.read_documents_jsonl(fp, tok))
    if not docs:
        raise InputError(f"{in_path}: no documents")
    with open(out_path, "w", encoding="utf-8") as out:
        total = 0
        for doc, chunks in process_documents(docs, config):
            for i, chunk in enumerate(chunks):
                out.write(json.dumps(chunk_to_json(doc.id, i, chunk, tok.name), ensure_ascii=False) + "\n")
            total += len(chunks)
    click.echo(f"wrote {total} chunks -> {out_path}", err=True)


def _labels_from_pred_file(path: str, t1: float) -> dict[str, object]:
    """Predictions by doc id: probability vectors, label vectors, or chunk rows."""
    probs_by_doc: dict[str, list[float]] = {}
    labels_by_doc: dict[str, list[bool]] = {}
    chunk_ends: dict[str, list[tuple[int, int]]] = {}
    with open(path, "r", encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            if "probs" in obj:
                probs_by_doc[str(obj["id"])] = [float(p) for p in obj["probs"]]
            elif "labels" in obj:
                labels_by_doc[str(obj["id"])] = [bool(v) for v in obj["labels"]]
            elif "block_start" in obj and "block_end" in obj:
                doc_id = str(obj.get("doc_id", obj.get("id")))
                chunk_ends.setdefault(doc_id, []).append((int(obj["block_start"]), int(obj["block_end"])))
            else:
                raise InputError(f"{path}:{lineno}: expected probs, labels, or chunk rows")
    out: dict[str, object] = dict(labels_by_doc)
    for doc_id, probs in probs_by_doc.items():
        out[doc_id] = binarize(probs, t1)
    for doc_id, spans in chunk_ends.items():
        out[doc_id] = sorted(spans)
    return out


def _chunk_spans_to_labels(doc_id: str, spans: list[tuple[int, int]], n_blocks: int) -> list[bool]:
    if spans[0][0] != 0 or spans[-1][1] != n_blocks or any(
        a[1] != b[0] for a, b in zip(spans, spans[1:])
    ):
        raise InputError(f"document {doc_id}: chunks do not tile {n_blocks} blocks")
    ends = {e for _, e in spans[:-1]}
    return [(i + 1) in ends for i in range(n_blocks - 1)]


@main.command("evaluate")
@click.argument("pred_path", type=click.Path(exists=True))
@click.argument("gold_path", type=click.Path(exists=True))
@click.option("--t1", type=float, default=0.5, show_default=True,
              help="Binarization threshold for probability predictions.")
@click.option("--format", "fmt", type=click.Choice(["json", "table"]), default="json", show_default=True)
@_cli_errors
def cmd_evaluate(pred_path: str, gold_path: str, t1: float, fmt: str):
    """Boundary precision/recall/F1 of predictions against gold labels.

    PRED_PATH holds JSONL predictions ({id, probs}, {id, labels}, or chunk
    rows from `chunkforge chunk`); GOLD_PATH holds canonical documents with
    gold_labels.
    """
    with open(gold_path, "r", encoding="utf-8") as fp:
        gold_docs = list(blocklib.read_documents_jsonl(fp))
    if not gold_docs:
        raise InputError(f"{gold_path}: no documents")
    preds = _labels_from_pred_file(pred_path, t1)
    gold_ids = [d.id for d in gold_docs]
    missing = [i for i in gold_ids if i not in preds]
    extra = sorted(set(preds) - set(gold_ids))
    if missing or extra:
        raise InputError(f"document ids do not match: missing={missing[:5]} extra={extra[:5]}")
    pairs = []
    for doc in gold_docs:
        if doc.gold_labels is None:
            raise InputError(f"document {doc.id}: gold file carries no gold_labels")
        pred = preds[doc.id]
        if pred and isinstance(pred[0], tuple):
            pred = _chunk_spans_to_labels(doc.id, pred, len(doc.blocks))
        if len(pred) != len(doc.gold_labels):
            raise InputError(
                f"document {doc.id}: {len(pred)} predicted labels vs {len(doc.gold_labels)} gold"
            )
        pairs.append((pred, doc.gold_labels))
    report = corpus_metrics(pairs)
    click.echo(report.to_json() if fmt == "json" else report.to_table())


@main.command("index")
@click.argument("embeddings_path", type=click.Path(exists=True))
@click.argument("index_path", type=click.Path())
@click.option("--debug-export", type=click.Path(), default=None,
              help="Also write a JSONL dump of the index.")
@_cli_errors
def cmd_index(embeddings_path: str, index_path: str, debug_export: str | None):
    """Fuse per-chunk sub-segment embeddings and persist the index.

    EMBEDDINGS_PATH: JSONL {chunk_id, vectors: [[...], ...], payload?}.
    """
    index = FusedIndex()
    count = 0
    with open(embeddings_path, "r", encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if "chunk_id" not in obj or "vectors" not in obj:
                raise InputError(f"{embeddings_path}:{lineno}: expected {{chunk_id, vectors}}")
            index.upsert(
                IndexEntry(
                    chunk_id=str(obj["chunk_id"]),
                    fused=fuse(obj["vectors"]),
                    payload=obj.get("payload"),
                )
            )
            count += 1
    if count == 0:
        raise InputError(f"{embeddings_path}: no entries")
    index.save(index_path)
    if debug_export:
        index.export_jsonl(debug_export)
    click.echo(f"indexed {count} chunks -> {index_path}", err=True)


@main.command("search")
@click.argument("index_path", type=click.Path(exists=True))
@click.argument("query_path", type=str)
@click.option("--top-k", type=int, default=10, show_default=True)
@_cli_errors
def cmd_search(index_path: str, query_path: str, top_k: int):
    """Top-k corrected-cosine search. QUERY_PATH is a JSON array file or '-' for stdin."""
    if query_path == "-":
        raw = sys.stdin.read()
    else:
        raw = Path(query_path).read_text(encoding="utf-8")
    try:
        query = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"query is not valid JSON: {exc}") from exc
    if not isinstance(query, list):
        raise InputError("query must be a JSON array of numbers")
    index = FusedIndex.load(index_path)
    if len(index) == 0:
        click.echo(json.dumps({"results": [], "top_k": top_k}))
        return
    results = index.search(query, top_k)
    click.echo(json.dumps({
        "results": [{"chunk_id": cid, "score": score} for cid, score in results],
        "top_k": top_k,
    }))


if __name__ == "__main__":
    main()
