"""Acceptance criteria, one test per criterion, each printing PASS or FAIL.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines. Every tolerance is pinned here; nothing is deferred to calibration.
"""

from __future__ import annotations

import json
import random
import time

import numpy as np
import pytest
from click.testing import CliRunner

from chunkforge.blocks import document_from_texts
from chunkforge.chunking import ChunkerConfig, chunk_spans
from chunkforge.cli import main as cli_main
from chunkforge.evaluation import boundary_metrics
from chunkforge.fusion import average_similarity, corrected_score, fuse
from chunkforge.index import FusedIndex, IndexEntry, record_size
from chunkforge.scoring import MockScorer
from chunkforge.windows import plan_windows, score_document

from conftest import make_document, make_sentence
from test_chunking import random_instance, reference_chunker


def _verdict(name: str, ok: bool) -> None:
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}")


def test_vector_fusion_exactness_1000_random_cases():
    """score(fuse(V), q) equals the mean sub-segment cosine within 1e-9."""
    rng = np.random.default_rng(20240817)
    started = time.monotonic()
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 257))
        d = int(rng.integers(2, 513))
        vectors = rng.normal(size=(n, d))
        vectors[np.linalg.norm(vectors, axis=1) < 1e-12] = 1.0  # keep vectors nonzero
        query = rng.normal(size=d)
        if np.linalg.norm(query) < 1e-12:
            query[0] = 1.0
        gap = abs(corrected_score(fuse(vectors), query) - average_similarity(vectors, query))
        worst = max(worst, gap)
    elapsed = time.monotonic() - started
    ok = worst <= 1e-9 and elapsed < 10.0
    _verdict(f"vector-fusion-exactness (worst gap {worst:.2e}, {elapsed:.2f}s)", ok)
    assert worst <= 1e-9
    assert elapsed < 10.0


def test_fused_index_storage_and_compute_shape(tmp_path):
    """Entries cost d+2 scalars and one corrected cosine each, whatever n is."""
    rng = np.random.default_rng(7)
    d = 64
    sizes = []
    for n in (1, 256):
        fused = fuse(rng.normal(size=(n, d)))
        assert fused.v_f.shape == (d,)  # d floats + k + n
        index = FusedIndex()
        index.upsert(IndexEntry(chunk_id="entry", fused=fused))
        path = tmp_path / f"n{n}.idx"
        index.save(path)
        sizes.append(path.stat().st_size)
    same_size = sizes[0] == sizes[1] == 20 + record_size(d, "entry")

    counters = []
    for sub_segments in (1, 200):
        index = FusedIndex()
        for i in range(50):
            index.upsert(IndexEntry(chunk_id=f"c{i}", fused=fuse(rng.normal(size=(sub_segments, d)))))
        before = index.scores_computed
        index.search(rng.normal(size=d), 10)
        counters.append(index.scores_computed - before)
    one_per_entry = counters == [50, 50]

    ok = same_size and one_per_entry
    _verdict(f"fused-index-storage-shape (record bytes {sizes}, scored {counters})", ok)
    assert same_size
    assert one_per_entry


def test_window_fusion_oracle_equality():
    """Windowed scoring equals whole-document scoring for a context-free scorer."""
    rng = random.Random(41)
    scorer = MockScorer(seed=404)
    all_equal = True
    for trial in range(50):
        doc = make_document(rng, rng.randint(100, 500), doc_id=f"doc{trial}")
        capacity = max(20, doc.total_tokens // 3)
        plan = plan_windows(doc, capacity, 0.10)
        assert len(plan.windows) >= 3, "capacity must force at least three windows"
        fused = score_document(doc, scorer, capacity, 0.10)
        all_equal = all_equal and fused == scorer.score(doc.blocks)
    _verdict("window-fusion-oracle-equality (50 docs, >=3 windows)", all_equal)
    assert all_equal


def test_chunker_constraint_suite():
    """Partition, length bounds, and reference equality on 500 random instances."""
    rng = random.Random(505)
    failures = []
    for trial in range(500):
        probs, tokens, config = random_instance(rng)
        spans = chunk_spans(probs, tokens, config)

        tiles = spans[0][0] == 0 and spans[-1][1] == len(tokens) and all(
            a[1] == b[0] for a, b in zip(spans, spans[1:])
        )
        if not tiles:
            failures.append((trial, "partition"))
        for s, e in spans:
            total = sum(tokens[s:e])
            if total > config.max_tokens and e - s > 1:
                failures.append((trial, f"over max: {(s, e)}"))
            if total < config.min_tokens and len(spans) > 1:
                failures.append((trial, f"under min: {(s, e)}"))
        if spans != reference_chunker(probs, tokens, config):
            failures.append((trial, "reference mismatch"))
    _verdict(f"chunker-constraints (500 instances, {len(failures)} violations)", not failures)
    assert not failures, failures[:5]


def test_end_to_end_gold_reproduction(tmp_path):
    """Import 20 corpus docs, chunk with gold probabilities, evaluate to F1 = 1.0."""
    rng = random.Random(808)
    corpus_dir = tmp_path / "corpus"
    corpus_dir.mkdir()
    gold_sections = {}
    for d in range(20):
        sizes = [rng.randint(9, 60) for _ in range(rng.randint(2, 6))]
        lines = []
        for level, size in enumerate(sizes, start=1):
            lines.append(f"========,{min(level, 3)},Part {level}.")
            lines.extend(make_sentence(rng, 10) for _ in range(size))
        name = f"{d:02d}.txt"
        (corpus_dir / name).write_text("\n".join(lines) + "\n")
        gold_sections[name] = sizes

    runner = CliRunner()
    docs_path = tmp_path / "docs.jsonl"
    result = runner.invoke(cli_main, ["import", str(corpus_dir), str(docs_path)], catch_exceptions=False)
    assert result.exit_code == 0

    probs_path = tmp_path / "probs.jsonl"
    with open(probs_path, "w") as fp:
        for line in docs_path.read_text().splitlines():
            doc = json.loads(line)
            fp.write(
                json.dumps(
                    {"id": doc["id"], "probs": [1.0 if b else 0.0 for b in doc["gold_labels"]]}
                )
                + "\n"
            )

    chunks_path = tmp_path / "chunks.jsonl"
    result = runner.invoke(
        cli_main,
        ["chunk", str(docs_path), str(chunks_path), "--scorer", "file", "--probs", str(probs_path)],
        catch_exceptions=False,
    )
    assert result.exit_code == 0

    sections_ok = True
    rows = [json.loads(l) for l in chunks_path.read_text().splitlines()]
    for name, sizes in gold_sections.items():
        expected, start = [], 0
        for size in sizes:
            expected.append((start, start + size))
            start += size
        got = sorted(
            (r["block_start"], r["block_end"]) for r in rows if r["doc_id"] == name
        )
        sections_ok = sections_ok and got == expected

    result = runner.invoke(
        cli_main, ["evaluate", str(chunks_path), str(docs_path)], catch_exceptions=False
    )
    assert result.exit_code == 0
    report = json.loads(result.output)
    perfect = (report["precision"], report["recall"], report["f1"]) == (1.0, 1.0, 1.0)

    _verdict(f"end-to-end-gold-reproduction (20 docs, report {report['f1']})", sections_ok and perfect)
    assert sections_ok
    assert perfect


def test_metric_oracle_exhaustive_pairs():
    """boundary_metrics agrees with direct enumeration on all 2^6 x 2^6 pairs."""
    mismatches = 0
    for p_bits in range(64):
        pred = [(p_bits >> i) & 1 == 1 for i in range(6)]
        for g_bits in range(64):
            gold = [(g_bits >> i) & 1 == 1 for i in range(6)]
            tp = sum(1 for i in range(6) if pred[i] and gold[i])
            fp = sum(1 for i in range(6) if pred[i] and not gold[i])
            fn = sum(1 for i in range(6) if gold[i] and not pred[i])
            precision = tp / (tp + fp) if tp + fp else 0.0
            recall = tp / (tp + fn) if tp + fn else 0.0
            f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
            report = boundary_metrics(pred, gold)
            if (report.tp, report.fp, report.fn) != (tp, fp, fn):
                mismatches += 1
            elif abs(report.precision - precision) > 1e-12 or abs(report.recall - recall) > 1e-12:
                mismatches += 1
            elif abs(report.f1 - f1) > 1e-12:
                mismatches += 1
    _verdict(f"metric-oracle-exhaustive (4096 pairs, {mismatches} mismatches)", mismatches == 0)
    assert mismatches == 0


def test_metric_oracle_published_row_consistency():
    """Reference row: P 0.4628, R 0.7312, F1 0.5503; |F1 - hm(P, R)| <= 0.01.

    Expected to FAIL: hm(0.4628, 0.7312) = 0.5668, which sits 0.0165 from the
    reference 0.5503 — that F1 is a macro average, for which the
    harmonic-mean identity does not hold. The tolerance is asserted exactly
    as stated rather than widened.
    """
    precision, recall, reference_f1 = 0.4628, 0.7312, 0.5503
    harmonic = 2 * precision * recall / (precision + recall)
    gap = abs(reference_f1 - harmonic)
    ok = gap <= 0.01
    _verdict(f"metric-oracle-reference-row (|F1 - hm| = {gap:.4f}, tolerance 0.01)", ok)
    assert gap <= 0.01, (
        f"reference F1 {reference_f1} differs from harmonic mean {harmonic:.4f} by {gap:.4f} "
        "> 0.01: the stated consistency tolerance is unattainable on these numbers "
        "(macro-averaged F1 is not the harmonic mean of pooled P and R)"
    )
