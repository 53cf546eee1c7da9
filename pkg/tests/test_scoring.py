"""Scorer contract law and the mock/file/remote implementations."""

from __future__ import annotations

import json
import random

import httpx
import pytest

from chunkforge.blocks import document_from_texts
from chunkforge.errors import (
    CapacityExceededError,
    ConfigError,
    InputError,
    ScorerProtocolError,
    ScorerTransportError,
)
from chunkforge.scoring import FileScorer, MockScorer, RemoteScorer, ScorerConfig, build_scorer

from conftest import make_document


def _blocks(*texts):
    return document_from_texts("d", list(texts)).blocks


class TestContractLaw:
    def test_single_block_yields_empty(self):
        assert MockScorer(seed=1).score(_blocks("only one")) == []

    def test_length_and_bounds(self, rng):
        scorer = MockScorer(seed=3)
        for _ in range(20):
            doc = make_document(rng, rng.randint(1, 40))
            probs = scorer.score(doc.blocks)
            assert len(probs) == len(doc.blocks) - 1
            assert all(0.0 <= p <= 1.0 for p in probs)

    def test_empty_blocks_rejected(self):
        with pytest.raises(InputError):
            MockScorer(seed=1).score([])


class TestMockScorer:
    def test_deterministic(self):
        blocks = _blocks("a b", "c d", "e f")
        s = MockScorer(seed=42)
        assert s.score(blocks) == s.score(blocks)

    def test_same_pair_same_prob_regardless_of_position(self):
        s = MockScorer(seed=9)
        left = _blocks("x x", "pair a", "pair b")
        right = _blocks("pair a", "pair b", "y y")
        assert s.score(left)[1] == s.score(right)[0]

    def test_permuting_distant_blocks_leaves_gap_unchanged(self):
        s = MockScorer(seed=5)
        base = _blocks("a", "b", "c", "d", "e")
        swapped = _blocks("a", "b", "e", "d", "c")
        assert s.score(base)[0] == s.score(swapped)[0]

    def test_hundred_seeds_pairwise_distinct(self):
        blocks = _blocks("alpha one", "beta two", "gamma three", "delta four")
        sequences = [tuple(MockScorer(seed=s).score(blocks)) for s in range(100)]
        assert len(set(sequences)) == 100


class TestFileScorer:
    def test_pass_through(self, tmp_path):
        path = tmp_path / "probs.json"
        path.write_text("[0.9, 0.1]")
        scorer = FileScorer(path)
        assert scorer.score(_blocks("a", "b", "c")) == [0.9, 0.1]

    def test_jsonl_per_document(self, tmp_path):
        path = tmp_path / "probs.jsonl"
        path.write_text(
            json.dumps({"id": "d1", "probs": [0.2]}) + "\n" + json.dumps({"id": "d2", "probs": [0.8]}) + "\n"
        )
        scorer = FileScorer(path)
        blocks = _blocks("a", "b")
        assert scorer.score(blocks, doc_id="d1") == [0.2]
        assert scorer.score(blocks, doc_id="d2") == [0.8]

    def test_window_slicing_by_block_index(self, tmp_path):
        path = tmp_path / "probs.json"
        path.write_text("[0.1, 0.2, 0.3, 0.4]")
        scorer = FileScorer(path)
        doc = document_from_texts("d", ["a", "b", "c", "d", "e"])
        assert scorer.score(doc.blocks[1:4]) == [0.2, 0.3]

    def test_unknown_document(self, tmp_path):
        path = tmp_path / "probs.jsonl"
        path.write_text(json.dumps({"id": "d1", "probs": [0.2]}) + "\n")
        with pytest.raises(InputError):
            FileScorer(path).score(_blocks("a", "b"), doc_id="nope")

    def test_out_of_range_rejected(self, tmp_path):
        path = tmp_path / "probs.json"
        path.write_text("[1.5]")
        with pytest.raises(InputError):
            FileScorer(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            FileScorer(tmp_path / "absent.json")


def _remote_with(handler) -> RemoteScorer:
    scorer = RemoteScorer("http://scorer.test", retries=1)
    scorer._client = httpx.Client(transport=httpx.MockTransport(handler), timeout=5.0)
    return scorer


class TestRemoteScorer:
    def test_happy_path(self):
        def handler(request):
            body = json.loads(request.content)
            return httpx.Response(200, json={"probs": [0.5] * (len(body["blocks"]) - 1)})

        assert _remote_with(handler).score(_blocks("a", "b", "c")) == [0.5, 0.5]

    def test_clamps_float_noise(self, caplog):
        def handler(request):
            return httpx.Response(200, json={"probs": [1.0000001, -0.0000002]})

        with caplog.at_level("WARNING"):
            probs = _remote_with(handler).score(_blocks("a", "b", "c"))
        assert probs == [1.0, 0.0]
        assert any("clamping" in r.message for r in caplog.records)

    def test_length_mismatch_is_protocol_error(self):
        def handler(request):
            return httpx.Response(200, json={"probs": [0.5]})

        with pytest.raises(ScorerProtocolError):
            _remote_with(handler).score(_blocks("a", "b", "c"))

    def test_capacity_maps_to_hard_error(self):
        def handler(request):
            return httpx.Response(413, text="too large")

        with pytest.raises(CapacityExceededError):
            _remote_with(handler).score(_blocks("a", "b"))

    def test_transport_failure_retries_then_raises(self):
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            raise httpx.ConnectError("refused")

        with pytest.raises(ScorerTransportError):
            _remote_with(handler).score(_blocks("a", "b"))
        assert calls["n"] == 2  # first try + one retry

    def test_server_error_is_transport_error(self):
        def handler(request):
            return httpx.Response(500, text="model failure")

        with pytest.raises(ScorerTransportError):
            _remote_with(handler).score(_blocks("a", "b"))

    def test_score_suffix_not_duplicated(self):
        scorer = RemoteScorer("http://host:1234/score")
        assert scorer._url == "http://host:1234/score"
        scorer2 = RemoteScorer("http://host:1234")
        assert scorer2._url == "http://host:1234/score"


class TestScorerConfig:
    def test_remote_requires_endpoint(self):
        with pytest.raises(ConfigError):
            ScorerConfig(kind="remote").validate()

    def test_file_requires_prob_file(self):
        with pytest.raises(ConfigError):
            ScorerConfig(kind="file").validate()

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            ScorerConfig(kind="quantum").validate()

    def test_build_mock(self):
        scorer = build_scorer(ScorerConfig(kind="mock", seed=11))
        assert isinstance(scorer, MockScorer)
        assert scorer.seed == 11

    def test_endpoint_env_fallback(self):
        scorer = build_scorer(
            ScorerConfig(kind="remote"), env={"CHUNKFORGE_ENDPOINT": "http://fallback:9"}
        )
        assert isinstance(scorer, RemoteScorer)
        assert scorer._url == "http://fallback:9/score"


def test_random_documents_share_no_state(rng):
    # Concurrent-safety proxy: scoring one document must not affect another.
    scorer = MockScorer(seed=2)
    doc_a = make_document(rng, 12, doc_id="a")
    doc_b = make_document(rng, 12, doc_id="b")
    before = scorer.score(doc_a.blocks)
    scorer.score(doc_b.blocks)
    assert scorer.score(doc_a.blocks) == before
