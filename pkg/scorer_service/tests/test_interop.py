"""End-to-end interop: the chunking engine's remote client against a live server.

Requires the chunkforge package (installed alongside in this repo). A real
uvicorn server binds a localhost port; the primary's RemoteScorer speaks the
wire protocol against it, both standalone and through the full
window-scoring -> chunking pipeline.
"""

from __future__ import annotations

import socket
import threading
import time

import httpx
import pytest
import uvicorn

chunkforge = pytest.importorskip("chunkforge")

from chunkforge import ChunkerConfig, RemoteScorer, chunk_document, score_document, split_sentences
from chunkforge.blocks import Document
from chunkforge.errors import CapacityExceededError

from scorer_service import ModelConfig, create_app


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="module")
def live_endpoint():
    port = _free_port()
    server = uvicorn.Server(
        uvicorn.Config(create_app(ModelConfig()), host="127.0.0.1", port=port, log_level="warning")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    endpoint = f"http://127.0.0.1:{port}"
    deadline = time.monotonic() + 15.0
    while time.monotonic() < deadline:
        try:
            if httpx.get(endpoint + "/health", timeout=1.0).status_code == 200:
                break
        except httpx.HTTPError:
            time.sleep(0.05)
    else:
        pytest.fail("scorer service did not come up")
    yield endpoint
    server.should_exit = True
    thread.join(timeout=10.0)


def test_remote_client_scores_against_live_service(live_endpoint):
    scorer = RemoteScorer(live_endpoint)
    blocks = split_sentences("The tide rose quickly. Boats strained at anchor. Far inland, markets opened.")
    probs = scorer.score(blocks)
    assert len(probs) == 2
    assert all(0.0 <= p <= 1.0 for p in probs)
    assert scorer.score(blocks) == probs  # service is deterministic


def test_full_pipeline_over_live_service(live_endpoint):
    text = " ".join(
        f"Sentence number {i} talks about topic {i % 3} in some detail." for i in range(12)
    )
    blocks = split_sentences(text)
    doc = Document(id="interop", blocks=blocks)
    scorer = RemoteScorer(live_endpoint)
    probs = score_document(doc, scorer)
    assert len(probs) == len(blocks) - 1
    chunks = chunk_document(doc, probs, ChunkerConfig(t1=0.5, max_tokens=80, min_tokens=5))
    assert chunks[0].block_range[0] == 0
    assert chunks[-1].block_range[1] == len(blocks)
    assert sum(c.token_count for c in chunks) == doc.total_tokens


def test_capacity_rejection_reaches_client(live_endpoint):
    scorer = RemoteScorer(live_endpoint)
    huge = split_sentences(("word " * 7000).strip() + ". " + ("word " * 7000).strip() + ".")
    with pytest.raises(CapacityExceededError):
        scorer.score(huge)


def test_health_endpoint_shape(live_endpoint):
    body = httpx.get(live_endpoint + "/health", timeout=5.0).json()
    assert set(body) == {"status", "model_id", "capacity_tokens"}
