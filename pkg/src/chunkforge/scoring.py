"""Boundary scorer contract and its three implementations.

A scorer maps N blocks to N-1 boundary probabilities, one per adjacent-block
gap. The neural model lives behind an HTTP service; this module only knows
the contract. Three implementations:

* MockScorer    — deterministic hash of each adjacent pair; context-free by
                  construction, which makes window fusion exactly testable.
* FileScorer    — replays per-document probabilities stored on disk.
* RemoteScorer  — HTTP client for the /score wire protocol.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import httpx

from .blocks import Block
from .errors import (
    CapacityExceededError,
    ConfigError,
    InputError,
    ScorerProtocolError,
    ScorerTransportError,
)

logger = logging.getLogger(__name__)

# Length-(N-1) vector of probabilities over adjacent-block gaps.
BoundaryProbs = list[float]


@dataclass(frozen=True)
class ScorerConfig:
    """How to construct a scorer; ``kind`` selects the implementation."""

    kind: str = "mock"
    endpoint: str | None = None
    prob_file: str | None = None
    seed: int = 0

    def validate(self) -> "ScorerConfig":
        if self.kind not in ("mock", "file", "remote"):
            raise ConfigError(f"unknown scorer kind {self.kind!r}")
        if self.kind == "remote" and not self.endpoint:
            raise ConfigError("remote scorer requires an endpoint")
        if self.kind == "file" and not self.prob_file:
            raise ConfigError("file scorer requires a prob_file")
        return self


class Scorer:
    """Base contract: ``score`` returns len(blocks)-1 probabilities in [0, 1].

    ``doc_id`` routes file-backed lookups; other implementations ignore it.
    Implementations must be safe for concurrent calls on distinct inputs.
    """

    name = "scorer"

    def score(self, blocks: Sequence[Block], *, doc_id: str | None = None) -> BoundaryProbs:
        if not blocks:
            raise InputError("score() requires at least one block")
        probs = self._score(blocks, doc_id)
        if len(probs) != len(blocks) - 1:
            raise ScorerProtocolError(
                f"{self.name}: got {len(probs)} probabilities for {len(blocks)} blocks"
            )
        out_of_range = [p for p in probs if not 0.0 <= p <= 1.0]
        if out_of_range:
            raise ScorerProtocolError(f"{self.name}: probabilities outside [0, 1]: {out_of_range[:3]}")
        return probs

    def _score(self, blocks: Sequence[Block], doc_id: str | None) -> BoundaryProbs:
        raise NotImplementedError


class MockScorer(Scorer):
    """Deterministic stand-in for the neural scorer.

    The probability for gap i is a hash of (seed, text_i, text_{i+1}) mapped
    into [0, 1); it depends on nothing else, so windowed scoring followed by
    fusion must reproduce whole-document scoring bit for bit.
    """

    name = "mock"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def _pair_prob(self, left: str, right: str) -> float:
        payload = f"{self.seed}\n{len(left)}:{left}\n{len(right)}:{right}".encode("utf-8")
        digest = hashlib.blake2b(payload, digest_size=8).digest()
        return int.from_bytes(digest, "big") / 2.0**64

    def _score(self, blocks: Sequence[Block], doc_id: str | None) -> BoundaryProbs:
        return [self._pair_prob(a.text, b.text) for a, b in zip(blocks, blocks[1:])]


class FileScorer(Scorer):
    """Replays stored probabilities.

    Accepts either a bare JSON array (a single anonymous document) or JSONL
    objects ``{"id": ..., "probs": [...]}``. Blocks carry their document-level
    index, so windows slice the stored vector positionally.
    """

    name = "file"

    def __init__(self, prob_file: str | Path):
        path = Path(prob_file)
        if not path.exists():
            raise ConfigError(f"prob file not found: {path}")
        text = path.read_text(encoding="utf-8").strip()
        if not text:
            raise InputError(f"prob file is empty: {path}")
        self._by_doc: dict[str | None, list[float]] = {}
        if text.lstrip().startswith("["):
            self._by_doc[None] = self._validated(json.loads(text), str(path))
        else:
            for lineno, line in enumerate(text.splitlines(), start=1):
                if not line.strip():
                    continue
                obj = json.loads(line)
                if "id" not in obj or "probs" not in obj:
                    raise InputError(f"{path}:{lineno}: expected {{id, probs}}")
                self._by_doc[str(obj["id"])] = self._validated(obj["probs"], f"{path}:{lineno}")

    @staticmethod
    def _validated(probs: list, where: str) -> list[float]:
        out = []
        for p in probs:
            p = float(p)
            if not 0.0 <= p <= 1.0:
                raise InputError(f"{where}: probability {p} outside [0, 1]")
            out.append(p)
        return out

    def _lookup(self, doc_id: str | None) -> list[float]:
        if doc_id in self._by_doc:
            return self._by_doc[doc_id]
        if None in self._by_doc:
            return self._by_doc[None]
        if doc_id is None and len(self._by_doc) == 1:
            return next(iter(self._by_doc.values()))
        raise InputError(f"no stored probabilities for document {doc_id!r}")

    def _score(self, blocks: Sequence[Block], doc_id: str | None) -> BoundaryProbs:
        stored = self._lookup(doc_id)
        first, last = blocks[0].index, blocks[-1].index
        if last > len(stored):
            raise InputError(
                f"stored probabilities ({len(stored)}) too short for blocks up to index {last}"
            )
        return stored[first:last]


class RemoteScorer(Scorer):
    """HTTP client for the boundary-scoring service.

    POSTs ``{"blocks": [...]}`` to ``<endpoint>/score`` and expects
    ``{"probs": [...]}`` with exactly len(blocks)-1 values. Transport errors
    are retried ``retries`` times and then surfaced as retryable
    ScorerTransportError; contract violations are not retried. Out-of-range
    values are clamped with a warning (serving stacks emit 1.0000001-style
    float noise).
    """

    name = "remote"

    def __init__(self, endpoint: str, *, timeout: float = 30.0, retries: int = 2):
        base = endpoint.rstrip("/")
        self._url = base if base.endswith("/score") else base + "/score"
        self._retries = retries
        self._client = httpx.Client(timeout=timeout)

    def close(self) -> None:
        self._client.close()

    def _score(self, blocks: Sequence[Block], doc_id: str | None) -> BoundaryProbs:
        payload = {"blocks": [b.text for b in blocks]}
        last_exc: Exception | None = None
        for attempt in range(self._retries + 1):
            try:
                response = self._client.post(self._url, json=payload)
            except httpx.HTTPError as exc:
                last_exc = exc
                if attempt < self._retries:
                    time.sleep(0.1 * (attempt + 1))
                continue
            return self._parse(response, len(blocks))
        raise ScorerTransportError(f"scorer unreachable at {self._url}: {last_exc}") from last_exc

    def _parse(self, response: httpx.Response, n_blocks: int) -> BoundaryProbs:
        if response.status_code == 413:
            raise CapacityExceededError(f"scorer rejected request: {response.text}")
        if response.status_code >= 500:
            raise ScorerTransportError(f"scorer failed with {response.status_code}: {response.text}")
        if response.status_code != 200:
            raise ScorerProtocolError(f"scorer returned {response.status_code}: {response.text}")
        try:
            probs = response.json()["probs"]
        except (KeyError, ValueError) as exc:
            raise ScorerProtocolError(f"malformed scorer response: {exc}") from exc
        if not isinstance(probs, list) or len(probs) != n_blocks - 1:
            raise ScorerProtocolError(
                f"scorer returned {len(probs) if isinstance(probs, list) else '?'} "
                f"probabilities for {n_blocks} blocks"
            )
        out = []
        for p in probs:
            p = float(p)
            if not 0.0 <= p <= 1.0:
                logger.warning("clamping out-of-range probability %r from remote scorer", p)
                p = min(1.0, max(0.0, p))
            out.append(p)
        return out


def build_scorer(config: ScorerConfig, *, env: dict[str, str] | None = None) -> Scorer:
    """Construct the scorer named by ``config``.

    For remote scorers the ``CHUNKFORGE_ENDPOINT`` environment variable is
    used when config carries no endpoint.
    """
    env = os.environ if env is None else env
    if config.kind == "remote" and not config.endpoint:
        fallback = env.get("CHUNKFORGE_ENDPOINT")
        if fallback:
            config = ScorerConfig(kind="remote", endpoint=fallback, prob_file=config.prob_file, seed=config.seed)
    config.validate()
    if config.kind == "mock":
        return MockScorer(seed=config.seed)
    if config.kind == "file":
        return FileScorer(config.prob_file)  # type: ignore[arg-type]
    return RemoteScorer(config.endpoint)  # type: ignore[arg-type]
