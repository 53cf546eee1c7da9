"""Boundary-probability model.

Pipeline: blocks are tokenized and concatenated in order, encoded by a small
causal transformer into token hidden states, attention-pooled into one vector
per block (score_t = w·h_t, softmax within the block, weighted sum), passed
through a bidirectional context encoder, and scored pairwise by a two-layer
feed-forward head with a sigmoid — one probability per adjacent-block gap.

Weights may be random (contract testing) or restored from a checkpoint;
training is out of scope here. All inference is deterministic: dropout is
disabled and initialization is seeded.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn

_WORD = re.compile(r"\w+|[^\w\s]", re.UNICODE)


@dataclass(frozen=True)
class ModelConfig:
    model_id: str = "boundary-scorer-small"
    vocab_size: int = 4096
    d_model: int = 64
    backbone_layers: int = 2
    neck_layers: int = 2
    n_heads: int = 4
    ffn_dim: int = 128
    head_hidden: int = 64
    capacity_tokens: int = 13000
    init_seed: int = 1234


class HashTokenizer:
    """Deterministic word-piece ids via hashing; id 0 is reserved for blanks."""

    def __init__(self, vocab_size: int):
        self.vocab_size = vocab_size

    def encode(self, text: str) -> list[int]:
        pieces = _WORD.findall(text)
        if not pieces:
            return [0]
        return [
            1 + int.from_bytes(hashlib.blake2b(p.lower().encode("utf-8"), digest_size=4).digest(), "big")
            % (self.vocab_size - 1)
            for p in pieces
        ]

    def count(self, text: str) -> int:
        return len(self.encode(text))


def _sinusoidal_positions(length: int, dim: int) -> torch.Tensor:
    position = torch.arange(length, dtype=torch.float64).unsqueeze(1)
    div = torch.exp(torch.arange(0, dim, 2, dtype=torch.float64) * (-math.log(10000.0) / dim))
    table = torch.zeros(length, dim, dtype=torch.float64)
    table[:, 0::2] = torch.sin(position * div)
    table[:, 1::2] = torch.cos(position * div)
    return table.to(torch.float32)


class AttentionPooling(nn.Module):
    """Learned scalar score per token, normalized within the block."""

    def __init__(self, d_model: int):
        super().__init__()
        self.score = nn.Linear(d_model, 1, bias=False)

    def forward(self, hidden: torch.Tensor) -> torch.Tensor:
        # hidden: (tokens_in_block, d_model) -> (d_model,)
        weights = torch.softmax(self.score(hidden).squeeze(-1), dim=0)
        return weights @ hidden


class BoundaryModel(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        torch.manual_seed(config.init_seed)
        self.embedding = nn.Embedding(config.vocab_size, config.d_model)
        backbone_layer = nn.TransformerEncoderLayer(
            d_model=config.d_model,
            nhead=config.n_heads,
            dim_feedforward=config.ffn_dim,
            dropout=0.0,
            batch_first=True,
        )
        self.backbone = nn.TransformerEncoder(backbone_layer, num_layers=config.backbone_layers)
        self.pooling = AttentionPooling(config.d_model)
        neck_layer = nn.TransformerEncoderLayer(
            d_model=config.d_model,
            nhead=config.n_heads,
            dim_feedforward=config.ffn_dim,
            dropout=0.0,
            batch_first=True,
        )
        self.neck = nn.TransformerEncoder(neck_layer, num_layers=config.neck_layers)
        self.head = nn.Sequential(
            nn.Linear(2 * config.d_model, config.head_hidden),
            nn.GELU(),
            nn.Linear(config.head_hidden, 1),
        )
        self.eval()

    def forward(self, token_ids: torch.Tensor, block_spans: list[tuple[int, int]]) -> torch.Tensor:
        hidden = self.embedding(token_ids) + _sinusoidal_positions(token_ids.shape[0], self.config.d_model)
        causal = torch.triu(
            torch.ones(token_ids.shape[0], token_ids.shape[0], dtype=torch.bool), diagonal=1
        )
        hidden = self.backbone(hidden.unsqueeze(0), mask=causal).squeeze(0)
        block_reprs = torch.stack([self.pooling(hidden[s:e]) for s, e in block_spans])
        context = self.neck(block_reprs.unsqueeze(0)).squeeze(0)  # bidirectional over blocks
        if context.shape[0] < 2:
            return torch.empty(0)
        pairs = torch.cat([context[:-1], context[1:]], dim=1)
        return torch.sigmoid(self.head(pairs).squeeze(-1))


class BoundaryScorer:
    """Inference wrapper: block texts in, gap probabilities out."""

    def __init__(self, config: ModelConfig | None = None):
        self.config = config or ModelConfig()
        self.tokenizer = HashTokenizer(self.config.vocab_size)
        self.model = BoundaryModel(self.config)

    def token_count(self, blocks: list[str]) -> int:
        return sum(self.tokenizer.count(b) for b in blocks)

    @torch.no_grad()
    def score(self, blocks: list[str]) -> list[float]:
        ids: list[int] = []
        spans: list[tuple[int, int]] = []
        for block in blocks:
            encoded = self.tokenizer.encode(block)
            spans.append((len(ids), len(ids) + len(encoded)))
            ids.extend(encoded)
        probs = self.model(torch.tensor(ids, dtype=torch.long), spans)
        # sigmoid is already in (0, 1); the clamp guards float edge cases only
        return [min(1.0, max(0.0, float(p))) for p in probs]

    def save_checkpoint(self, path: str | Path) -> None:
        torch.save({"config": asdict(self.config), "state_dict": self.model.state_dict()}, path)


def load_checkpoint(path: str | Path) -> BoundaryScorer:
    """Restore a scorer; a missing or malformed file is a startup failure."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    payload = torch.load(path, map_location="cpu", weights_only=True)
    scorer = BoundaryScorer(ModelConfig(**payload["config"]))
    scorer.model.load_state_dict(payload["state_dict"])
    scorer.model.eval()
    return scorer
