"""Run configuration shared by the CLI and the service.

Every field has a default; precedence is flags > config file > defaults.
Config files are YAML (JSON parses as YAML, so either works).
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import yaml

from .chunking import DEFAULT_MAX_TOKENS, DEFAULT_MIN_TOKENS, DEFAULT_T1, ChunkerConfig
from .errors import ConfigError
from .scoring import ScorerConfig
from .windows import DEFAULT_CAPACITY_TOKENS, DEFAULT_OVERLAP_RATIO


@dataclass(frozen=True)
class RunConfig:
    scorer: str = "mock"
    endpoint: str | None = None
    probs: str | None = None
    seed: int = 0
    t1: float = DEFAULT_T1
    max_tokens: int = DEFAULT_MAX_TOKENS
    min_tokens: int = DEFAULT_MIN_TOKENS
    capacity: int = DEFAULT_CAPACITY_TOKENS
    overlap: float = DEFAULT_OVERLAP_RATIO
    tokenizer: str = "whitespace"
    separator_prefix: str = "========"
    top_k: int = 10
    workers: int = 4

    def validate(self) -> "RunConfig":
        self.chunker_config().validate()
        self.scorer_config().validate()
        if not 0.0 <= self.overlap < 0.5:
            raise ConfigError(f"overlap must be in [0, 0.5), got {self.overlap}")
        if self.capacity < 1:
            raise ConfigError(f"capacity must be positive, got {self.capacity}")
        if self.top_k < 0:
            raise ConfigError(f"top_k must be non-negative, got {self.top_k}")
        if self.workers < 1:
            raise ConfigError(f"workers must be positive, got {self.workers}")
        return self

    def scorer_config(self) -> ScorerConfig:
        return ScorerConfig(kind=self.scorer, endpoint=self.endpoint, prob_file=self.probs, seed=self.seed)

    def chunker_config(self) -> ChunkerConfig:
        return ChunkerConfig(t1=self.t1, max_tokens=self.max_tokens, min_tokens=self.min_tokens)

    def to_dict(self) -> dict:
        return asdict(self)


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the config file, then explicit (non-None) overrides."""
    config = RunConfig()
    if path is not None:
        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except yaml.YAMLError as exc:
            raise ConfigError(f"config file {path} is not valid YAML/JSON: {exc}") from exc
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {path} must hold a mapping")
        unknown = set(raw) - _FIELD_NAMES
        if unknown:
            raise ConfigError(f"unknown config keys in {path}: {sorted(unknown)}")
        config = replace(config, **raw)
    if overrides:
        supplied = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(supplied) - _FIELD_NAMES
        if unknown:
            raise ConfigError(f"unknown config overrides: {sorted(unknown)}")
        config = replace(config, **supplied)
    if config.endpoint is None:
        fallback = os.environ.get("CHUNKFORGE_ENDPOINT")
        if fallback:
            config = replace(config, endpoint=fallback)
    return config
