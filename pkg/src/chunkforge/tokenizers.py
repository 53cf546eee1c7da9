"""Pluggable token counting.

The chunking heuristics only ever need token *counts*, never token ids, so a
tokenizer here is just a named, deterministic ``text -> int`` function. The
default counts whitespace-delimited tokens; deployments that need counts to
match a specific model tokenizer can register their own.
"""

from __future__ import annotations

from typing import Callable, Protocol, runtime_checkable

from .errors import ConfigError


@runtime_checkable
class Tokenizer(Protocol):
    """Deterministic token counter with an identity recorded in outputs."""

    name: str

    def count(self, text: str) -> int: ...


class WhitespaceTokenizer:
    """Counts whitespace-delimited tokens."""

    name = "whitespace"

    def count(self, text: str) -> int:
        return len(text.split())


class CallableTokenizer:
    """Adapts a plain ``text -> int`` function to the Tokenizer protocol."""

    def __init__(self, name: str, fn: Callable[[str], int]):
        self.name = name
        self._fn = fn

    def count(self, text: str) -> int:
        return self._fn(text)


_REGISTRY: dict[str, Callable[[], Tokenizer]] = {
    "whitespace": WhitespaceTokenizer,
}


def register_tokenizer(name: str, factory: Callable[[], Tokenizer]) -> None:
    _REGISTRY[name] = factory


def get_tokenizer(name: str) -> Tokenizer:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ConfigError(f"unknown tokenizer {name!r}; registered: {sorted(_REGISTRY)}") from None
